#!/usr/bin/env python3
"""
Run the power-law envelope truncation studies and gate them.

Usage:
  python scripts/envelope_study.py [--study stream|radial|all] [--delta 0.5] [--out gates.csv] [--profiles sup.csv]

Exit codes: 0 all gates pass, 1 a gate failed, 2 bad arguments.
Reads AXIKERNEL_* settings from the environment or a local .env.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path
from typing import List, Optional

# Try to load .env if present (optional, no hard dependency)
try:
    from dotenv import load_dotenv  # type: ignore
    load_dotenv()
except Exception:
    pass

# Make the script work from the repo root with or without PYTHONPATH=.
ROOT = Path(__file__).resolve().parents[1]
for p in (ROOT, ROOT / "src"):
    sp = str(p)
    if sp not in sys.path:
        sys.path.insert(0, sp)

from src.analysis.envelope_studies import EnvelopeBox, EnvelopeProfile, radial_velocity_study, stream_bound_study  # noqa: E402
from src.models import IdentityReport, QuadratureSpec  # noqa: E402
from src.reports.build_csv import fmt, write_identity_csv  # noqa: E402
from src.utils.errors import AxiKernelError, DomainError  # noqa: E402
from src.utils.logger import configure_logging  # noqa: E402
from src.utils.settings import Settings  # noqa: E402

PROFILE_COLUMNS = ["study", "exponent", "rho_max", "half_height", "z_samples", "r", "sup_value"]


def write_profiles(profiles: List[EnvelopeProfile], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PROFILE_COLUMNS)
        for prof in profiles:
            heights = ";".join(fmt(z) for z in prof.z_samples)
            head = [prof.name, fmt(prof.exponent), fmt(prof.box.rho_max), fmt(prof.box.half_height), heights]
            for r, value in zip(prof.r_samples, prof.sup_values):
                writer.writerow(head + [fmt(r), fmt(value)])


def main(argv: Optional[List[str]] = None) -> int:
    ap = argparse.ArgumentParser(description="Power-law envelope truncation studies")
    ap.add_argument("--study", choices=["stream", "radial", "all"], default="all")
    ap.add_argument("--delta", type=float, default=0.5, help="u_r decay exponent (default 0.5)")
    ap.add_argument("--nodes-per-decade", type=int, default=20)
    ap.add_argument("--tol-rel", type=float, default=None)
    ap.add_argument("--out", type=Path, default=None, help="gate CSV (default stdout)")
    ap.add_argument("--profiles", type=Path, default=None, help="optional CSV of the sampled suprema")
    ap.add_argument("--debug", action="store_true")
    args = ap.parse_args(argv)

    configure_logging(debug=True if args.debug else None)
    try:
        settings = Settings.from_env()
        spec = QuadratureSpec.from_env(rel_tol=args.tol_rel)
        box = EnvelopeBox(nodes_per_decade=args.nodes_per_decade)
        profiles: List[EnvelopeProfile] = []
        rows: List[IdentityReport] = []
        if args.study in ("stream", "all"):
            got, checks = stream_bound_study(settings, spec, box)
            profiles += got
            rows += checks
        if args.study in ("radial", "all"):
            got, checks = radial_velocity_study(settings, spec, args.delta, box)
            profiles += got
            rows += checks
    except (ValueError, DomainError) as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return 2
    except AxiKernelError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return 1

    if args.out is None:
        failures = write_identity_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            failures = write_identity_csv(rows, fh)
    if args.profiles is not None:
        write_profiles(profiles, args.profiles)
    print(f"{len(rows) - failures}/{len(rows)} envelope gates passed", file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
