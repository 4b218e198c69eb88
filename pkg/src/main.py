#!/usr/bin/env python3
"""Command-line entry point.

Usage:
  python -m src.main eval Gamma 1,1,1 2,1,0.5
  python -m src.main verify-bounds --p 1,1.5 --delta 0,0.5 --r-samples 0.25,1,4
  python -m src.main identity-check [--quick]
  python -m src.main oracle-compare
  python -m src.main manufacture --grid 0:4:161,-4:4:321 --out omega.csv --reference-out L_exact.csv
      --reference-velocity-out u_exact.csv
  python -m src.main reconstruct --in omega.csv --grid 0.1:3:59,-3:3:61 --out L.csv --reference L_exact.csv
      --reference-velocity u_exact.csv

Exit status: 0 when every gate passes, 1 on a numerical gate failure, 2 on a
usage or data error. CSV goes to ``--out`` (stdout when omitted), logs to
stderr; ``APP_DEBUG=1`` or ``--debug`` turns on debug logging.
"""
from __future__ import annotations

import argparse
import itertools
import logging
import math
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Sequence, TextIO, Tuple

from pydantic import BaseModel, Field, ValidationError

from src.models import FieldQuantity, IdentityReport, KernelArgs, NormKind, QuadratureSpec
from src.reports.build_csv import EvalRow, write_eval_csv, write_identity_csv, write_norm_csv
from src.services import bessel, fields, kernel, norms
from src.utils.errors import AxiKernelError, DomainError, FieldDataError, QuadratureAccuracyError, SingularityError
from src.utils.logger import configure_logging
from src.utils.settings import Settings, parse_float_list

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_GATE = 1
EXIT_USAGE = 2

COMMANDS = ("eval", "verify-bounds", "identity-check", "oracle-compare", "reconstruct", "manufacture")
QUANTITIES = ("G", "dzG", "Gamma", "dzGamma")

FIRST_MOMENT_POINTS = list(itertools.product((0.1, 1.0, 10.0), (0.5, 1.0, 2.0)))
SEMIGROUP_TUPLES = [
    (0.5, 0.5, 1.0, 1.0, 0.0),
    (1.0, 2.0, 1.0, 1.5, 0.5),
    (2.0, 1.0, 1.0, 1.5, 0.5),
    (0.25, 0.75, 0.5, 2.0, -1.0),
    (1.0, 1.0, 2.0, 1.0, 1.0),
]
SCALING_FACTORS = (0.5, 2.0, 4.0)
SCALING_POINTS = [(1.0, 1.0, 1.0), (0.5, 2.0, -0.3)]
AXIAL_PAIRS = [(1.0, 0.5), (1.0, 2.0), (0.3, 0.3)]
LIFT_POINTS = [(1.0, 1.0, 1.0, 0.0), (0.1, 1.0, 2.0, 0.3), (1e-3, 1.0, 1.05, 0.0), (10.0, 0.5, 3.0, -2.0)]
ORACLE_POINTS = [
    *itertools.product((0.5, 1.0, 3.0), (0.7, 2.0), (-1.0, 0.25, 1.5)),
    (1.0, 1.0, 1.0),
    (1.0, 1.0, 0.05),
]
ENDPOINT_EXCLUSIONS = (1e-1, 1e-2, 1e-3)


class RunConfig(BaseModel):
    """Validated view of the command line (paths and parameter lists checked before any work)."""

    command: str
    rel_tol: Optional[float] = None
    abs_tol: Optional[float] = None
    in_path: Optional[Path] = None
    out_path: Optional[Path] = None
    r_samples: List[float] = Field(default_factory=list)
    p_values: List[float] = Field(default_factory=list)
    delta_values: List[float] = Field(default_factory=list)
    seed: int = 0
    stamp: bool = False

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec.from_env(rel_tol=self.rel_tol, abs_tol=self.abs_tol)


# --------------------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------------------

def _float_list(text: str) -> List[float]:
    try:
        values = parse_float_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _kinds(text: str) -> List[NormKind]:
    try:
        return [NormKind(k.strip()) for k in text.split(",") if k.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _gate(text: str) -> Tuple[str, float]:
    name, sep, value = text.partition("=")
    name = name.strip()
    if not sep or name not in Settings.model_fields or not name.startswith("gate_"):
        raise argparse.ArgumentTypeError(f"expected gate_NAME=VALUE with a known gate, got {text!r}")
    try:
        return name, float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"gate value must be a number, got {value!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rel", type=float, default=None, help="relative quadrature tolerance")
    common.add_argument("--tol-abs", type=float, default=None, help="absolute quadrature tolerance")
    common.add_argument("--out", type=Path, default=None, help="output CSV (default: stdout)")
    common.add_argument("--stamp", action="store_true", help="add a timestamp comment to CSV headers")
    common.add_argument("--gate", type=_gate, action="append", default=[], help="override a gate, e.g. gate_oracle=1e-7")
    common.add_argument("--seed", type=int, default=0, help="reserved; every command is deterministic")
    common.add_argument("--debug", action="store_true", help="debug logging (same as APP_DEBUG=1)")

    parser = argparse.ArgumentParser(
        prog="axikernel",
        description="Green function and heat kernel of -(Laplacian - 1/r^2): evaluation, bounds, reconstruction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", parents=[common], help="evaluate G, dzG, Gamma or dzGamma at points")
    p_eval.add_argument("quantity", choices=QUANTITIES)
    p_eval.add_argument("points", nargs="*", help="t,r,rho,zeta for G/dzG; r,rho,zeta for Gamma/dzGamma")
    p_eval.add_argument("--in", dest="in_path", type=Path, default=None, help="file with one point per line")

    p_bounds = sub.add_parser("verify-bounds", parents=[common], help="weighted-norm scaling laws")
    p_bounds.add_argument(
        "--kinds", type=_kinds,
        default=list(NormKind), help="comma-separated subset of " + ",".join(k.value for k in NormKind),
    )
    p_bounds.add_argument("--p", dest="p_values", type=_float_list, default=None)
    p_bounds.add_argument("--delta", dest="delta_values", type=_float_list, default=None)
    p_bounds.add_argument("--r-samples", type=_float_list, default=None)
    p_bounds.add_argument("--endpoint-out", type=Path, default=None, help="also run the excluded-endpoint study")

    p_ident = sub.add_parser("identity-check", parents=[common], help="Bessel and kernel identity battery")
    p_ident.add_argument("--quick", action="store_true", help="one parameter per identity")

    sub.add_parser("oracle-compare", parents=[common], help="Gamma: quadrature vs ring oracle vs closed form")

    p_man = sub.add_parser("manufacture", parents=[common], help="write the manufactured omega_theta field")
    p_man.add_argument("--grid", required=True, type=fields.MeridianGrid.parse)
    p_man.add_argument("--reference-out", type=Path, default=None, help="exact L_theta on the same grid")
    p_man.add_argument("--reference-velocity-out", type=Path, default=None, help="exact (u_r, u_z) on the same grid")

    p_rec = sub.add_parser("reconstruct", parents=[common], help="L_theta and velocity from omega_theta")
    p_rec.add_argument("--in", dest="in_path", type=Path, required=True)
    p_rec.add_argument("--grid", required=True, type=fields.MeridianGrid.parse, help="rmin:rmax:nr,zmin:zmax:nz")
    p_rec.add_argument("--velocity-out", type=Path, default=None)
    p_rec.add_argument("--delta", dest="delta_values", type=_float_list, default=[0.0])
    p_rec.add_argument("--reference", type=Path, default=None, help="L_theta CSV to measure the roundtrip against")
    p_rec.add_argument(
        "--reference-velocity", type=Path, default=None, help="velocity CSV to measure the u_r and u_z roundtrip against"
    )
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    settings = Settings.from_env()
    if args.gate:
        settings = Settings.model_validate({**settings.model_dump(), **dict(args.gate)})
    return settings


@contextmanager
def _output(path: Optional[Path]) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        yield fh


def _check_writable(path: Optional[Path]) -> None:
    if path is not None and not path.parent.exists():
        raise FieldDataError(f"output directory {path.parent} does not exist")


# --------------------------------------------------------------------------------------
# eval
# --------------------------------------------------------------------------------------

def _parse_points(texts: Sequence[str], width: int, origin: str) -> List[Tuple[float, ...]]:
    points = []
    for n, text in enumerate(texts, start=1):
        text = text.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            values = tuple(float(v) for v in text.split(","))
        except ValueError:
            raise FieldDataError(f"{origin} {n}: not a list of numbers: {text!r}") from None
        if len(values) != width:
            raise FieldDataError(f"{origin} {n}: expected {width} numbers, got {len(values)}")
        points.append(values)
    return points


def _eval_point(quantity: str, point: Tuple[float, ...], quad: QuadratureSpec) -> EvalRow:
    if quantity in ("G", "dzG"):
        t, r, rho, zeta = point
        args = KernelArgs(t, r, rho, zeta)
        value = kernel.heat_kernel(args) if quantity == "G" else kernel.heat_kernel_dz(args)
        return EvalRow(quantity=quantity, t=t, r=r, rho=rho, zeta=zeta, value=value, error_estimate=0.0)
    r, rho, zeta = point
    try:
        if quantity == "Gamma":
            res = kernel.green_function_quad(r, rho, zeta, quad)
        else:
            res = kernel.green_function_dz_quad(r, rho, zeta, quad)
    except SingularityError:
        return EvalRow(quantity=quantity, r=r, rho=rho, zeta=zeta, flag="singular")
    return EvalRow(
        quantity=quantity, r=r, rho=rho, zeta=zeta, value=res.value, error_estimate=res.error_estimate
    )


def cmd_eval(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    width = 4 if args.quantity in ("G", "dzG") else 3
    points = _parse_points(args.points, width, "point")
    if config.in_path is not None:
        try:
            lines = config.in_path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise FieldDataError(f"cannot read {config.in_path}: {exc}") from exc
        points.extend(_parse_points(lines, width, "line"))
    if not points:
        raise FieldDataError("no points given")
    quad = config.quadrature()
    rows = [_eval_point(args.quantity, p, quad) for p in points]
    with _output(config.out_path) as out:
        write_eval_csv(rows, out, stamp=config.stamp)
    return EXIT_OK


# --------------------------------------------------------------------------------------
# verify-bounds
# --------------------------------------------------------------------------------------

def _norm_gates(kind: NormKind, settings: Settings) -> Tuple[float, float]:
    if kind is NormKind.LP_INVERSE_RHO:
        return settings.gate_exponent_lp, settings.gate_ratio_deviation
    if kind is NormKind.L2_RHO:
        return settings.gate_exponent_l2, settings.gate_ratio_deviation
    return settings.gate_exponent_dz, settings.gate_ratio_deviation_dz


def _endpoint_study(r: float, quad: QuadratureSpec) -> List[IdentityReport]:
    """Truncated p = 2 and delta = 1 functionals must grow as the exclusion shrinks."""
    reports = []
    for kind, parameter in ((NormKind.LP_INVERSE_RHO, 2.0), (NormKind.DZ_L1_RHO_DELTA, 1.0)):
        previous = None
        for eps in ENDPOINT_EXCLUSIONS:
            value = norms.truncated_norm(kind, r, parameter, eps, quad)
            growth = math.inf if previous is None else value - previous
            reports.append(
                IdentityReport(
                    name=f"{kind.value}_endpoint",
                    parameters={"parameter": parameter, "r": r, "exclusion_radius": eps},
                    lhs=value,
                    rhs=previous if previous is not None else 0.0,
                    abs_error=abs(growth) if previous is not None else 0.0,
                    rel_error=0.0 if growth > 0.0 else math.inf,
                    tolerance=0.0,
                )
            )
            previous = value
    return reports


def cmd_verify_bounds(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    r_samples = config.r_samples or settings.r_samples
    jobs: List[Tuple[NormKind, Optional[float]]] = []
    for kind in args.kinds:
        if kind is NormKind.LP_INVERSE_RHO:
            jobs.extend((kind, norms.check_p(p)) for p in (config.p_values or settings.p_values))
        elif kind is NormKind.DZ_L1_RHO_DELTA:
            jobs.extend((kind, norms.check_delta(d)) for d in (config.delta_values or settings.delta_values))
        else:
            jobs.append((kind, None))
    if len(set(r_samples)) < 3 or any(not r > 0.0 for r in r_samples):
        raise DomainError(f"need at least 3 distinct positive r samples, got {r_samples}")
    _check_writable(config.out_path)
    _check_writable(args.endpoint_out)

    quad = config.quadrature()
    rows = []
    failures = 0
    for kind, parameter in jobs:
        report = norms.scaling_report(kind, parameter, r_samples, quad)
        exponent_gate, ratio_gate = _norm_gates(kind, settings)
        passed = report.exponent_error <= exponent_gate and report.max_ratio_deviation <= ratio_gate
        failures += 0 if passed else 1
        window = norms.proof_admissibility_window(kind, parameter) if parameter is not None else None
        rows.append((report, window, passed))
    with _output(config.out_path) as out:
        write_norm_csv(rows, out, stamp=config.stamp)

    if args.endpoint_out is not None:
        with _output(args.endpoint_out) as out:
            failures += write_identity_csv(_endpoint_study(1.0, quad), out, stamp=config.stamp)
    if failures:
        logger.error("%d bound check(s) missed their gate", failures)
        return EXIT_GATE
    return EXIT_OK


# --------------------------------------------------------------------------------------
# identity-check / oracle-compare
# --------------------------------------------------------------------------------------

def identity_battery(settings: Settings, quad: QuadratureSpec, quick: bool = False) -> Iterator[IdentityReport]:
    params = [2.0] if quick else settings.identity_parameters
    for a in params:
        yield bessel.verify_identity_id1(a, quad, tolerance=settings.gate_bessel)
        yield bessel.verify_identity_id2(a, quad, tolerance=settings.gate_bessel)
        yield bessel.verify_lemma_sphere(a, quad, tolerance=settings.gate_bessel)
        yield bessel.sphere_angle_integral(a, quad, tolerance=settings.gate_bessel)
    for t, r, rho, zeta in LIFT_POINTS[:1] if quick else LIFT_POINTS:
        args = KernelArgs(t, r, rho, zeta)
        lifted = kernel.heat_kernel_5d_lift(args, quad)
        yield IdentityReport.compare(
            "heat_kernel_5d_lift",
            lifted.value,
            kernel.heat_kernel(args),
            parameters={"t": t, "r": r, "rho": rho, "zeta": zeta},
            tolerance=settings.gate_bessel,
            error_estimate=lifted.error_estimate,
        )
    for r, rho in AXIAL_PAIRS[:1] if quick else AXIAL_PAIRS:
        yield kernel.axial_integral_check(r, rho, quad, tolerance=settings.gate_axial)
    for lmbda in SCALING_FACTORS[1:2] if quick else SCALING_FACTORS:
        for point in SCALING_POINTS[:1] if quick else SCALING_POINTS:
            yield from kernel.scaling_check(lmbda, *point, quad, tolerance=settings.gate_scaling)
    if quick:
        return
    for t, r in FIRST_MOMENT_POINTS:
        yield kernel.first_moment_check(t, r, quad, tolerance=settings.gate_first_moment)
    for s, t, r, rho_final, zeta in SEMIGROUP_TUPLES:
        yield kernel.semigroup_check(s, t, r, rho_final, zeta, quad, tolerance=settings.gate_semigroup)


def cmd_identity_check(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    _check_writable(config.out_path)
    quad = config.quadrature()
    with _output(config.out_path) as out:
        failures = write_identity_csv(identity_battery(settings, quad, args.quick), out, stamp=config.stamp)
    if failures:
        logger.error("%d identity check(s) failed", failures)
        return EXIT_GATE
    return EXIT_OK


def oracle_battery(settings: Settings, quad: QuadratureSpec) -> Iterator[IdentityReport]:
    for r, rho, zeta in ORACLE_POINTS:
        params = {"r": r, "rho": rho, "zeta": zeta}
        oracle = kernel.green_function_oracle(r, rho, zeta, quad)
        quadrature = kernel.green_function_quad(r, rho, zeta, quad)
        yield IdentityReport.compare(
            "Gamma_vs_ring_oracle", quadrature.value, oracle, parameters=params,
            tolerance=settings.gate_oracle, error_estimate=quadrature.error_estimate,
        )
        yield IdentityReport.compare(
            "closed_form_vs_ring_oracle", float(kernel.green_function_closed(r, rho, zeta)), oracle,
            parameters=params, tolerance=settings.gate_oracle,
        )


def cmd_oracle_compare(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    _check_writable(config.out_path)
    quad = config.quadrature()
    with _output(config.out_path) as out:
        failures = write_identity_csv(oracle_battery(settings, quad), out, stamp=config.stamp)
    return EXIT_GATE if failures else EXIT_OK


# --------------------------------------------------------------------------------------
# manufacture / reconstruct
# --------------------------------------------------------------------------------------

def cmd_manufacture(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    for path in (config.out_path, args.reference_out, args.reference_velocity_out):
        _check_writable(path)
    omega = fields.MeridianScalarField.from_function(
        fields.manufactured_vorticity, args.grid, FieldQuantity.OMEGA_THETA,
        provenance="manufactured: omega = 2r(5 - 2r^2 - 2z^2) exp(-r^2 - z^2)",
    )
    with _output(config.out_path) as out:
        fields.write_scalar_field_csv(omega, out, stamp=config.stamp)
    if args.reference_out is not None:
        exact = fields.MeridianScalarField.from_function(
            fields.manufactured_stream, args.grid, FieldQuantity.L_THETA,
            provenance="manufactured: L = r exp(-r^2 - z^2)",
        )
        fields.write_scalar_field_csv(exact, args.reference_out, stamp=config.stamp)
    if args.reference_velocity_out is not None:
        u_r, u_z = fields.manufactured_velocity(*args.grid.mesh())
        exact_velocity = fields.MeridianVelocityField(
            args.grid.r_axis, args.grid.z_axis, u_r, u_z,
            provenance="manufactured: (u_r, u_z) = (2rz, 2(1 - r^2)) exp(-r^2 - z^2)",
        )
        fields.write_velocity_field_csv(exact_velocity, args.reference_velocity_out, stamp=config.stamp)
    return EXIT_OK


def _default_velocity_path(out: Optional[Path], in_path: Path) -> Path:
    """Next to ``--out``, or next to the input when L goes to stdout."""
    anchor = out if out is not None else in_path
    return anchor.with_name(f"{anchor.stem}_velocity{anchor.suffix or '.csv'}")


def _gate_roundtrip(name: str, error: float, settings: Settings) -> bool:
    if error > settings.gate_roundtrip:
        logger.error("%s roundtrip error %.3e exceeds gate %.1e", name, error, settings.gate_roundtrip)
        return False
    return True


def cmd_reconstruct(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    if not config.in_path.is_file():
        raise FieldDataError(f"input file {config.in_path} does not exist")
    velocity_path = args.velocity_out or _default_velocity_path(config.out_path, config.in_path)
    for path in (config.out_path, velocity_path):
        _check_writable(path)
    for label, path in (("reference", args.reference), ("reference velocity", args.reference_velocity)):
        if path is not None and not path.is_file():
            raise FieldDataError(f"{label} file {path} does not exist")
    for delta in config.delta_values:
        norms.check_delta(delta)

    omega = fields.read_scalar_field_csv(config.in_path)
    if omega.quantity is not FieldQuantity.OMEGA_THETA:
        raise FieldDataError(f"{config.in_path} holds {omega.quantity.value}, expected omega_theta")
    quad = config.quadrature()
    L = fields.stream_from_vorticity(omega, args.grid, quad)
    u_z = fields.uz_from_stream(L)
    u_r = fields.ur_from_vorticity(omega, args.grid, quad)
    velocity = fields.MeridianVelocityField(
        L.r_axis, L.z_axis, u_r.values, u_z.values,
        provenance=f"u_r = -dzGamma * omega_theta; u_z = (1/r) dr(r L_theta); source: {omega.provenance}",
    )

    with _output(config.out_path) as out:
        fields.write_scalar_field_csv(L, out, stamp=config.stamp)
    fields.write_velocity_field_csv(velocity, velocity_path, stamp=config.stamp)
    logger.info("velocity written to %s", velocity_path)

    summary: Dict[str, float] = {"sup_abs_L_theta": L.sup()}
    positive = L.r_axis > 0.0
    for delta in config.delta_values:
        weighted = L.r_axis[positive][:, None] ** delta * abs(u_r.values[positive])
        summary[f"sup_r^{delta:g}_abs_u_r"] = float(weighted.max(initial=0.0))
    summary["divergence_rms"] = fields.grid_rms(fields.velocity_divergence(velocity).values)
    summary["sup_rho^2_abs_omega"] = fields.corollary_assumption_check(omega, 2.0).sup_value

    passed = True
    if args.reference is not None:
        error = fields.sup_relative_error(L, fields.read_scalar_field_csv(args.reference))
        summary["roundtrip_sup_relative_error"] = error
        passed &= _gate_roundtrip("L_theta", error, settings)
    if args.reference_velocity is not None:
        exact = fields.read_velocity_field_csv(args.reference_velocity)
        ur_error, uz_error = fields.velocity_sup_relative_errors(velocity, exact)
        summary["roundtrip_u_r_sup_relative_error"] = ur_error
        summary["roundtrip_u_z_sup_relative_error"] = uz_error
        passed &= _gate_roundtrip("u_r", ur_error, settings)
        passed &= _gate_roundtrip("u_z", uz_error, settings)

    sink = sys.stderr if config.out_path is None else sys.stdout
    for key, value in summary.items():
        print(f"{key}: {value:.10g}", file=sink)
    return EXIT_OK if passed else EXIT_GATE


HANDLERS: Dict[str, Callable[[argparse.Namespace, RunConfig, Settings], int]] = {
    "eval": cmd_eval,
    "verify-bounds": cmd_verify_bounds,
    "identity-check": cmd_identity_check,
    "oracle-compare": cmd_oracle_compare,
    "manufacture": cmd_manufacture,
    "reconstruct": cmd_reconstruct,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(debug=True if args.debug else None)
    try:
        config = RunConfig(
            command=args.command,
            rel_tol=args.tol_rel,
            abs_tol=args.tol_abs,
            in_path=getattr(args, "in_path", None),
            out_path=args.out,
            r_samples=getattr(args, "r_samples", None) or [],
            p_values=getattr(args, "p_values", None) or [],
            delta_values=getattr(args, "delta_values", None) or [],
            seed=args.seed,
            stamp=args.stamp,
        )
        settings = _settings(args)
        config.quadrature()
        return HANDLERS[args.command](args, config, settings)
    except ValidationError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, FieldDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureAccuracyError as exc:
        logger.error("%s", exc)
        return EXIT_GATE
    except AxiKernelError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
