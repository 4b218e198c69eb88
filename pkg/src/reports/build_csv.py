"""CSV rendering of identity, norm and kernel-evaluation reports.

Bodies are deterministic: floats are written with 17 significant digits and
the only time-dependent line is the optional ``# generated:`` stamp.
"""
from __future__ import annotations

import csv
from datetime import datetime, timezone
from typing import Any, Iterable, List, Optional, Sequence, TextIO, Tuple

from pydantic import BaseModel

from src.models import IdentityReport, NormReport

IDENTITY_COLUMNS = [
    "name", "parameters", "lhs", "rhs", "abs_error", "rel_error", "tolerance", "error_estimate", "status",
]
NORM_COLUMNS = [
    "kind", "parameter", "r", "value", "scaled_value", "fitted_exponent", "reference_exponent",
    "exponent_error", "constant", "max_ratio_deviation", "proof_window", "status",
]
EVAL_COLUMNS = ["quantity", "t", "r", "rho", "zeta", "value", "error_estimate", "flag"]


class EvalRow(BaseModel):
    """One evaluated kernel point; ``value`` is None for flagged rows."""

    quantity: str
    t: Optional[float] = None
    r: float
    rho: float
    zeta: float
    value: Optional[float] = None
    error_estimate: Optional[float] = None
    flag: str = ""


def fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def _writer(out: TextIO, stamp: bool) -> Any:
    if stamp:
        out.write(f"# generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    return csv.writer(out, lineterminator="\n")


def _params(parameters: dict) -> str:
    return ";".join(f"{k}={fmt(v)}" for k, v in sorted(parameters.items()))


def write_identity_csv(reports: Iterable[IdentityReport], out: TextIO, *, stamp: bool = False) -> int:
    """Returns the number of failed rows."""
    writer = _writer(out, stamp)
    writer.writerow(IDENTITY_COLUMNS)
    failures = 0
    for rep in reports:
        failures += 0 if rep.passed else 1
        writer.writerow([
            rep.name,
            _params(rep.parameters),
            fmt(rep.lhs),
            fmt(rep.rhs),
            fmt(rep.abs_error),
            fmt(rep.rel_error),
            fmt(rep.tolerance),
            fmt(rep.error_estimate),
            "pass" if rep.passed else "FAIL",
        ])
    return failures


def write_norm_csv(
    reports: Sequence[Tuple[NormReport, Optional[Tuple[float, float]], bool]],
    out: TextIO,
    *,
    stamp: bool = False,
) -> None:
    """One row per (report, r); each entry carries its proof window and gate verdict."""
    writer = _writer(out, stamp)
    writer.writerow(NORM_COLUMNS)
    for rep, window, passed in reports:
        window_text = "" if window is None else f"({fmt(window[0])};{fmt(window[1])})"
        for r, value in zip(rep.r_samples, rep.values):
            writer.writerow([
                rep.kind.value,
                fmt(rep.parameter),
                fmt(r),
                fmt(value),
                fmt(value / r ** rep.reference_exponent),
                fmt(rep.fitted_exponent),
                fmt(rep.reference_exponent),
                fmt(rep.exponent_error),
                fmt(rep.constant),
                fmt(rep.max_ratio_deviation),
                window_text,
                "pass" if passed else "FAIL",
            ])


def write_eval_csv(rows: Iterable[EvalRow], out: TextIO, *, stamp: bool = False) -> List[EvalRow]:
    writer = _writer(out, stamp)
    writer.writerow(EVAL_COLUMNS)
    written: List[EvalRow] = []
    for row in rows:
        writer.writerow([
            row.quantity,
            fmt(row.t),
            fmt(row.r),
            fmt(row.rho),
            fmt(row.zeta),
            fmt(row.value),
            fmt(row.error_estimate),
            row.flag,
        ])
        written.append(row)
    return written


__all__ = [
    "IDENTITY_COLUMNS",
    "NORM_COLUMNS",
    "EVAL_COLUMNS",
    "EvalRow",
    "fmt",
    "write_identity_csv",
    "write_norm_csv",
    "write_eval_csv",
]
