"""Per-iteration trajectory records and their CSV serialization.

Column order is fixed; absent values are written as empty fields.  Floats
are written with repr(), the shortest round-trip decimal representation, so
identical runs produce byte-identical files across platforms.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

CSV_COLUMNS = (
    "iter",
    "wall_time_s",
    "surrogate_P",
    "true_P_gap",
    "grad_norm",
    "step_norm",
    "lambda",
    "delta",
    "rho",
    "step_class",
    "inner_iters",
)


@dataclass(frozen=True)
class IterationRecord:
    """One outer-iteration row of a solver trajectory."""

    iter: int
    wall_time_s: float
    surrogate_P: float
    true_P_gap: Optional[float] = None
    grad_norm: Optional[float] = None
    step_norm: Optional[float] = None
    lam: Optional[float] = None
    delta: Optional[float] = None
    rho: Optional[float] = None
    step_class: Optional[str] = None
    inner_iters: Optional[int] = None

    def as_row(self) -> list[str]:
        def fmt(v) -> str:
            if v is None:
                return ""
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return [
            fmt(self.iter),
            fmt(float(self.wall_time_s)),
            fmt(float(self.surrogate_P)),
            fmt(None if self.true_P_gap is None else float(self.true_P_gap)),
            fmt(None if self.grad_norm is None else float(self.grad_norm)),
            fmt(None if self.step_norm is None else float(self.step_norm)),
            fmt(None if self.lam is None else float(self.lam)),
            fmt(None if self.delta is None else float(self.delta)),
            fmt(None if self.rho is None else float(self.rho)),
            fmt(self.step_class),
            fmt(self.inner_iters),
        ]


def write_trajectory_csv(path: str | Path, records: Iterable[IterationRecord]) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.as_row())


def read_trajectory_csv(path: str | Path) -> list[IterationRecord]:
    path = Path(path)
    records: list[IterationRecord] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected trajectory header in {path}: {header}")
        for row in reader:
            vals = dict(zip(CSV_COLUMNS, row))

            def opt_float(key: str) -> Optional[float]:
                return float(vals[key]) if vals[key] != "" else None

            records.append(IterationRecord(
                iter=int(vals["iter"]),
                wall_time_s=float(vals["wall_time_s"]),
                surrogate_P=float(vals["surrogate_P"]),
                true_P_gap=opt_float("true_P_gap"),
                grad_norm=opt_float("grad_norm"),
                step_norm=opt_float("step_norm"),
                lam=opt_float("lambda"),
                delta=opt_float("delta"),
                rho=opt_float("rho"),
                step_class=vals["step_class"] or None,
                inner_iters=int(vals["inner_iters"]) if vals["inner_iters"] != "" else None,
            ))
    return records
