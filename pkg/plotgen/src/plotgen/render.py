"""Render convergence figures from benchmark trajectory CSVs.

Input is a results directory produced by the benchmark runner: an
index.json listing runs and one trajectory CSV per run with the columns

    iter,wall_time_s,surrogate_P,true_P_gap,grad_norm,step_norm,lambda,
    delta,rho,step_class,inner_iters

The figure plots the primal gap (true_P_gap) against wall time or
iteration count, one curve per algorithm, log-scaled gap axis.  Next to the
image a sidecar JSON records the exact min/max of each plotted series so
regressions can be asserted without comparing pixels.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

GAP_FLOOR = 1e-16
PLATEAU_VARIANCE = 1e-12

EXPECTED_HEADER = (
    "iter", "wall_time_s", "surrogate_P", "true_P_gap", "grad_norm",
    "step_norm", "lambda", "delta", "rho", "step_class", "inner_iters",
)


class PlotInputError(RuntimeError):
    """Missing or malformed input; the message names the offending file."""


@dataclass(frozen=True)
class PlotSpec:
    input_dir: Path
    output: Path
    x_axis: str = "time"  # "time" | "iter"
    log_y: bool = True
    include: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.x_axis not in ("time", "iter"):
            raise ValueError(f"x_axis must be 'time' or 'iter', got {self.x_axis!r}")


@dataclass(frozen=True)
class Series:
    name: str
    x: list[float]
    gap: list[float]

    @property
    def plateau(self) -> bool:
        tail = self.gap[3 * len(self.gap) // 4:]
        if len(tail) < 2:
            return False
        mean = sum(tail) / len(tail)
        var = sum((v - mean) ** 2 for v in tail) / len(tail)
        return var < PLATEAU_VARIANCE


def _read_series(csv_path: Path, name: str, x_axis: str) -> Series:
    if not csv_path.exists():
        raise PlotInputError(f"trajectory file not found: {csv_path}")
    xs: list[float] = []
    gaps: list[float] = []
    with csv_path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise PlotInputError(f"empty trajectory file: {csv_path}") from None
        if header != EXPECTED_HEADER:
            raise PlotInputError(
                f"malformed trajectory header in {csv_path}: {header}")
        for row in reader:
            vals = dict(zip(EXPECTED_HEADER, row))
            if vals["true_P_gap"] == "":
                continue
            try:
                x = float(vals["iter"]) if x_axis == "iter" \
                    else float(vals["wall_time_s"])
                gaps.append(float(vals["true_P_gap"]))
            except ValueError as exc:
                raise PlotInputError(
                    f"malformed numeric field in {csv_path}: {exc}") from exc
            xs.append(x)
    return Series(name=name, x=xs, gap=gaps)


def load_series(spec: PlotSpec) -> list[Series]:
    index_path = Path(spec.input_dir) / "index.json"
    if not Path(spec.input_dir).is_dir():
        raise PlotInputError(f"input directory not found: {spec.input_dir}")
    if not index_path.exists():
        raise PlotInputError(f"index file not found: {index_path}")
    with index_path.open() as fh:
        index = json.load(fh)
    wanted = {n.lower() for n in spec.include}
    series = []
    for run in index.get("runs", []):
        if wanted and run["name"].lower() not in wanted:
            continue
        series.append(_read_series(Path(spec.input_dir) / run["trajectory_csv"],
                                   run["name"], spec.x_axis))
    if not series:
        raise PlotInputError(
            f"no runs selected from {index_path} (include={spec.include})")
    return series


def render(spec: PlotSpec) -> tuple[Path, Path]:
    """Write the figure and its sidecar JSON; returns both paths."""
    series = load_series(spec)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for s in series:
        gaps = [max(v, GAP_FLOOR) for v in s.gap]
        ax.plot(s.x, gaps, label=s.name, linewidth=1.4)
        if s.plateau:
            ax.annotate("plateau", (s.x[-1], max(s.gap[-1], GAP_FLOOR)),
                        textcoords="offset points", xytext=(-8, 6),
                        ha="right", fontsize=8)
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("wall time (s)" if spec.x_axis == "time" else "iteration")
    ax.set_ylabel("primal gap P(x) - P*")
    ax.legend()
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    output = Path(spec.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, dpi=150)
    plt.close(fig)

    sidecar = output.with_suffix(output.suffix + ".json")
    payload = {
        "x_axis": spec.x_axis,
        "log_y": spec.log_y,
        "series": {
            s.name: {
                "points": len(s.x),
                "x": {"min": repr(min(s.x)), "max": repr(max(s.x))},
                "gap": {"min": repr(min(s.gap)), "max": repr(max(s.gap))},
                "plateau": s.plateau,
            }
            for s in series
        },
    }
    with sidecar.open("w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return output, sidecar
