"""Experiment harness: config parsing, batch runs, summaries, certification.

A JSON config has three sections:

  problem     {"kind": "du"|"quadratic", "params": {...}, "constants": {...}}
  algorithms  [{"name": ..., "algorithm": "gda"|"mcn"|"minimax_tr"|"minimax_trace",
                "settings": {...}}, ...]
  run         {"seed": int, "max_time_s": float, ...}

Per-algorithm settings mirror the corresponding config dataclass fields.
Each run produces one trajectory CSV and one summary JSON; an index file
lists all outputs.  Per-run failures are recorded in their summary and do
not abort the batch.
"""

from __future__ import annotations

import json
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np
import scipy.linalg

from .baselines import GdaConfig, McnConfig, run_gda, run_mcn
from .benchmarks import (
    DuFunctionParams,
    build_du_minimax,
    build_quadratic_minimax,
    du_default_x0,
    du_stationary_catalog,
    du_value_grad_hess,
)
from .minimax_tr import SspCertificate, TrConfig, run_minimax_tr
from .problem import (
    MinimaxProblem,
    derive_constants,
    finite_difference_check,
    schur_hessian,
)
from .records import IterationRecord, write_trajectory_csv
from .trace import StepClass, TraceConfig, run_minimax_trace

ALGORITHMS = ("gda", "mcn", "minimax_tr", "minimax_trace")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def _require(cfg: dict, key: str, ctx: str) -> Any:
    if key not in cfg:
        raise ConfigError(f"{ctx}: missing required field '{key}'")
    return cfg[key]


def load_config(source: str | Path | dict) -> dict:
    if isinstance(source, dict):
        cfg = source
    else:
        with Path(source).open() as fh:
            cfg = json.load(fh)
    problem = _require(cfg, "problem", "config")
    kind = _require(problem, "kind", "config.problem")
    if kind not in ("du", "quadratic"):
        raise ConfigError(f"config.problem.kind: unknown kind {kind!r}")
    algorithms = _require(cfg, "algorithms", "config")
    if not isinstance(algorithms, list) or not algorithms:
        raise ConfigError("config.algorithms: at least one algorithm entry required")
    for idx, entry in enumerate(algorithms):
        algo = _require(entry, "algorithm", f"config.algorithms[{idx}]")
        if algo not in ALGORITHMS:
            raise ConfigError(
                f"config.algorithms[{idx}].algorithm: unknown algorithm {algo!r}"
            )
    cfg.setdefault("run", {})
    return cfg


def build_problem(cfg: dict) -> tuple[MinimaxProblem, np.ndarray]:
    """Build the configured problem and its default x0."""
    pcfg = cfg["problem"]
    params = dict(pcfg.get("params", {}))
    overrides = pcfg.get("constants")
    if pcfg["kind"] == "du":
        du = DuFunctionParams(n=int(params.get("n", 10)),
                              L=float(params.get("L", 2.0)),
                              gamma=float(params.get("gamma", 1.0)))
        constants = None
        if overrides:
            constants = derive_constants(
                ell=float(_require(overrides, "ell", "config.problem.constants")),
                mu=float(overrides.get("mu", 1.0)),
                rho=float(_require(overrides, "rho", "config.problem.constants")),
                P_lower=float(overrides.get("P_lower", -du.n * du.nu)),
            )
        problem = build_du_minimax(du, dim_y=int(params.get("dim_y", 5)),
                                   constants=constants)
        x0 = np.asarray(params.get("x0", du_default_x0(du)), dtype=float)
        return problem, x0
    # quadratic
    problem = build_quadratic_minimax(
        seed=int(params.get("seed", 0)),
        n=int(params.get("n", 4)),
        m=int(params.get("m", 3)),
        mu=float(params.get("mu", 1.0)),
        coupling_scale=float(params.get("coupling_scale", 1.0)),
        rho=float(params.get("rho", 1.0)),
    )
    if overrides:
        problem = MinimaxProblem(
            dim_x=problem.dim_x, dim_y=problem.dim_y, value=problem.value,
            grad_x=problem.grad_x, grad_y=problem.grad_y,
            hess_xx=problem.hess_xx, hess_xy=problem.hess_xy,
            hess_yy=problem.hess_yy,
            constants=derive_constants(
                ell=float(overrides.get("ell", problem.constants.ell)),
                mu=float(overrides.get("mu", problem.constants.mu)),
                rho=float(overrides.get("rho", problem.constants.rho)),
                P_lower=float(overrides.get("P_lower", problem.constants.P_lower)),
            ),
            analytic=problem.analytic,
        )
    if "x0" in params:
        x0 = np.asarray(params["x0"], dtype=float)
    else:
        x0 = np.random.default_rng(int(params.get("seed", 0)) + 1).normal(
            size=problem.dim_x)
    return problem, x0


_CONFIG_FIELDS = {
    "gda": GdaConfig,
    "mcn": McnConfig,
    "minimax_tr": TrConfig,
    "minimax_trace": TraceConfig,
}


def _build_algo_config(algo: str, settings: dict, run_cfg: dict):
    cls = _CONFIG_FIELDS[algo]
    kwargs = dict(settings)
    if "max_time_s" in run_cfg and "max_time_s" not in kwargs:
        kwargs["max_time_s"] = run_cfg["max_time_s"]
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"settings for {algo}: {exc}") from exc


@dataclass
class RunOutcome:
    name: str
    algorithm: str
    records: list[IterationRecord]
    summary: dict
    error: Optional[str] = None


def _certificate_summary(problem: MinimaxProblem,
                         cert: Optional[SspCertificate]) -> Optional[dict]:
    if cert is None:
        return None
    out: dict[str, Any] = {
        "terminated": bool(cert.terminated_by_dual),
        "grad_norm_bound": cert.grad_norm_bound,
        "hessian_eigen_bound": cert.hessian_eigen_bound,
        "outer_iterations": cert.outer_iterations,
        "total_inner_iterations": cert.total_inner_iterations,
    }
    if problem.analytic is not None:
        gp = problem.analytic.grad_P(cert.x)
        hp = problem.analytic.hess_P(cert.x)
        grad_norm = float(np.linalg.norm(gp))
        eig_min = float(scipy.linalg.eigvalsh(hp)[0])
        out["analytic_grad_norm"] = grad_norm
        out["analytic_hess_eig_min"] = eig_min
        out["grad_bound_holds"] = bool(grad_norm <= cert.grad_norm_bound)
        out["hess_bound_holds"] = bool(eig_min >= cert.hessian_eigen_bound)
    return out


def run_single(problem: MinimaxProblem, x0: np.ndarray, entry: dict,
               run_cfg: dict, y0: np.ndarray) -> RunOutcome:
    algo = entry["algorithm"]
    name = entry.get("name", algo)
    settings = dict(entry.get("settings", {}))
    start = time.perf_counter()
    try:
        cert: Optional[SspCertificate] = None
        counts: Optional[dict[StepClass, int]] = None
        if algo == "gda":
            config = _build_algo_config(algo, settings, run_cfg)
            records = run_gda(problem, x0, y0, config)
        elif algo == "mcn":
            config = _build_algo_config(algo, settings, run_cfg)
            cert, records = run_mcn(problem, x0, y0, config)
        elif algo == "minimax_tr":
            config = _build_algo_config(algo, settings, run_cfg)
            cert, records = run_minimax_tr(problem, x0, y0, config)
        else:
            config = _build_algo_config(algo, settings, run_cfg)
            cert, records, counts = run_minimax_trace(problem, x0, y0, config)
        elapsed = time.perf_counter() - start
        final = records[-1] if records else None
        summary = {
            "name": name,
            "algorithm": algo,
            "status": "ok",
            "wall_time_s": elapsed,
            "iterations": (final.iter + 1) if final else 0,
            "final": {
                "surrogate_P": final.surrogate_P if final else None,
                "true_P_gap": final.true_P_gap if final else None,
                "grad_norm": final.grad_norm if final else None,
            },
            "step_class_counts": {c.value: k for c, k in counts.items()} if counts else None,
            "certificate": _certificate_summary(problem, cert),
            "x_out": list(map(float, cert.x)) if cert is not None else None,
            "config_echo": {"algorithm": algo, "settings": settings,
                            "run": run_cfg},
        }
        if algo == "gda" and records:
            gaps = [r.true_P_gap for r in records if r.true_P_gap is not None]
            if len(gaps) >= 4:
                tail = np.asarray(gaps[3 * len(gaps) // 4:])
                summary["plateau"] = bool(float(np.var(tail)) < 1e-12)
        return RunOutcome(name, algo, records, summary)
    except Exception as exc:  # recorded, batch continues
        return RunOutcome(name, algo, [], {
            "name": name,
            "algorithm": algo,
            "status": "failed",
            "error": f"{type(exc).__name__}: {exc}",
            "traceback": traceback.format_exc(),
            "config_echo": {"algorithm": algo, "settings": settings,
                            "run": run_cfg},
        }, error=str(exc))


def run_experiment(config: str | Path | dict, out_dir: str | Path,
                   seed: Optional[int] = None, parallel: int = 1) -> dict:
    """Run every configured (problem, algorithm) pair and write outputs.

    Returns the index structure, which is also written to index.json.
    Independent runs may execute in parallel; all files are written from the
    calling thread after the runs complete.
    """
    cfg = load_config(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    run_cfg = dict(cfg.get("run", {}))
    if seed is not None:
        run_cfg["seed"] = seed
    base_seed = int(run_cfg.get("seed", 0))

    problem, x0 = build_problem(cfg)
    rng = np.random.default_rng(base_seed)
    y0 = rng.standard_normal(problem.dim_y)

    entries = cfg["algorithms"]
    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            outcomes = list(pool.map(
                lambda e: run_single(problem, x0, e, run_cfg, y0), entries))
    else:
        outcomes = [run_single(problem, x0, e, run_cfg, y0) for e in entries]

    index: dict[str, Any] = {"runs": [], "config": cfg}
    for outcome in outcomes:
        stem = outcome.name.replace(" ", "_")
        csv_path = out / f"{stem}.csv"
        summary_path = out / f"{stem}_summary.json"
        write_trajectory_csv(csv_path, outcome.records)
        with summary_path.open("w") as fh:
            json.dump(outcome.summary, fh, indent=2, sort_keys=True)
        index["runs"].append({
            "name": outcome.name,
            "algorithm": outcome.algorithm,
            "trajectory_csv": csv_path.name,
            "summary_json": summary_path.name,
            "status": outcome.summary["status"],
        })
    with (out / "index.json").open("w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
    return index


# ---------------------------------------------------------------------------
# problem checking / certificate re-validation
# ---------------------------------------------------------------------------

def check_problem(config: str | Path | dict, n_fd_points: int = 25,
                  seed: int = 0) -> dict:
    """Finite-difference and benchmark-structure checks for a config.

    Returns a report dict with a boolean "ok" plus per-check details.
    """
    cfg = load_config(config)
    problem, x0 = build_problem(cfg)
    rng = np.random.default_rng(seed)
    report: dict[str, Any] = {"checks": {}}

    worst: dict[str, float] = {}
    for _ in range(n_fd_points):
        if cfg["problem"]["kind"] == "du":
            params = cfg["problem"].get("params", {})
            du = DuFunctionParams(n=int(params.get("n", 10)),
                                  L=float(params.get("L", 2.0)),
                                  gamma=float(params.get("gamma", 1.0)))
            x = rng.uniform(2e-4, 6.0 * du.tau - 2e-4, size=problem.dim_x)
            # keep clear of region boundaries where g is only C^2
            for b in (du.tau, 2.0 * du.tau):
                x[np.abs(x - b) < 1e-3] += 2e-3
        else:
            x = rng.normal(size=problem.dim_x)
        y = rng.normal(size=problem.dim_y)
        errs = finite_difference_check(problem, x, y)
        for key, val in errs.items():
            worst[key] = max(worst.get(key, 0.0), val)
    fd_ok = all(v <= 1e-5 for v in worst.values())
    report["checks"]["finite_difference"] = {"ok": fd_ok, "max_errors": worst}

    if cfg["problem"]["kind"] == "du":
        params = cfg["problem"].get("params", {})
        du = DuFunctionParams(n=int(params.get("n", 10)),
                              L=float(params.get("L", 2.0)),
                              gamma=float(params.get("gamma", 1.0)))
        grads = [float(np.linalg.norm(du_value_grad_hess(p, du)[1]))
                 for p in du_stationary_catalog(du)]
        catalog_ok = all(gn <= 1e-8 for gn in grads)
        report["checks"]["stationary_catalog"] = {
            "ok": catalog_ok, "grad_norms": grads,
        }
    else:
        x = rng.normal(size=problem.dim_x)
        y = rng.normal(size=problem.dim_y)
        H = schur_hessian(problem, x, y)
        Q = problem.analytic.hess_P(x)
        err = float(np.max(np.abs(H - Q)))
        report["checks"]["schur_vs_closed_form"] = {"ok": err <= 1e-10,
                                                    "max_abs_error": err}

    report["ok"] = all(c["ok"] for c in report["checks"].values())
    return report


def certify_run(trajectory_csv: str | Path, config: str | Path | dict,
                summary_json: Optional[str | Path] = None) -> dict:
    """Re-validate the certificate of a recorded run.

    Reads the sibling <stem>_summary.json (or an explicit path), rebuilds
    the problem from the config, and re-evaluates the analytic gradient and
    Hessian bounds at the recorded output point.  Also re-checks trajectory
    invariants (strictly increasing iter, step_norm <= delta).
    """
    from .records import read_trajectory_csv

    csv_path = Path(trajectory_csv)
    if summary_json is None:
        summary_json = csv_path.with_name(csv_path.stem + "_summary.json")
    with Path(summary_json).open() as fh:
        summary = json.load(fh)
    cfg = load_config(config)
    problem, _ = build_problem(cfg)

    report: dict[str, Any] = {"trajectory": str(csv_path), "checks": {}}
    records = read_trajectory_csv(csv_path)
    iters = [r.iter for r in records]
    report["checks"]["iter_strictly_increasing"] = {
        "ok": all(b > a for a, b in zip(iters, iters[1:])),
    }
    step_ok = all(
        r.step_norm <= r.delta * (1.0 + 1e-9)
        for r in records if r.step_norm is not None and r.delta is not None
    )
    report["checks"]["step_within_radius"] = {"ok": step_ok}

    x_out = summary.get("x_out")
    cert = summary.get("certificate")
    if x_out is not None and cert is not None and problem.analytic is not None:
        x = np.asarray(x_out, dtype=float)
        grad_norm = float(np.linalg.norm(problem.analytic.grad_P(x)))
        eig_min = float(scipy.linalg.eigvalsh(problem.analytic.hess_P(x))[0])
        report["checks"]["certificate"] = {
            "ok": (not cert["terminated"]) or (
                grad_norm <= cert["grad_norm_bound"]
                and eig_min >= cert["hessian_eigen_bound"]
            ),
            "analytic_grad_norm": grad_norm,
            "analytic_hess_eig_min": eig_min,
            "claimed_grad_bound": cert["grad_norm_bound"],
            "claimed_hess_bound": cert["hessian_eigen_bound"],
        }
    report["ok"] = all(c["ok"] for c in report["checks"].values())
    return report
