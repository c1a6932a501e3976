"""Run orchestration and artifact persistence.

One run writes `<output_dir>/<run-id>/{config, trajectory.csv, snapshots/,
events.json, oracles/}` with the run id derived from a content hash of the
canonical config, so identical configs land in identical directories with
byte-identical artifacts.  Sweeps isolate members: a failing member is
marked in the summary table and never corrupts its siblings.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from . import solver
from .config import RunConfig, serialize_config
from .initial import field_from_profile
from .mesh import build_grid, weighted_integral
from .params import ModelParameters

__all__ = [
    "RunArtifacts",
    "run_id",
    "run_single",
    "run_eps_study",
    "run_k_sweep",
    "bisect_blowup_threshold",
    "write_oracle_reports",
]


def _f(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class RunArtifacts:
    """Paths and metadata of one persisted run."""

    run_dir: Path
    config_echo: str
    trajectory_csv: Path
    snapshots: list[Path]
    events: list[solver.BlowupEvent]
    oracle_reports: list[Path]


def run_id(cfg: RunConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()[:12]


def _write_trajectory(records, path: Path) -> None:
    lines = [",".join(diag.CSV_COLUMNS)]
    for r in records:
        lines.append(",".join(_f(getattr(r, col)) for col in diag.CSV_COLUMNS))
    path.write_text("\n".join(lines) + "\n")


def _write_snapshot(path: Path, centers: np.ndarray, values: np.ndarray) -> None:
    lines = [f"{_f(x)} {_f(v)}" for x, v in zip(centers, values)]
    path.write_text("\n".join(lines) + "\n")


def _event_dicts(event: solver.BlowupEvent | None) -> list[dict]:
    if event is None:
        return []
    return [{
        "detected": event.detected,
        "t_event": event.t_event,
        "trigger": event.trigger,
        "sup_norm_at_event": event.sup_norm_at_event,
    }]


def run_single(cfg: RunConfig, runner=solver.run) -> RunArtifacts:
    """Execute one run and persist its artifact tree."""
    rid = run_id(cfg)
    run_dir = Path(cfg.output_dir) / rid
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "snapshots").mkdir(exist_ok=True)
    (run_dir / "oracles").mkdir(exist_ok=True)

    echo = serialize_config(cfg)
    (run_dir / "config").write_text(echo)

    result = runner(cfg)
    grid = build_grid(cfg.grid_cells, cfg.grading_exponent, cfg.parameters.length)

    trajectory = run_dir / "trajectory.csv"
    _write_trajectory(result.records, trajectory)

    snap_paths = []
    for step, _t, field in result.snapshots:
        path = run_dir / "snapshots" / f"{step:08d}.txt"
        _write_snapshot(path, grid.centers, field.values)
        snap_paths.append(path)

    events = _event_dicts(result.event)
    (run_dir / "events.json").write_text(json.dumps(events, indent=2, sort_keys=True) + "\n")

    return RunArtifacts(
        run_dir=run_dir,
        config_echo=echo,
        trajectory_csv=trajectory,
        snapshots=snap_paths,
        events=[result.event] if result.event is not None else [],
        oracle_reports=[],
    )


def _map_members(worker, subs, jobs: int):
    """Apply `worker` to the member configs, optionally across processes.

    Members share no mutable state (each writes only its own run directory),
    so parallel execution preserves the artifact tree; result order follows
    the input order either way.
    """
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, subs))
    return [worker(sub) for sub in subs]


def _eps_member(sub: RunConfig):
    eps = sub.parameters.epsilon
    try:
        art = run_single(sub)
    except Exception as exc:  # member isolation
        return {"epsilon": eps, "status": f"failed: {exc}"}, None
    grid = build_grid(sub.grid_cells, sub.grading_exponent, sub.parameters.length)
    final = _load_snapshot_values(art.snapshots[-1])
    recs = _load_trajectory(art.trajectory_csv)
    mass_limit = weighted_integral(final, grid, sub.parameters.beta, shift=0.0)
    drift = abs(recs["mass"][-1] - recs["mass"][0]) / abs(recs["mass"][0])
    row = {
        "epsilon": eps,
        "status": "event" if art.events else "completed",
        "mass": recs["mass"][-1],
        "energy": recs["energy"][-1],
        "entropy": recs["entropy"][-1],
        "moment_y": recs["moment_y"][-1],
        "sup_norm": recs["sup_norm"][-1],
        "mass_limit": mass_limit,
        "mass_drift_rel": drift,
    }
    return row, art


def run_eps_study(cfg: RunConfig, eps_list=None, jobs: int = 1) -> tuple[list[RunArtifacts], Path]:
    """Run the same experiment across regularization strengths.

    Emits a cross-epsilon comparison CSV of final-time functionals next to
    the member run directories.  The `mass_limit` column evaluates the final
    field against the unshifted x^beta weight (the limit-problem mass), and
    `mass_drift_rel` is each member's own conservation defect.
    """
    eps_values = tuple(eps_list) if eps_list is not None else cfg.eps_list
    study_dir = Path(cfg.output_dir) / f"eps_study_{run_id(cfg)}"
    study_dir.mkdir(parents=True, exist_ok=True)
    subs = [
        replace(cfg.with_epsilon(eps), output_dir=str(study_dir), mode="single")
        for eps in eps_values
    ]
    results = _map_members(_eps_member, subs, jobs)
    members = [art for _, art in results if art is not None]
    rows = [row for row, _ in results]

    comparison = study_dir / "comparison.csv"
    fields = ["epsilon", "status", "mass", "energy", "entropy", "moment_y",
              "sup_norm", "mass_limit", "mass_drift_rel"]
    with comparison.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (_f(v) if isinstance(v, float) else v) for k, v in row.items()})
    return members, comparison


def _sweep_member(sub: RunConfig):
    grid = build_grid(sub.grid_cells, sub.grading_exponent, sub.parameters.length)
    u0 = field_from_profile(sub.initial, grid, sub.parameters)
    moment0 = weighted_integral(
        u0, grid, sub.parameters.beta - sub.parameters.kappa, shift=0.0
    )
    try:
        art = run_single(sub)
    except Exception as exc:
        return (sub.initial.k, moment0, f"failed: {exc}"), None
    status = _f(art.events[0].t_event) if art.events else "none"
    return (sub.initial.k, moment0, status), art


def run_k_sweep(cfg: RunConfig, k_list=None, jobs: int = 1) -> tuple[list[RunArtifacts], Path]:
    """Run the concentration family across k and tabulate blow-up behaviour."""
    ks = tuple(k_list) if k_list is not None else cfg.k_list
    sweep_dir = Path(cfg.output_dir) / f"k_sweep_{run_id(cfg)}"
    sweep_dir.mkdir(parents=True, exist_ok=True)
    subs = [replace(cfg.with_k(k), output_dir=str(sweep_dir), mode="single") for k in ks]
    results = _map_members(_sweep_member, subs, jobs)
    members = [art for _, art in results if art is not None]

    table = sweep_dir / "sweep.csv"
    with table.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "initial_moment", "blowup_time"])
        for (k, moment0, status), _ in results:
            writer.writerow([k, _f(moment0), status])
    return members, table


def bisect_blowup_threshold(
    cfg: RunConfig,
    k_low: int | None = None,
    k_high: int | None = None,
    runner=solver.run,
) -> dict:
    """Integer bisection for the least k whose run blows up within T_end.

    Requires a valid bracket: no event at k_low, an event at k_high.  The
    report carries the empirical threshold moment (the desk-scale stand-in
    for the non-constructive mass threshold) together with the mass bound B
    and the log-integrability D of the threshold member.
    """
    lo = cfg.k_low if k_low is None else int(k_low)
    hi = cfg.k_high if k_high is None else int(k_high)
    if not 0 < lo < hi:
        raise ValueError(f"need 0 < k_low < k_high, got {lo}, {hi}")
    bisect_dir = Path(cfg.output_dir) / f"bisect_{run_id(cfg)}"
    bisect_dir.mkdir(parents=True, exist_ok=True)

    probes: dict[int, bool] = {}

    def blows_up(k: int) -> bool:
        if k not in probes:
            sub = replace(cfg.with_k(k), output_dir=str(bisect_dir), mode="single")
            result = runner(sub)
            probes[k] = result.event is not None
        return probes[k]

    if blows_up(lo):
        raise ValueError(f"bracket invalid: run at k_low={lo} already blows up")
    if not blows_up(hi):
        raise ValueError(f"bracket invalid: run at k_high={hi} does not blow up")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if blows_up(mid):
            hi = mid
        else:
            lo = mid

    grid = build_grid(cfg.grid_cells, cfg.grading_exponent, cfg.parameters.length)
    star = replace(cfg.with_k(hi), mode="single")
    u_star = field_from_profile(star.initial, grid, star.parameters)
    p = star.parameters
    m_est = weighted_integral(u_star, grid, p.beta - p.kappa, shift=0.0)
    mass_b = weighted_integral(u_star, grid, p.beta, shift=0.0)
    vals = u_star.values
    if np.any(vals <= 0.0):
        log_d = math.inf
    else:
        log_d = weighted_integral(np.maximum(0.0, -np.log(vals)), grid, p.beta, shift=0.0)

    report = {
        "k_star": hi,
        "k_below": lo,
        "moment_threshold": m_est,
        "mass_B": mass_b,
        "log_integral_D": log_d,
        "probes": {str(k): bool(v) for k, v in sorted(probes.items())},
    }
    path = bisect_dir / "threshold.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")

    table = bisect_dir / "threshold.csv"
    with table.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k_star", "moment_threshold", "mass_B", "log_integral_D"])
        writer.writerow([hi, _f(m_est), _f(mass_b), _f(log_d)])
    report["table"] = table
    report["json"] = path
    return report


def write_oracle_reports(
    params: ModelParameters,
    grid_cells: int,
    grading: float,
    count: int,
    seed: int,
    out_dir,
    eta: float = 1.0,
    p_exponent: float = 2.0,
) -> list[Path]:
    """Fuzz the interpolation inequalities; one CSV per inequality.

    Every row holds both sides and the constant the inequality would need
    for that corpus member.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = build_grid(grid_cells, grading, params.length)
    corpus = diag.random_corpus(grid, count, seed=seed)

    paths = []
    specs = [
        ("pointwise_mass_bound.csv", ["index", "x0", "value", "bound", "ok"],
         lambda i, u, du: _row99(i, u, params, grid)),
        ("shifted_moment.csv", ["index", "lhs", "mass", "grad_term", "ratio", "ok"],
         lambda i, u, du: _row50(i, u, du, params, grid)),
        ("degenerate_weight.csv", ["index", "lhs", "grad_term", "mass", "needed_c", "ok"],
         lambda i, u, du: _row20(i, u, du, params, grid, eta)),
        ("subinterval_lp.csv", ["index", "lhs", "term1", "term2", "needed_c", "ok"],
         lambda i, u, du: _row51(i, u, du, params, grid, p_exponent)),
    ]
    for name, header, rowfn in specs:
        path = out / name
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for i, (u, du) in enumerate(corpus):
                writer.writerow(rowfn(i, u, du))
        paths.append(path)
    return paths


def _row99(i, u, params, grid):
    r = diag.oracle_lemma99(u, params.beta, grid)
    return [i, _f(r["x0"]), _f(r["value"]), _f(r["bound"]), r["ok"]]


def _row50(i, u, du, params, grid):
    r = diag.oracle_lemma50(u, params, grid, du=du)
    return [i, _f(r["lhs"]), _f(r["mass"]), _f(r["grad_term"]), _f(r["ratio"]), r["ok"]]


def _row20(i, u, du, params, grid, eta):
    r = diag.oracle_lemma20(u, params, eta, grid, du=du)
    return [i, _f(r["lhs"]), _f(r["grad_term"]), _f(r["mass"]), _f(r["needed_c"]), r["ok"]]


def _row51(i, u, du, params, grid, p_exponent):
    r = diag.oracle_lemma51(u, params.n, p_exponent, grid, du=du)
    return [i, _f(r["lhs"]), _f(r["term1"]), _f(r["term2"]), _f(r["needed_c"]), r["ok"]]


def _load_trajectory(path: Path) -> dict[str, np.ndarray]:
    with Path(path).open() as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    return {col: np.array([float(r[col]) for r in rows]) for col in reader.fieldnames}


def _load_snapshot_values(path: Path) -> np.ndarray:
    data = np.loadtxt(path)
    return data[:, 1]
