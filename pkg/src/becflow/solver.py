"""Mass-conservative implicit time stepping with blow-up event detection.

One step solves u_new - dt * rhs(u_new) = u_old by damped Newton with a
finite-difference banded Jacobian (bandwidth 5 from the fourth-order
stencil).  The update is finalized in flux form, u_new = u_old + dt*rhs, so
the weighted mass sum telescopes to machine precision regardless of the
Newton tolerance.  Step rejection never mutates state; the driver halves dt
on rejection and declares a blow-up event when the solution norm explodes,
dt underflows, or Newton diverges at the minimum step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_banded

from .diagnostics import DiagnosticsRecord, record
from .initial import field_from_profile
from .mesh import DiffOps, Field, Grid, build_grid, diff_ops
from .params import ModelParameters
from .weights import WeightProfiles

__all__ = [
    "State",
    "StepOutcome",
    "BlowupEvent",
    "RunResult",
    "Discretization",
    "flux_J",
    "rhs",
    "implicit_step",
    "run",
]

BANDWIDTH = 2  # cells each side coupled through the fourth-order flux stencil
MAX_NEWTON_ITERATIONS = 30
LINE_SEARCH_HALVINGS = 8
DT_GROWTH = 1.2


def flux_J(u, params: ModelParameters, profiles: WeightProfiles, ops: DiffOps) -> np.ndarray:
    """Per-cell flux J = -g u^n u_xx + 2 g u^(n-1) u_x^2.

    Constants carry zero flux exactly (the difference-form stencils
    annihilate them in floating point).
    """
    vals = u.values if isinstance(u, Field) else np.asarray(u, dtype=float)
    g = profiles.g_centers
    d1 = ops.d1(vals)
    d2 = ops.d2(vals)
    n = params.n
    return -g * vals ** n * d2 + 2.0 * g * vals ** (n - 1.0) * d1 ** 2


def rhs(u, params: ModelParameters, profiles: WeightProfiles, ops: DiffOps, grid: Grid) -> np.ndarray:
    """Finite-volume right-hand side (x+eps)^-beta (J)_xx.

    The outer second derivative is realized as a difference of face
    gradients of J, with J_x = 0 imposed exactly at the two boundary faces;
    the weighted sum (x+eps)^beta * rhs * dx therefore telescopes to zero.
    """
    vals = u.values if isinstance(u, Field) else np.asarray(u, dtype=float)
    flux = flux_J(vals, params, profiles, ops)
    jx = np.zeros(grid.n_cells + 1)
    jx[1:-1] = ops.face_gradient(flux)
    return (jx[1:] - jx[:-1]) / ((grid.centers + params.epsilon) ** params.beta * grid.widths)


@dataclass(frozen=True)
class State:
    """Solution field plus stepping bookkeeping."""

    u: Field
    t: float
    dt: float
    step_count: int = 0


@dataclass(frozen=True)
class StepOutcome:
    accepted: bool
    newton_iterations: int
    residual: float
    dt_next: float
    reason: str = ""  # on rejection: "newton_divergence" or "positivity"


@dataclass(frozen=True)
class BlowupEvent:
    detected: bool
    t_event: float
    trigger: str  # supnorm_exceeded | dt_underflow | newton_divergence
    sup_norm_at_event: float


@dataclass
class RunResult:
    records: list[DiagnosticsRecord]
    snapshots: list[tuple[int, float, Field]]  # (step index, time, field)
    event: BlowupEvent | None
    final_state: State


class Discretization:
    """Grid, weights, operators, and the nonlinear residual in one bundle."""

    def __init__(self, grid: Grid, params: ModelParameters):
        if not math.isclose(grid.length, params.length, rel_tol=1e-12):
            raise ValueError("grid length does not match the model parameters")
        if params.epsilon <= 0.0:
            raise ValueError("time stepping needs epsilon > 0 (the regularized problem)")
        self.grid = grid
        self.params = params
        self.profiles = WeightProfiles(grid, params.epsilon, params.alpha)
        self.ops = diff_ops(grid, bc="mirror")
        self.mass_weights = (grid.centers + params.epsilon) ** params.beta * grid.widths

    def rhs(self, vals: np.ndarray) -> np.ndarray:
        return rhs(vals, self.params, self.profiles, self.ops, self.grid)

    def mass(self, vals: np.ndarray) -> float:
        return float(np.dot(self.mass_weights, vals))

    def residual(self, v: np.ndarray, u_old: np.ndarray, dt: float,
                 theta: float = 1.0, rhs_old: np.ndarray | None = None) -> np.ndarray:
        """Theta-scheme residual: v - u_old - dt*[theta*rhs(v) + (1-theta)*rhs_old].

        theta = 1 is implicit Euler, theta = 1/2 the trapezoidal rule.
        """
        with np.errstate(invalid="ignore", over="ignore"):
            out = v - u_old - dt * theta * self.rhs(v)
        if theta != 1.0:
            out -= dt * (1.0 - theta) * rhs_old
        return out


def _banded_jacobian(disc: Discretization, v: np.ndarray, u_old: np.ndarray,
                     dt: float, theta: float, rhs_old, base: np.ndarray) -> np.ndarray:
    """Finite-difference Jacobian in solve_banded layout via 5-coloring."""
    n = v.size
    stride = 2 * BANDWIDTH + 1
    ab = np.zeros((stride, n))
    scale = math.sqrt(np.finfo(float).eps)
    for color in range(stride):
        idx = np.arange(color, n, stride)
        pert = v.copy()
        pert[idx] += scale * (1.0 + np.abs(v[idx]))
        h = pert[idx] - v[idx]  # exactly representable increment
        df = disc.residual(pert, u_old, dt, theta, rhs_old) - base
        for off in range(-BANDWIDTH, BANDWIDTH + 1):
            rows = idx + off  # equation index i = j + off for perturbed column j
            good = (rows >= 0) & (rows < n)
            ab[BANDWIDTH + off, idx[good]] = df[rows[good]] / h[good]
    return ab


def implicit_step(
    state: State,
    dt: float,
    disc: Discretization,
    newton_coeff: float = 1e-10,
    positivity_floor: float = 0.0,
    max_iterations: int = MAX_NEWTON_ITERATIONS,
    scheme: str = "euler",
) -> tuple[StepOutcome, State]:
    """One damped-Newton implicit step; rejection returns state unchanged.

    scheme "euler" is backward Euler (the robust default near blow-up);
    "trapezoid" is the order-2 theta = 1/2 variant.  Accepts iff the residual
    max-norm drops below newton_coeff*(1 + sup|u|) and the finalized update
    stays at or above the positivity floor.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if scheme not in ("euler", "trapezoid"):
        raise ValueError(f"unknown scheme {scheme!r}")
    theta = 1.0 if scheme == "euler" else 0.5
    u_old = state.u.values
    rhs_old = None if theta == 1.0 else disc.rhs(u_old)
    tol = newton_coeff * (1.0 + float(np.max(np.abs(u_old))))
    v = u_old.copy()
    f = disc.residual(v, u_old, dt, theta, rhs_old)
    norm = float(np.max(np.abs(f)))
    iterations = 0
    converged = norm <= tol and np.all(np.isfinite(f))
    while not converged and iterations < max_iterations:
        ab = _banded_jacobian(disc, v, u_old, dt, theta, rhs_old, f)
        try:
            delta = solve_banded((BANDWIDTH, BANDWIDTH), ab, -f)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(delta)):
            break
        step = 1.0
        improved = False
        for _ in range(LINE_SEARCH_HALVINGS):
            v_try = v + step * delta
            f_try = disc.residual(v_try, u_old, dt, theta, rhs_old)
            if np.all(np.isfinite(f_try)):
                norm_try = float(np.max(np.abs(f_try)))
                if norm_try <= (1.0 - 1e-4 * step) * norm:
                    v, f, norm = v_try, f_try, norm_try
                    improved = True
                    break
            step *= 0.5
        iterations += 1
        if not improved:
            break
        converged = norm <= tol

    if not converged:
        outcome = StepOutcome(False, iterations, norm, dt / 2.0, reason="newton_divergence")
        return outcome, state

    # finalize in flux form: exact telescoping of the weighted mass
    update = theta * disc.rhs(v)
    if rhs_old is not None:
        update = update + (1.0 - theta) * rhs_old
    u_new = u_old + dt * update
    if not np.all(np.isfinite(u_new)) or np.any(u_new < positivity_floor):
        outcome = StepOutcome(False, iterations, norm, dt / 2.0, reason="positivity")
        return outcome, state

    new_state = State(
        u=Field(u_new, time=state.t + dt),
        t=state.t + dt,
        dt=dt,
        step_count=state.step_count + 1,
    )
    return StepOutcome(True, iterations, norm, dt * DT_GROWTH), new_state


def run(config) -> RunResult:
    """Advance a configured run to T_end or to a blow-up event.

    Step-doubling adaptivity: accepted steps grow dt by 1.2 (capped at
    dt_max), rejections halve it.  Diagnostics are sampled every
    sample_interval time units (every accepted step if the interval is
    nonpositive), plus the initial and final states.  Deterministic for a
    fixed config.
    """
    params = config.parameters
    grid = build_grid(config.grid_cells, config.grading_exponent, params.length)
    disc = Discretization(grid, params)
    u0 = field_from_profile(config.initial, grid, params)
    sup0 = float(np.max(np.abs(u0.values)))

    floor = config.positivity_floor * sup0
    sup_threshold = config.supnorm_threshold
    if sup_threshold is None:
        sup_threshold = 1e4 * sup0
    u_tau = 10.0 * floor

    t_end = config.t_end
    dt_min = config.dt_min
    dt_max = config.dt_max
    interval = config.sample_interval
    max_steps = config.max_steps

    state = State(u=Field(u0.values.copy(), time=0.0), t=0.0, dt=config.dt_init)

    def sample(st: State, dt_val: float) -> DiagnosticsRecord:
        return record(st.u, params, disc.profiles, grid, disc.ops, dt=dt_val, u_tau=u_tau)

    records = [sample(state, config.dt_init)]
    snapshots = [(0, 0.0, state.u.copy())]
    recorded_step = 0
    next_sample = interval if interval > 0.0 else 0.0
    event: BlowupEvent | None = None

    while state.t < t_end * (1.0 - 1e-14):
        if max_steps is not None and state.step_count >= max_steps:
            break
        dt_try = min(state.dt, t_end - state.t)
        outcome, new_state = implicit_step(
            state, dt_try, disc,
            newton_coeff=config.newton_tolerance,
            positivity_floor=floor,
            scheme=config.time_scheme,
        )
        if outcome.accepted:
            state = replace(new_state, dt=min(outcome.dt_next, dt_max))
            sup = float(np.max(np.abs(state.u.values)))
            hit_threshold = sup > sup_threshold
            due = interval <= 0.0 or state.t >= next_sample * (1.0 - 1e-12)
            if due or hit_threshold:
                records.append(sample(state, dt_try))
                snapshots.append((state.step_count, state.t, state.u.copy()))
                recorded_step = state.step_count
                while interval > 0.0 and next_sample <= state.t * (1.0 + 1e-12):
                    next_sample += interval
            if hit_threshold:
                event = BlowupEvent(True, state.t, "supnorm_exceeded", sup)
                break
        else:
            half = dt_try / 2.0
            sup = float(np.max(np.abs(state.u.values)))
            if outcome.reason == "newton_divergence" and dt_try <= dt_min:
                event = BlowupEvent(True, state.t, "newton_divergence", sup)
                break
            if half < dt_min:
                event = BlowupEvent(True, state.t, "dt_underflow", sup)
                break
            state = replace(state, dt=half)

    if state.step_count != recorded_step:
        records.append(sample(state, state.dt))
        snapshots.append((state.step_count, state.t, state.u.copy()))
    return RunResult(records=records, snapshots=snapshots, event=event, final_state=state)
