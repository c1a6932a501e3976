"""Functionals, the blow-up comparison ODE, and inequality oracles.

The simulator tracks four functionals of the solution: the conserved
weighted mass, the weighted energy, the logarithmic entropy (nonincreasing
along the flow), and the shifted moment y whose super-linear growth is the
blow-up mechanism.  This module also numerically probes the weighted
interpolation inequalities that the analysis rests on: each oracle evaluates
both sides on arbitrary nonnegative samples and reports the constant the
inequality would need.  The inequalities are theorems, so a violation of the
unconditional one flags a quadrature bug, and the needed constants of the
conditional ones must stay bounded over a fuzz corpus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mesh import DiffOps, Field, Grid, weighted_integral
from .params import ModelParameters
from .weights import WeightProfiles

__all__ = [
    "DiagnosticsRecord",
    "GronwallInputs",
    "MomentMonitorReport",
    "record",
    "gronwall_bound",
    "gronwall_ode_oracle",
    "moment_inequality_monitor",
    "oracle_lemma99",
    "oracle_lemma50",
    "oracle_lemma20",
    "oracle_lemma51",
    "random_corpus",
]

POSITIVITY_FLOOR_REL = 1e-12  # mirrors the solver default
CSV_COLUMNS = ("t", "dt", "mass", "energy", "entropy", "entropy_production",
               "moment_y", "sup_norm")


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One per-time sample of the tracked functionals."""

    t: float
    dt: float
    mass: float
    energy: float
    entropy: float
    entropy_production: float
    moment_y: float
    sup_norm: float


def record(
    u: Field,
    params: ModelParameters,
    profiles: WeightProfiles,
    grid: Grid,
    ops: DiffOps,
    dt: float = math.nan,
    u_tau: float | None = None,
) -> DiagnosticsRecord:
    """Assemble all functionals for one field.

    mass and energy carry the regularized weights (x+eps)^beta and
    (x+eps)^(beta+1) (the quantities the scheme conserves); the moment uses
    the unshifted x^(beta-kappa).  Entropy is reported as +inf whenever a
    cell sits at or below zero, so blow-up-adjacent records are visibly
    degenerate.  The entropy-production indicator cuts at u > u_tau
    (default 10x the relative positivity floor) because u^(n-4) diverges at
    vanishing u.
    """
    vals = u.values
    eps = params.epsilon
    mass = weighted_integral(vals, grid, params.beta, shift=eps)
    energy = weighted_integral(vals, grid, params.beta + 1.0, shift=eps)
    moment_y = weighted_integral(vals, grid, params.beta - params.kappa, shift=0.0)
    sup = float(np.max(np.abs(vals)))
    if u_tau is None:
        u_tau = 10.0 * POSITIVITY_FLOOR_REL * sup

    if np.any(vals <= 0.0):
        entropy = math.inf
    else:
        entropy = -weighted_integral(np.log(vals), grid, params.beta, shift=eps)

    d1 = ops.d1(vals)
    d2 = ops.d2(vals)
    core = vals * d2 - 2.0 * d1 ** 2
    active = vals > u_tau
    integrand = np.where(active, profiles.g_centers * _safe_pow(vals, params.n - 4.0, active) * core ** 2, 0.0)
    production = float(np.dot(integrand, grid.widths))

    return DiagnosticsRecord(
        t=u.time, dt=dt, mass=mass, energy=energy, entropy=entropy,
        entropy_production=production, moment_y=moment_y, sup_norm=sup,
    )


def _safe_pow(vals: np.ndarray, exponent: float, active: np.ndarray) -> np.ndarray:
    """vals**exponent on the active set, zero elsewhere (avoids 0**negative)."""
    out = np.zeros_like(vals)
    out[active] = vals[active] ** exponent
    return out


# ---------------------------------------------------------------------------
# nonlinear Gronwall comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GronwallInputs:
    """Hypotheses of the nonlinear Gronwall comparison: a, b > 0, d >= 0, m > 1."""

    a: float
    b: float
    d: float
    m: float

    def __post_init__(self):
        if not (self.a > 0.0 and self.b > 0.0 and self.d >= 0.0 and self.m > 1.0):
            raise ValueError(f"need a, b > 0, d >= 0, m > 1, got {self}")


def gronwall_bound(g: GronwallInputs) -> float:
    """Latest time a function with y >= a + b*int (y-d)_+^m can exist.

    Returns 2^m / ((m-1) b a^(m-1)); requires a > 2d, the hypothesis under
    which the comparison solution stays above 2d and hence below y.
    """
    if not g.a > 2.0 * g.d:
        raise ValueError(f"the bound needs a > 2d, got a={g.a}, d={g.d}")
    return 2.0 ** g.m / ((g.m - 1.0) * g.b * g.a ** (g.m - 1.0))


def gronwall_ode_oracle(g: GronwallInputs, dt: float, z_max: float = 1e12) -> float:
    """Blow-up time of the comparison ODE z' = 2^-m b z^m, z(0) = a, by RK4.

    Independent of the closed form: fixed-step classical Runge-Kutta until
    the solution exceeds z_max (or overflows), returning the crossing time.
    For small dt and moderate m this matches the closed-form bound, whose
    remaining tail beyond z_max scales like (a / z_max)^(m-1).
    """
    if not g.a > 2.0 * g.d:
        raise ValueError(f"oracle needs a > 2d, got a={g.a}, d={g.d}")
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    coeff = 2.0 ** (-g.m) * g.b
    m = g.m

    def f(z: float) -> float:
        return coeff * z ** m

    z = g.a
    t = 0.0
    max_steps = 100_000_000
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_steps):
            k1 = f(z)
            k2 = f(z + 0.5 * dt * k1)
            k3 = f(z + 0.5 * dt * k2)
            k4 = f(z + dt * k3)
            z = z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += dt
            if not math.isfinite(z) or z > z_max:
                return t
    raise RuntimeError("comparison ODE did not reach z_max; dt too small or inputs too tame")


# ---------------------------------------------------------------------------
# moment-inequality structure probe
# ---------------------------------------------------------------------------


@dataclass
class MomentMonitorReport:
    """Empirical stand-ins for the moment integral inequality.

    The true constants are non-constructive, so this is a structure probe:
    a_hat is the near-origin part of the initial moment, c3b_hat a user-set
    multiple of the conserved mass, c2_hat a least-squares fit of the
    super-linear feedback, and the flags summarize the shape of y(t).
    """

    a_hat: float
    c3b_hat: float
    c2_hat: float
    offset_hat: float
    satisfied: bool
    y_monotone_final_quartile: bool
    y_convex_on_window: bool


def moment_inequality_monitor(
    records,
    u0: Field,
    grid: Grid,
    params: ModelParameters,
    fit_window: tuple[float, float] | None = None,
    c3_multiple: float = 1.0,
) -> MomentMonitorReport:
    """Fit the super-linear moment inequality along a trajectory.

    Uses the sampled moment y(t): forms the cumulative integral of
    (y - c3b)_+^(n+1) by the trapezoid rule and fits the feedback strength
    c2_hat by least squares.  `satisfied` reports whether y - y(0) dominates
    the fitted feedback up to a small offset (the analogue of the additive
    constant); it is diagnostic, not a proof.
    """
    ts = np.array([r.t for r in records], dtype=float)
    ys = np.array([r.moment_y for r in records], dtype=float)
    if fit_window is not None:
        keep = (ts >= fit_window[0]) & (ts <= fit_window[1])
        ts, ys = ts[keep], ys[keep]
    if ts.size < 10:
        raise ValueError(f"fit window holds {ts.size} samples; need at least 10")

    x_cut = grid.centers < grid.length / 4.0
    a_hat = float(
        np.dot(
            grid.centers[x_cut] ** (params.beta - params.kappa) * grid.widths[x_cut],
            u0.values[x_cut],
        )
    )
    mass0 = weighted_integral(u0, grid, params.beta, shift=0.0)
    c3b = c3_multiple * mass0

    feed = np.clip(ys - c3b, 0.0, None) ** (params.n + 1.0)
    cumint = np.concatenate([[0.0], np.cumsum(0.5 * (feed[1:] + feed[:-1]) * np.diff(ts))])
    rise = ys - ys[0]
    denom = float(np.dot(cumint, cumint))
    c2 = max(0.0, float(np.dot(cumint, rise)) / denom) if denom > 0.0 else 0.0
    resid = rise - c2 * cumint
    offset = max(0.0, -float(np.min(resid)))
    scale = max(float(np.max(np.abs(rise))), 1e-300)
    satisfied = offset <= 0.05 * scale or offset == 0.0

    q = ts >= ts[0] + 0.75 * (ts[-1] - ts[0])
    yq = ys[q]
    monotone = bool(yq.size >= 2 and np.all(np.diff(yq) >= -1e-12 * max(1.0, abs(yq[0]))))
    convex = bool(ys.size >= 3 and np.mean(np.diff(ys, 2)) >= 0.0)

    return MomentMonitorReport(
        a_hat=a_hat, c3b_hat=c3b, c2_hat=c2, offset_hat=offset,
        satisfied=satisfied, y_monotone_final_quartile=monotone,
        y_convex_on_window=convex,
    )


# ---------------------------------------------------------------------------
# interpolation-inequality oracles
# ---------------------------------------------------------------------------


def _gradient_samples(u: np.ndarray, du, grid: Grid) -> np.ndarray:
    if du is not None:
        return np.asarray(du, dtype=float)
    return DiffOps(grid).d1(u)


def oracle_lemma99(u, beta: float, grid: Grid) -> dict:
    """Pointwise-below-average bound: some x0 in (L/2, L) has u(x0) <= C * mass.

    C is the closed-form reciprocal of the weight mass of (L/2, L).  The
    bound is unconditional, so ok must be True for every nonnegative input;
    a failure indicates a quadrature defect.
    """
    vals = u.values if isinstance(u, Field) else np.asarray(u, dtype=float)
    if np.any(vals < 0.0):
        raise ValueError("oracle needs nonnegative samples")
    length = grid.length
    if beta == -1.0:
        denom = math.log(2.0)
    else:
        denom = (length ** (beta + 1.0) - (length / 2.0) ** (beta + 1.0)) / (beta + 1.0)
    c_const = 1.0 / denom
    mass = weighted_integral(vals, grid, beta, shift=0.0)
    window = (grid.centers > length / 2.0) & (grid.centers < length)
    cand = np.where(window)[0]
    best = cand[np.argmin(vals[cand])]
    ok = bool(vals[best] <= c_const * mass)
    return {
        "x0": float(grid.centers[best]),
        "value": float(vals[best]),
        "bound": float(c_const * mass),
        "ok": ok,
    }


def _check_lemma50_kappa(params: ModelParameters) -> None:
    cap = min(
        params.alpha - 3.0,
        params.beta + 1.0,
        (-params.alpha + (params.n + 1.0) * params.beta + params.n + 4.0) / params.n,
    )
    if not params.kappa < cap:
        raise ValueError(f"kappa={params.kappa} violates the admissibility cap {cap:g}")


def oracle_lemma50(u, params: ModelParameters, grid: Grid, du=None) -> dict:
    """Shifted-moment interpolation: moment <= C*(mass + gradient_term^(1/(n+1))).

    Reports the per-function needed constant (the left side over the
    unscaled right side); across a corpus these must stay bounded.
    """
    _check_lemma50_kappa(params)
    vals = u.values if isinstance(u, Field) else np.asarray(u, dtype=float)
    dvals = _gradient_samples(vals, du, grid)
    lhs = weighted_integral(vals, grid, params.beta - params.kappa, shift=0.0)
    mass = weighted_integral(vals, grid, params.beta, shift=0.0)
    pos = vals > 0.0
    grad_integrand = np.where(
        pos,
        grid.centers ** (params.alpha - params.kappa - 2.0)
        * _safe_pow(vals, params.n - 1.0, pos) * dvals ** 2,
        0.0,
    )
    grad = float(np.dot(grad_integrand, grid.widths))
    rhs_raw = mass + grad ** (1.0 / (params.n + 1.0))
    ratio = lhs / rhs_raw if rhs_raw > 0.0 else 0.0
    return {
        "lhs": lhs,
        "mass": mass,
        "grad_term": grad,
        "ratio": float(ratio),
        "ok": bool(math.isfinite(ratio)),
    }


def oracle_lemma20(u, params: ModelParameters, eta: float, grid: Grid, du=None) -> dict:
    """Degenerate-weight interpolation with a free Young parameter eta.

    Checks int x^(alpha-4) u^n <= eta * int x^alpha u^(n-4) u_x^4
    + C(eta) * mass^n, reporting the needed C(eta) per function.
    """
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    if params.n > 0 and params.beta > (params.alpha - params.n - 3.0) / params.n:
        raise ValueError("beta exceeds (alpha-n-3)/n; the inequality hypothesis fails")
    vals = u.values if isinstance(u, Field) else np.asarray(u, dtype=float)
    dvals = _gradient_samples(vals, du, grid)
    lhs = weighted_integral(
        _safe_pow(vals, params.n, vals >= 0.0), grid, params.alpha - 4.0, shift=0.0
    )
    pos = vals > 0.0
    grad_integrand = np.where(
        pos,
        grid.centers ** params.alpha * _safe_pow(vals, params.n - 4.0, pos) * dvals ** 4,
        0.0,
    )
    grad = float(np.dot(grad_integrand, grid.widths))
    mass = weighted_integral(vals, grid, params.beta, shift=0.0)
    excess = lhs - eta * grad
    if mass > 0.0:
        needed_c = max(0.0, excess) / mass ** params.n
    else:
        needed_c = 0.0 if excess <= 0.0 else math.inf
    return {
        "lhs": lhs,
        "grad_term": grad,
        "mass": mass,
        "needed_c": float(needed_c),
        "ok": bool(math.isfinite(needed_c)),
    }


def oracle_lemma51(
    u,
    n: float,
    p: float,
    grid: Grid,
    subinterval: tuple[float, float] | None = None,
    du=None,
) -> dict:
    """Gagliardo-Nirenberg-type bound for int u^p on a subinterval.

    Checks int u^p <= C * { (int u)^((n+3p)/(n+3)) (int chi u^(n-4) u_x^4)^((p-1)/(n+3))
    + (int u)^p } and reports the needed C.
    """
    if not (n > 0.0 and p > 1.0):
        raise ValueError("need n > 0 and p > 1")
    vals = u.values if isinstance(u, Field) else np.asarray(u, dtype=float)
    dvals = _gradient_samples(vals, du, grid)
    if subinterval is None:
        subinterval = (grid.length / 4.0, grid.length)
    lo, hi = subinterval
    sel = (grid.centers >= lo) & (grid.centers <= hi)
    wsel = grid.widths[sel]
    vsel = vals[sel]
    dsel = dvals[sel]
    lhs = float(np.dot(vsel ** p, wsel))
    mass = float(np.dot(vsel, wsel))
    pos = vsel > 0.0
    grad = float(np.dot(np.where(pos, _safe_pow(vsel, n - 4.0, pos) * dsel ** 4, 0.0), wsel))
    term1 = mass ** ((n + 3.0 * p) / (n + 3.0)) * grad ** ((p - 1.0) / (n + 3.0))
    term2 = mass ** p
    denom = term1 + term2
    needed_c = lhs / denom if denom > 0.0 else (0.0 if lhs == 0.0 else math.inf)
    return {
        "lhs": lhs,
        "term1": float(term1),
        "term2": float(term2),
        "needed_c": float(needed_c),
        "ok": bool(math.isfinite(needed_c)),
    }


# ---------------------------------------------------------------------------
# fuzz corpus
# ---------------------------------------------------------------------------


def random_corpus(grid: Grid, count: int, seed: int = 0):
    """Random nonnegative piecewise-C1 samples with analytic derivatives.

    Yields (values, slopes) pairs on the grid centers: a mixture of floored
    piecewise-linear interpolants, smooth bump superpositions, and constants
    (some touching zero), with exact per-sample derivative values.
    """
    rng = np.random.default_rng(seed)
    x = grid.centers
    length = grid.length
    out = []
    for _ in range(count):
        kind = rng.integers(0, 3)
        if kind == 0:  # piecewise linear through random nodes
            n_nodes = int(rng.integers(3, 9))
            xs = np.sort(rng.uniform(0.0, length, size=n_nodes))
            xs[0], xs[-1] = 0.0, length
            floor = 0.0 if rng.random() < 0.3 else rng.uniform(0.01, 0.5)
            ys = floor + rng.uniform(0.0, 2.0, size=n_nodes)
            if rng.random() < 0.25:
                ys[rng.integers(0, n_nodes)] = floor
            vals = np.interp(x, xs, ys)
            seg = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, n_nodes - 2)
            slopes = (ys[seg + 1] - ys[seg]) / (xs[seg + 1] - xs[seg])
        elif kind == 1:  # bumps on a pedestal
            base = rng.uniform(0.0, 0.5)
            vals = np.full_like(x, base)
            slopes = np.zeros_like(x)
            for _ in range(int(rng.integers(1, 4))):
                c = rng.uniform(0.15 * length, 0.85 * length)
                w = rng.uniform(0.05 * length, min(c, length - c) * 0.95)
                h = rng.uniform(0.1, 3.0)
                s = (x - c) / w
                inside = np.abs(s) < 1.0
                si = s[inside]
                bump = h * np.exp(1.0 - 1.0 / (1.0 - si ** 2))
                vals[inside] += bump
                slopes[inside] += bump * (-2.0 * si / (1.0 - si ** 2) ** 2) / w
        else:  # constant, occasionally zero
            level = 0.0 if rng.random() < 0.1 else rng.uniform(0.05, 2.0)
            vals = np.full_like(x, level)
            slopes = np.zeros_like(x)
        out.append((vals, slopes))
    return out
