"""Model parameters, the critical exponent, and admissibility checking.

The model is governed by the tuple (n, alpha, beta, gamma, kappa, L, epsilon).
Two admissibility regimes exist: "existence" (a local-in-time solution can be
constructed) and "blowup" (concentrated initial data force finite-time
blow-up).  Both are windows in parameter space with a critical nonlinearity
exponent n_star, the unique positive root of n^3 + 5 n^2 + 16 n - 40.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "ModelParameters",
    "AdmissibilityReport",
    "compute_nstar",
    "cubic_residual",
    "kappa_upper_bound",
    "check_admissibility",
]

NSTAR_TOL = 1e-14  # bisection bracket width; residual then < 1e-12


def cubic_residual(n: float) -> float:
    """Value of the critical polynomial n^3 + 5 n^2 + 16 n - 40."""
    return n ** 3 + 5.0 * n ** 2 + 16.0 * n - 40.0


_NSTAR_CACHE: float | None = None


def compute_nstar() -> float:
    """Critical exponent n_star: the unique positive root of the cubic.

    Computed by bisection on [1, 2] (the polynomial is strictly increasing
    for n > 0, and p(1) = -18 < 0 < 20 = p(2)) down to a fixed bracket width,
    so the result is deterministic across platforms.
    """
    global _NSTAR_CACHE
    if _NSTAR_CACHE is not None:
        return _NSTAR_CACHE
    lo, hi = 1.0, 2.0
    while hi - lo > NSTAR_TOL:
        mid = 0.5 * (lo + hi)
        if cubic_residual(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    _NSTAR_CACHE = 0.5 * (lo + hi)
    return _NSTAR_CACHE


def epsilon_ceiling(length: float) -> float:
    """Largest admissible regularization parameter for a domain of this length."""
    return min(1.0, math.sqrt(0.5 * length))


@dataclass(frozen=True)
class ModelParameters:
    """The tuple (n, alpha, beta, gamma, kappa, L, epsilon) governing a run.

    ``gamma`` may be None: the blow-up (nonexistence) statement does not need
    it, only the construction of a solution that then blows up does.
    ``epsilon = 0`` denotes the formal limit problem.
    """

    n: float
    alpha: float
    beta: float
    gamma: float | None = None
    kappa: float = 0.0
    length: float = 1.0
    epsilon: float = 1e-3

    def __post_init__(self):
        if not self.length > 0.0:
            raise ValueError(f"domain length must be positive, got {self.length}")
        ceil = epsilon_ceiling(self.length)
        if not (0.0 <= self.epsilon < ceil):
            raise ValueError(
                f"epsilon must lie in [0, {ceil:g}) for length {self.length:g}, "
                f"got {self.epsilon}"
            )
        if self.kappa < 0.0:
            raise ValueError(f"kappa must be nonnegative, got {self.kappa}")


@dataclass
class AdmissibilityReport:
    """Outcome of admissibility checking; never raised, always returned.

    ``violated`` lists (constraint_name, offending_value) pairs so a caller
    can print every violation at once.  ``blowup_ok`` does not imply
    ``existence_ok``; the two regimes are checked independently.
    """

    existence_ok: bool
    blowup_ok: bool
    kappa_max: float
    violated: list[tuple[str, float]] = field(default_factory=list)


def kappa_upper_bound(p: ModelParameters) -> float:
    """Least of the four admissibility caps on the moment shift kappa.

    Returns min{(alpha-3)/2, alpha-n-4, beta+1, (-alpha+(n+1)beta+n+4)/n}.
    """
    if p.n == 0.0:
        raise ValueError("kappa_upper_bound undefined for n = 0")
    return min(
        (p.alpha - 3.0) / 2.0,
        p.alpha - p.n - 4.0,
        p.beta + 1.0,
        (-p.alpha + (p.n + 1.0) * p.beta + p.n + 4.0) / p.n,
    )


def _existence_violations(p: ModelParameters) -> list[tuple[str, float]]:
    bad: list[tuple[str, float]] = []
    nstar = compute_nstar()
    if not (nstar < p.n < 3.0):
        bad.append(("n in (n*, 3)", p.n))
    if not p.alpha > 3.0:
        bad.append(("alpha > 3", p.alpha))
    if p.n > 0.0:
        beta_hi = (p.alpha - p.n - 3.0) / p.n
        if not (-1.0 < p.beta <= beta_hi):
            bad.append(("beta in (-1, (alpha-n-3)/n]", p.beta))
    else:
        bad.append(("beta window needs n > 0", p.n))
    if p.gamma is None:
        bad.append(("gamma required for existence", math.nan))
    elif not (5.0 - p.alpha + p.beta < p.gamma < 1.0):
        bad.append(("gamma in (5-alpha+beta, 1)", p.gamma))
    return bad


def _blowup_violations(p: ModelParameters) -> list[tuple[str, float]]:
    bad: list[tuple[str, float]] = []
    nstar = compute_nstar()
    if not (nstar < p.n < 3.0):
        bad.append(("n in (n*, 3)", p.n))
    if not p.alpha > p.n + 4.0:
        bad.append(("alpha > n+4", p.alpha))
    if p.n > 0.0:
        beta_lo = (p.alpha - p.n - 4.0) / (p.n + 1.0)
        beta_hi = (p.alpha - p.n - 3.0) / p.n
        if not (beta_lo < p.beta <= beta_hi):
            bad.append(("beta in ((alpha-n-4)/(n+1), (alpha-n-3)/n]", p.beta))
        kmax = kappa_upper_bound(p)
        if not (0.0 < p.kappa < kmax):
            bad.append(("kappa in (0, kappa_max)", p.kappa))
    else:
        bad.append(("blowup window needs n > 0", p.n))
    return bad


def check_admissibility(p: ModelParameters, mode: str = "existence") -> AdmissibilityReport:
    """Check every parameter constraint of the requested regime.

    ``mode`` selects which violations are reported; both ok-flags are always
    computed.  Strict inequalities are checked strictly (no epsilon slack),
    and the closed right end of the beta window is accepted.
    """
    if mode not in ("existence", "blowup"):
        raise ValueError(f"mode must be 'existence' or 'blowup', got {mode!r}")
    ex_bad = _existence_violations(p)
    bu_bad = _blowup_violations(p)
    kmax = kappa_upper_bound(p) if p.n != 0.0 else math.nan
    violated = ex_bad if mode == "existence" else bu_bad
    return AdmissibilityReport(
        existence_ok=not ex_bad,
        blowup_ok=not bu_bad,
        kappa_max=kmax,
        violated=violated,
    )
