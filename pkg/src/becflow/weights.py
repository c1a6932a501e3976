"""Regularized weight family g = z^alpha replacing the degenerate x^alpha.

z(x) = epsilon + integral of a smooth cutoff zeta that equals 1 away from
the boundary and vanishes at x = 0 and x = L.  The cutoff ramps over bands
of width epsilon^2, so g is positive, smooth, and sandwiched between
c1*(x+eps)^alpha and (x+eps)^alpha.  Vanishing of g' on the boundary is what
makes the flux gradient vanish there and hence conserves the weighted mass.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from .mesh import Grid
from .params import epsilon_ceiling

__all__ = ["zeta_eps", "z_eps", "g_eps", "WeightProfiles"]


def _ramp(t):
    """The standard C-infinity transition h(t) = q(t)/(q(t)+q(1-t)), q = exp(-1/t).

    h = 0 for t <= 0, h = 1 for t >= 1, h(1/2) = 1/2.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    out[t >= 1.0] = 1.0
    mid = (t > 0.0) & (t < 1.0)
    tm = t[mid]
    qa = np.exp(-1.0 / tm)
    qb = np.exp(-1.0 / (1.0 - tm))
    out[mid] = qa / (qa + qb)
    if out.ndim == 0:
        return float(out)
    return out


def _check_eps(epsilon: float, length: float) -> None:
    ceil = epsilon_ceiling(length)
    if not (0.0 < epsilon < ceil):
        raise ValueError(f"epsilon must lie in (0, {ceil:g}), got {epsilon}")


def zeta_eps(x, epsilon: float, length: float = 1.0):
    """Smooth cutoff: 0 at the boundary, exactly 1 on [eps^2, L - eps^2]."""
    _check_eps(epsilon, length)
    x = np.asarray(x, dtype=float)
    band = epsilon * epsilon
    left = _ramp(x / band)
    right = _ramp((length - x) / band)
    out = np.minimum(left, right)
    if out.ndim == 0:
        return float(out)
    return out


def _ramp_integral(s: float, band: float) -> float:
    """Integral of the left ramp h(y/band) over (0, s) for s in [0, band]."""
    if s <= 0.0:
        return 0.0
    if s >= band:
        # h(t) + h(1-t) = 1, so the completed ramp integrates to band/2 exactly
        return 0.5 * band
    val, _ = quad(lambda y: _ramp(y / band), 0.0, s, epsabs=1e-14, epsrel=1e-12)
    return val


def z_eps(x, epsilon: float, length: float = 1.0):
    """z(x) = epsilon + integral of zeta from 0 to x, evaluated piecewise.

    On the plateau [eps^2, L - eps^2] the integral is linear and exact; on
    the two ramp bands the remaining piece is obtained by adaptive
    quadrature of the cutoff.
    """
    _check_eps(epsilon, length)
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs).astype(float)
    band = epsilon * epsilon
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        if xi <= band:
            out[i] = epsilon + _ramp_integral(xi, band)
        elif xi <= length - band:
            out[i] = epsilon + xi - 0.5 * band
        else:
            out[i] = epsilon + length - band - _ramp_integral(length - xi, band)
    if scalar:
        return float(out[0])
    return out


def g_eps(x, epsilon: float, alpha: float, length: float = 1.0):
    """The regularized degeneracy weight g = z^alpha."""
    z = z_eps(x, epsilon, length)
    return z ** alpha


class WeightProfiles:
    """Cached weight evaluations for one (grid, epsilon, alpha) triple.

    Immutable after construction; stores z, g = z^alpha and
    g' = alpha z^(alpha-1) zeta at the cell centers and faces, plus callables
    for off-grid queries.
    """

    def __init__(self, grid: Grid, epsilon: float, alpha: float):
        _check_eps(epsilon, grid.length)
        self.grid = grid
        self.epsilon = float(epsilon)
        self.alpha = float(alpha)
        self.zeta_width = epsilon * epsilon
        self.z_centers = z_eps(grid.centers, epsilon, grid.length)
        self.z_faces = z_eps(grid.faces, epsilon, grid.length)
        self.g_centers = self.z_centers ** alpha
        self.g_faces = self.z_faces ** alpha
        zeta_c = zeta_eps(grid.centers, epsilon, grid.length)
        self.gx_centers = alpha * self.z_centers ** (alpha - 1.0) * zeta_c

    def z_at(self, x):
        return z_eps(x, self.epsilon, self.grid.length)

    def g_at(self, x):
        return g_eps(x, self.epsilon, self.alpha, self.grid.length)

    def gx_at(self, x):
        z = z_eps(x, self.epsilon, self.grid.length)
        return self.alpha * z ** (self.alpha - 1.0) * zeta_eps(x, self.epsilon, self.grid.length)
