"""Independent numerical checks based on direct integration of

    -phi'' + [c2 e^{-2wx} + c1 e^{-wx} + c0] phi = 0

(the second-order equation of the upper component). Nothing here uses the
closed-form spectrum or wavefunctions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .model import ModelParams, effective_potential, x_of_z


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 3:
            raise DomainError("a grid needs at least 3 points")
        if not self.x_min < self.x_max:
            raise DomainError("x_min must be < x_max")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


@dataclass(frozen=True)
class OdeSolution:
    """Samples of a solution; the true values are phi * exp(log_scale)."""

    x: np.ndarray
    phi: np.ndarray
    log_scale: float


@dataclass(frozen=True)
class ShootingResult:
    energies: list
    node_counts: list
    residuals: list


_BIG = 1e200


def _first_step(q: Callable, x0: float, h: float, y0: float, dy0: float, substeps: int = 32):
    """y(x0 + h) by classical RK4 with substeps, for y'' = q(x) y."""
    dt = h / substeps
    y, v, x = y0, dy0, x0
    for _ in range(substeps):
        q0, qh, q1 = q(x), q(x + dt / 2), q(x + dt)
        k1y, k1v = v, q0 * y
        k2y, k2v = v + dt / 2 * k1v, qh * (y + dt / 2 * k1y)
        k3y, k3v = v + dt / 2 * k2v, qh * (y + dt / 2 * k2y)
        k4y, k4v = v + dt * k3v, q1 * (y + dt * k3y)
        y += dt / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        v += dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        x += dt
    return y


def numerov(q: Callable, x: np.ndarray, y0: float, dy0: float):
    """Integrate y'' = q(x) y on the uniform (possibly decreasing) grid x.

    Returns (y, log_scale). Values are rescaled on overflow; the true solution
    is y * exp(log_scale).
    """
    n = len(x)
    h = float(x[1] - x[0])
    qv = np.asarray(q(x), dtype=float) * np.ones(n)
    F = (1.0 - h * h / 12.0 * qv).tolist()
    y = [0.0] * n
    y[0] = float(y0)
    y[1] = float(_first_step(lambda t: float(q(t)), float(x[0]), h, float(y0), float(dy0)))
    log_scale = 0.0
    prev, cur = y[0], y[1]
    for k in range(1, n - 1):
        nxt = ((12.0 - 10.0 * F[k]) * cur - F[k - 1] * prev) / F[k + 1]
        y[k + 1] = nxt
        prev, cur = cur, nxt
        if abs(nxt) > _BIG:
            for j in range(k + 2):
                y[j] /= _BIG
            prev /= _BIG
            cur /= _BIG
            log_scale += math.log(_BIG)
    return np.array(y), log_scale


def integrate_ode(params: ModelParams, epsilon: float, grid: Grid, init_value: float,
                  init_slope: float) -> OdeSolution:
    """Numerov integration (4th order) of the upper-component equation from x_min."""
    q = lambda t: effective_potential(params, epsilon, t)
    y, log_scale = numerov(q, grid.x, init_value, init_slope)
    return OdeSolution(grid.x, y, log_scale)


def _well_scale(params: ModelParams) -> float:
    """Upper bound on the z position of the well bottom for |eps| < 1."""
    return 1.0 + 2.0 * params.xi / (params.C * params.omega)


def shooting_grid(params: ModelParams, z_tail: float = 1e-8, steps_per_wavelength: float = 0.05) -> Grid:
    """Grid from the repulsive wall (z ~ 50 beyond the well) to a deep tail z = z_tail."""
    zs = _well_scale(params)
    z_left = 50.0 + 2.0 * zs
    x_min = float(x_of_z(params, z_left))
    x_max = float(x_of_z(params, z_tail))
    k_max = params.omega * (1.0 + 0.5 * zs)
    h = steps_per_wavelength / k_max
    n = int(math.ceil((x_max - x_min) / h)) + 1
    return Grid(x_min, x_max, n)


class _Matcher:
    """Normalized Casoratian of the wall-side and tail-side solutions."""

    def __init__(self, params: ModelParams, grid: Grid):
        self.params = params
        self.x = grid.x
        w = params.omega
        self.e1 = np.exp(-w * self.x)
        self.e2 = self.e1 * self.e1

    def potential(self, epsilon):
        from .model import schrodinger_like_coeffs
        c2, c1, c0 = schrodinger_like_coeffs(self.params, epsilon)
        return c2 * self.e2 + c1 * self.e1 + c0

    def solutions(self, epsilon):
        U = self.potential(epsilon)
        n = len(self.x)
        m = int(np.clip(np.argmin(U), 4, n - 6))
        kappa = math.sqrt(max(U[-1], 0.0))
        pot = lambda t: effective_potential(self.params, epsilon, t)
        left, _ = numerov(pot, self.x[: m + 2], 0.0, 1.0)
        right, _ = numerov(pot, self.x[m:][::-1], 1.0, -kappa)
        right = right[::-1]
        return U, m, left, right

    def __call__(self, epsilon) -> float:
        _, m, left, right = self.solutions(epsilon)
        a0, a1 = left[m], left[m + 1]
        b0, b1 = right[0], right[1]
        return (a0 * b1 - a1 * b0) / (math.hypot(a0, a1) * math.hypot(b0, b1))

    def has_well(self, epsilon) -> bool:
        return float(np.min(self.potential(epsilon))) < 0.0

    def glued(self, epsilon) -> np.ndarray:
        _, m, left, right = self.solutions(epsilon)
        scale = left[m] / right[0] if right[0] != 0 else left[m + 1] / right[1]
        return np.concatenate([left[: m + 1], scale * right[1:]])


def count_nodes(y, rel_floor: float = 1e-7) -> int:
    y = np.asarray(y, dtype=float)
    keep = y[np.abs(y) > rel_floor * np.max(np.abs(y))]
    return int(np.count_nonzero(np.signbit(keep[1:]) != np.signbit(keep[:-1])))


def _scan_energies(params: ModelParams, lo: float, hi: float, ds: float):
    """Energies in [lo, hi] (same sign) uniform in s = sqrt(1 - eps^2)/(lc w)."""
    sgn = 1.0 if lo >= 0 else -1.0
    lw = params.lambda_c * params.omega
    s_of = lambda e: math.sqrt(max(0.0, 1 - e * e)) / lw
    s_a, s_b = sorted((s_of(lo), s_of(hi)))
    k = max(2, int(math.ceil((s_b - s_a) / ds)) + 1)
    s = np.linspace(s_a, s_b, k)
    e = sgn * np.sqrt(np.clip(1 - (lw * s) ** 2, 0.0, 1.0))
    return np.sort(e)


def shoot_spectrum(params: ModelParams, e_window, grid: Grid | None = None,
                   tol: float = 1e-12) -> ShootingResult:
    """All eigen-energies of the upper-component equation inside e_window.

    Energies are scanned uniformly in the decay constant, bracketed by sign
    changes of the matching function and refined with a bracketing root finder.
    Energies at which the effective potential has no negative region are skipped.
    """
    lo, hi = e_window
    if not -1 < lo < hi < 1:
        raise DomainError("the shooting window must lie inside (-1, 1)")
    grid = grid or shooting_grid(params)
    match = _Matcher(params, grid)
    ds = min(0.05, 0.25 * params.C ** 2)
    parts = []
    if lo < 0:
        parts.append((lo, min(hi, -1e-12)))
    if hi > 0:
        parts.append((max(lo, 1e-12), hi))
    roots = []
    for a, b in parts:
        es = _scan_energies(params, a, b, ds)
        vals = [match(e) if match.has_well(e) else None for e in es]
        for i in range(len(es) - 1):
            fa, fb = vals[i], vals[i + 1]
            if fa is None or fb is None:
                continue
            if fa == 0.0:
                roots.append(float(es[i]))
            elif fa * fb < 0:
                roots.append(brentq(match, es[i], es[i + 1], xtol=tol, rtol=1e-15))
    roots = sorted(set(roots))
    nodes = [count_nodes(match.glued(e)) for e in roots]
    residuals = [abs(match(e)) for e in roots]
    return ShootingResult(roots, nodes, residuals)


def second_derivative(fn: Callable, x, h: float):
    x = np.asarray(x, dtype=float)
    return (-fn(x + 2 * h) + 16 * fn(x + h) - 30 * fn(x) + 16 * fn(x - h) - fn(x - 2 * h)) / (12 * h * h)


def _fd_step(params: ModelParams, epsilon: float, x) -> float:
    k = math.sqrt(float(np.max(np.abs(effective_potential(params, epsilon, x))))) + params.omega
    return 0.01 / k


def ode_residual_profile(params: ModelParams, epsilon: float, wavefun: Callable, x,
                         h: float | None = None) -> np.ndarray:
    """Pointwise |-phi'' + U phi| / max|phi| with a 5-point second derivative."""
    x = np.asarray(x, dtype=float)
    h = h or _fd_step(params, epsilon, x)
    phi = wavefun(x)
    res = -second_derivative(wavefun, x, h) + effective_potential(params, epsilon, x) * phi
    return np.abs(res) / np.max(np.abs(phi))


def ode_residual(params: ModelParams, epsilon: float, wavefun: Callable, grid: Grid,
                 h: float | None = None) -> float:
    """max over interior grid points of |-phi'' + U phi| / max|phi|."""
    x = grid.x[1:-1]
    return float(np.max(ode_residual_profile(params, epsilon, wavefun, x, h)))
