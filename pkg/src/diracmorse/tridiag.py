"""L^2 spinor basis and the tridiagonal representation of H - epsilon.

Basis in z = (2C|A|/(omega xi)) e^{-omega x}, inner products with dx = dz/(omega z):

    phi_n   = c_n z^alpha e^{-z/2} L_n^{2alpha-1}(z),  c_n = sqrt(omega n!/Gamma(n+2alpha))
    theta_n = -2 lambda_c tau (mu + zeta z + z d/dz) phi_n

The representation is tridiagonal only for zeta = +1/2 (A > 0) or -1/2 (A < 0)
and beta = 1; zeta may be set off those values for negative controls.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyWarning, DegenerateRecursionError, DomainError
from .model import ModelParams
from .specfun import gauss_laguerre, laguerre_all


@dataclass(frozen=True)
class BasisParams:
    alpha: float
    mu: float
    tau: float
    zeta: float
    a_sign: int
    beta: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be > 0, got {self.alpha!r}")
        if self.beta != 1.0:
            raise DomainError("only beta = 1 gives a tridiagonal representation")
        if self.a_sign not in (1, -1):
            raise DomainError("a_sign must be +1 or -1")

    @classmethod
    def for_model(cls, params: ModelParams, alpha: float, mu: float, tau: float) -> "BasisParams":
        return cls(alpha, mu, tau, 0.5 * params.sign, params.sign)

    @property
    def nu(self) -> float:
        return 2 * self.alpha - 1

    @property
    def canonical_zeta(self) -> float:
        return 0.5 * self.a_sign


@dataclass(frozen=True)
class RecursionParams:
    p: float
    q: float


def log_norm(n: int, alpha: float, omega: float) -> float:
    """ln sqrt(omega Gamma(n+1) / Gamma(n+2alpha))."""
    return 0.5 * (math.log(omega) + math.lgamma(n + 1) - math.lgamma(n + 2 * alpha))


def _basis_polys(params: ModelParams, bp: BasisParams, n_max: int, z):
    """Polynomial parts of phi_n and theta_n (no z^alpha e^{-z/2}) for n <= n_max."""
    z = np.asarray(z, dtype=float)
    lo = laguerre_all(n_max, bp.nu, z)
    hi = laguerre_all(n_max, bp.nu + 1, z)
    c = np.array([math.exp(log_norm(n, bp.alpha, params.omega)) for n in range(n_max + 1)])
    c = c.reshape((-1,) + (1,) * z.ndim)
    if bp.a_sign > 0:
        shifted = np.concatenate([np.zeros((1,) + z.shape), hi[:-1]])
        bracket = (bp.mu + bp.alpha) * lo - z * shifted
    else:
        bracket = (bp.mu + bp.alpha) * lo - z * hi
    bracket = bracket + (bp.zeta - bp.canonical_zeta) * z * lo
    return c * lo, -2 * params.lambda_c * bp.tau * c * bracket


def phi_basis(params: ModelParams, bp: BasisParams, n: int, z):
    z = np.asarray(z, dtype=float)
    poly, _ = _basis_polys(params, bp, n, z)
    return z ** bp.alpha * np.exp(-z / 2) * poly[n]


def theta_basis(params: ModelParams, bp: BasisParams, n: int, z):
    z = np.asarray(z, dtype=float)
    _, poly = _basis_polys(params, bp, n, z)
    return z ** bp.alpha * np.exp(-z / 2) * poly[n]


def basis_all(params: ModelParams, bp: BasisParams, n_max: int, z):
    """(phi, theta) arrays of shape (n_max+1,) + z.shape."""
    z = np.asarray(z, dtype=float)
    p, t = _basis_polys(params, bp, n_max, z)
    env = z ** bp.alpha * np.exp(-z / 2)
    return p * env, t * env


def pq(params: ModelParams, bp: BasisParams, epsilon: float) -> RecursionParams:
    """p = 4 tau^2 (C + eps - omega/tau), q = 2 tau (mu omega - xi)."""
    if bp.tau == 0:
        raise DomainError("tau = 0 gives a degenerate basis")
    tau = bp.tau
    p = 4 * tau * tau * (params.C + epsilon - params.omega / tau)
    q = 2 * tau * (bp.mu * params.omega - params.xi)
    return RecursionParams(p, q)


def matrix_element_analytic(params: ModelParams, bp: BasisParams, epsilon: float,
                            n: int, m: int) -> float:
    """Closed-form <psi_n| H - eps |psi_m>; zero for |n - m| >= 2."""
    if n < 0 or m < 0:
        raise DomainError("indices must be >= 0")
    if abs(n - m) >= 2:
        return 0.0
    s = bp.a_sign
    lc2 = params.lambda_c ** 2
    C, w, xi = params.C, params.omega, params.xi
    a, mu, tau = bp.alpha, bp.mu, bp.tau
    kin = 4 * tau * tau * (C + epsilon - w / tau)
    if n == m:
        return (C - epsilon
                - s * 2 * lc2 * (w * xi / C) * (n + a)
                + s * 4 * lc2 * tau * (xi - mu * w) * (n + a + s * mu)
                - lc2 * kin * (2 * n * n + 2 * n * (2 * a + s * mu - s * 0.5)
                               + (a + s * mu) ** 2 + (1 - s) * a))
    k = max(n, m)
    return lc2 * math.sqrt(k * (k + 2 * a - 1)) * (
        s * (w * xi / C) + s * 2 * tau * (mu * w - xi)
        + kin * (k + a + s * mu - 0.5 * (1 + s)))


def tridiagonal_operator(params: ModelParams, bp: BasisParams, epsilon: float, size: int):
    """(diag, offdiag) with offdiag[k] = (H - eps)_{k+1, k}."""
    diag = np.array([matrix_element_analytic(params, bp, epsilon, n, n) for n in range(size)])
    off = np.array([matrix_element_analytic(params, bp, epsilon, n, n - 1) for n in range(1, size)])
    return diag, off


def matrix_quadrature(params: ModelParams, bp: BasisParams, epsilon: float, size: int,
                      order: int | None = None) -> np.ndarray:
    """Full size x size matrix of <psi_n| H - eps |psi_m> by Gauss-Laguerre quadrature.

    Term by term:
      (C-eps)<phi|phi> - s lc^2 (w xi/C) <phi|z|phi> - (C+eps-w/tau) <theta|theta>
      + lc (mu w - xi) [<theta_n|phi_m> + <theta_m|phi_n>]
      + lc w (zeta - s/2) [<theta_n|z|phi_m> + <theta_m|z|phi_n>]
    The weight z^{2alpha-1} e^{-z} is absorbed by the rule; the remaining
    integrands are polynomials of degree <= 2 size, exact for order >= size + 1.
    """
    if order is None:
        order = size + 2
    if order < size + 1:
        warnings.warn(f"quadrature order {order} may be too low for size {size}",
                      AccuracyWarning, stacklevel=2)
    rule = gauss_laguerre(order, bp.nu)
    z, w = rule.nodes, rule.weights
    ph, th = _basis_polys(params, bp, size - 1, z)
    lc, om, C, xi = params.lambda_c, params.omega, params.C, params.xi
    s = bp.a_sign

    def ip(f, g, power=0):
        return (f * (w * z ** power)) @ g.T / om

    pp = ip(ph, ph)
    pzp = ip(ph, ph, 1)
    tt = ip(th, th)
    tp = ip(th, ph)
    tzp = ip(th, ph, 1)
    return ((C - epsilon) * pp - s * lc * lc * (om * xi / C) * pzp
            - (C + epsilon - om / (bp.beta * bp.tau)) * tt
            + lc * (bp.mu * om - xi) * (tp + tp.T)
            + lc * om * (bp.zeta - 0.5 * s) * (tzp + tzp.T))


def matrix_element_quadrature(params: ModelParams, bp: BasisParams, epsilon: float,
                              n: int, m: int, order: int | None = None) -> float:
    """Single element of matrix_quadrature."""
    if order is not None and order < n + m + 3:
        warnings.warn(f"quadrature order {order} < n + m + 3", AccuracyWarning, stacklevel=2)
    size = max(n, m) + 1
    if order is None:
        order = n + m + 3
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        return float(matrix_quadrature(params, bp, epsilon, size, order)[n, m])


def recursion_coefficients(params: ModelParams, bp: BasisParams, epsilon: float, n: int,
                           normalized: bool = False):
    """Coefficients (diag, sub, super) of the three-term recursion

        diag f_n - sub f_{n-1} - super f_{n+1} = 0,

    i.e. the row n of (H - eps) divided by -lambda_c^2 p. With normalized=True
    the coefficients act on Q_n = sqrt(n!/Gamma(n+2alpha)) f_n instead.
    """
    rp = pq(params, bp, epsilon)
    p, q = rp.p, rp.q
    if p == 0:
        raise DegenerateRecursionError("p(eps) = 0: the representation is singular")
    s = bp.a_sign
    a, mu = bp.alpha, bp.mu
    r = (q + params.omega * params.xi / params.C) / p
    diag = (2 * n * n + 2 * n * (2 * a + s * mu - s * 0.5) + (a + s * mu) ** 2
            + s * 2 * (n + a) * r + (1 - s) * a + 2 * mu * q / p
            + (epsilon - params.C) / (params.lambda_c ** 2 * p))
    sub_core = n - 0.5 * (1 + s) + a + s * mu + s * r
    sup_core = n + 0.5 * (1 - s) + a + s * mu + s * r
    if normalized:
        return diag, n * sub_core, (n + 2 * a) * sup_core
    return (diag, math.sqrt(n * (n + 2 * a - 1)) * sub_core,
            math.sqrt((n + 1) * (n + 2 * a)) * sup_core)


def cdh_parameters(params: ModelParams, bp: BasisParams, epsilon: float):
    """(b, y^2) of the dual Hahn polynomials matching the recursion for general mu, tau."""
    rp = pq(params, bp, epsilon)
    p, q = rp.p, rp.q
    r = (q + params.omega * params.xi / params.C) / p
    y2 = (params.C - epsilon) / (params.lambda_c ** 2 * p) - bp.mu * (bp.mu + 2 * q / p)
    b = bp.mu + r if bp.a_sign > 0 else 1 - bp.mu - r
    return b, y2
