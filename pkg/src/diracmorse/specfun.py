"""Special-function kernel.

Gamma functions, generalized Laguerre polynomials, Gauss-Laguerre rules and
the continuous dual Hahn polynomials S_n^lam(y^2; a, b) with their weight.
Polynomials are evaluated by upward three-term recursion; the terminating
hypergeometric sums are kept as independent cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import loggamma

from .errors import ConvergenceError, DegenerateRecursionError, DomainError


# ---------------------------------------------------------------------------
# gamma functions
# ---------------------------------------------------------------------------

def log_gamma(x: float) -> float:
    """ln Gamma(x) for real x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def log_abs_gamma_complex(re: float, im: float) -> float:
    """ln |Gamma(re + i im)|.

    Raises DomainError at the poles re in {0, -1, -2, ...}, im == 0.
    """
    if im == 0 and re <= 0 and float(re).is_integer():
        raise DomainError(f"Gamma has a pole at {re!r}")
    if im == 0:
        return math.lgamma(re) if re > 0 else float(loggamma(complex(re, 0.0)).real)
    return float(loggamma(complex(re, im)).real)


def log_gamma_ratio(num: float, den: float) -> float:
    """ln(Gamma(num) / Gamma(den)) for positive arguments."""
    return math.lgamma(num) - math.lgamma(den)


# ---------------------------------------------------------------------------
# Laguerre polynomials
# ---------------------------------------------------------------------------

def _check_nu(nu):
    if not nu > -1:
        raise DomainError(f"Laguerre parameter must satisfy nu > -1, got {nu!r}")


def laguerre_all(n_max: int, nu: float, x):
    """Return L_0^nu(x), ..., L_{n_max}^nu(x) stacked along axis 0.

    Upward recursion (n+1) L_{n+1} = (2n+nu+1-x) L_n - (n+nu) L_{n-1}.
    """
    _check_nu(nu)
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + nu - x
    for n in range(1, n_max):
        out[n + 1] = ((2 * n + nu + 1 - x) * out[n] - (n + nu) * out[n - 1]) / (n + 1)
    return out


def laguerre(n: int, nu: float, x):
    """Generalized Laguerre polynomial L_n^nu(x)."""
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    _check_nu(nu)
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for k in range(n):
        prev, cur = cur, ((2 * k + nu + 1 - x) * cur - (k + nu) * prev) / (k + 1)
    return cur[()] if cur.ndim == 0 else cur


def laguerre_or_zero(n: int, nu: float, x):
    """L_n^nu(x) with the convention L_{-1} = 0."""
    if n < 0:
        return np.zeros_like(np.asarray(x, dtype=float))[()]
    return laguerre(n, nu, x)


def laguerre_x_ddx(n: int, nu: float, x):
    """x d/dx L_n^nu(x) = n L_n^nu - (n+nu) L_{n-1}^nu."""
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    _check_nu(nu)
    if n == 0:
        return np.zeros_like(np.asarray(x, dtype=float))[()]
    return n * laguerre(n, nu, x) - (n + nu) * laguerre(n - 1, nu, x)


def hyp1f1_terminating(n: int, b: float, x):
    """Terminating 1F1(-n; b; x) as an explicit finite sum."""
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(n):
        term = term * (k - n) * x / ((b + k) * (k + 1))
        total = total + term
    return total[()] if total.ndim == 0 else total


# ---------------------------------------------------------------------------
# Gauss-Laguerre quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for the measure x^nu e^{-x} dx on (0, inf)."""

    order: int
    nu: float
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        """Sum of weights * values; values sampled at the nodes."""
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=256)
def gauss_laguerre(order: int, nu: float) -> QuadratureRule:
    """Generalized Gauss-Laguerre rule by the Golub-Welsch eigenproblem.

    The symmetric Jacobi matrix of the monic Laguerre recursion has diagonal
    2k+nu+1 and off-diagonal sqrt(k(k+nu)); nodes are its eigenvalues and
    weights Gamma(nu+1) times the squared first eigenvector components.
    """
    if order < 1:
        raise DomainError(f"order must be >= 1, got {order}")
    _check_nu(nu)
    k = np.arange(order, dtype=float)
    diag = 2 * k + nu + 1
    off = np.sqrt(k[1:] * (k[1:] + nu))
    try:
        nodes, vecs = eigh_tridiagonal(diag, off)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"Golub-Welsch eigensolver failed: {exc}") from exc
    weights = math.gamma(nu + 1) * vecs[0] ** 2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order, float(nu), nodes, weights)


# ---------------------------------------------------------------------------
# continuous dual Hahn polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CDHArgs:
    """Arguments (lam, a, b, y^2) of S_n^lam(y^2; a, b).

    y2 < 0 is allowed: it is the analytic continuation used for bound states.
    """

    lam: float
    a: float
    b: float
    y2: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lam must be > 0, got {self.lam!r}")


def _cdh_leading(args: CDHArgs, n: int) -> float:
    lead = (n + args.lam + args.a) * (n + args.lam + args.b)
    if lead == 0:
        raise DegenerateRecursionError(
            f"(n+lam+a)(n+lam+b) vanishes at n={n} for {args}")
    return lead


def cdh_recursion(args: CDHArgs, n_max: int) -> np.ndarray:
    """S_0..S_{n_max} by upward recursion from S_0 = 1.

    y^2 S_n = [P_n + R_n - lam^2] S_n - R_n S_{n-1} - P_n S_{n+1}
    with P_n = (n+lam+a)(n+lam+b), R_n = n(n+a+b-1).
    """
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    lam, a, b, y2 = args.lam, args.a, args.b, args.y2
    s = np.empty(n_max + 1)
    s[0] = 1.0
    prev = 0.0
    for n in range(n_max):
        p = _cdh_leading(args, n)
        r = n * (n + a + b - 1)
        s[n + 1] = ((p + r - lam * lam - y2) * s[n] - r * prev) / p
        prev = s[n]
    return s


def cdh_recursion_scaled(args: CDHArgs, n_start: int, n_stop: int):
    """S_n for n_start <= n <= n_stop, rescaled to avoid overflow.

    Returns (values, log_scale) with S_n = values[n - n_start] * exp(log_scale).
    """
    if not 0 <= n_start <= n_stop:
        raise DomainError("need 0 <= n_start <= n_stop")
    lam, a, b, y2 = args.lam, args.a, args.b, args.y2
    out = np.empty(n_stop - n_start + 1)
    log_scale = 0.0
    prev, cur = 0.0, 1.0
    if n_start == 0:
        out[0] = 1.0
    for n in range(n_stop):
        p = _cdh_leading(args, n)
        r = n * (n + a + b - 1)
        prev, cur = cur, ((p + r - lam * lam - y2) * cur - r * prev) / p
        big = abs(cur)
        if big > 1e150:
            prev /= big
            cur /= big
            log_scale += math.log(big)
            if n + 1 > n_start:
                out[: n + 1 - n_start] /= big
        if n + 1 >= n_start:
            out[n + 1 - n_start] = cur
    return out, log_scale


def cdh_3f2(args: CDHArgs, n: int) -> float:
    """S_n as the terminating 3F2(-n, lam+iy, lam-iy; lam+a, lam+b; 1).

    (lam+iy)_k (lam-iy)_k is carried as the real product of (lam+j)^2 + y^2.
    The terms alternate and can cancel by many orders of magnitude, so the sum
    is formed in exact rational arithmetic from the (exactly representable)
    float inputs and rounded once at the end.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    lam, a, b, y2 = (Fraction(v) for v in (args.lam, args.a, args.b, args.y2))
    term = Fraction(1)
    total = Fraction(1)
    for k in range(n):
        den = (lam + a + k) * (lam + b + k) * (k + 1)
        if den == 0:
            raise DomainError(f"zero Pochhammer denominator at k={k} for {args}")
        term *= (k - n) * ((lam + k) ** 2 + y2) / den
        total += term
    return float(total)


def cdh_norm(lam: float, a: float, b: float, n: int) -> float:
    """Right-hand side of the orthogonality relation: n! Gamma(n+a+b) / (Gamma(n+lam+a) Gamma(n+lam+b))."""
    return math.exp(math.lgamma(n + 1) + math.lgamma(n + a + b)
                    - math.lgamma(n + lam + a) - math.lgamma(n + lam + b))


def cdh_weight(lam: float, a: float, b: float, y: float, strict: bool = True) -> float:
    """Weight rho^lam(y) = |G(lam+iy) G(a+iy) G(b+iy) / (G(lam+a) G(lam+b) G(2iy))|^2 / 2pi.

    With strict=False the closed-form expression is evaluated for any b (the value is
    then only a formal weight, see the scattering normalization).
    """
    if strict and not (lam > 0 and a > 0 and b > 0):
        raise DomainError("cdh_weight requires lam, a, b > 0")
    if y < 0:
        raise DomainError("y must be >= 0")
    if y == 0:
        return 0.0
    log_num = (log_abs_gamma_complex(lam, y) + log_abs_gamma_complex(a, y)
               + log_abs_gamma_complex(b, y))
    log_den = (log_abs_gamma_complex(lam + a, 0.0) + log_abs_gamma_complex(lam + b, 0.0)
               + log_abs_gamma_complex(0.0, 2 * y))
    return math.exp(2 * (log_num - log_den)) / (2 * math.pi)


def cdh_gram(lam: float, a: float, b: float, n_max: int, panels: int = 400,
             panel_order: int = 16) -> np.ndarray:
    """Matrix of int_0^inf rho S_n S_m dy for n, m <= n_max.

    The y-range is truncated where rho (1 + y^2)^(2 n_max), an envelope of the
    integrand, drops below 1e-18 of the peak of rho, and integrated with
    composite Gauss-Legendre panels.
    """
    ys = np.linspace(1e-3, 5.0, 200)
    rho_max = max(cdh_weight(lam, a, b, y) for y in ys)
    y_cut = 5.0
    while (cdh_weight(lam, a, b, y_cut) * (1 + y_cut ** 2) ** (2 * n_max) > 1e-18 * rho_max
           or y_cut < n_max + 5):
        y_cut *= 1.25
    t, w = np.polynomial.legendre.leggauss(panel_order)
    edges = np.linspace(0.0, y_cut, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    y = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    wy = (half[:, None] * w[None, :]).ravel()
    rho = np.array([cdh_weight(lam, a, b, yi) for yi in y])
    s = np.array([cdh_recursion(CDHArgs(lam, a, b, yi * yi), n_max) for yi in y])
    return (s * (rho * wy)[:, None]).T @ s


def chebyshev_tail_residual(args: CDHArgs, N: int, window: int) -> float:
    """Scaled residual of 2u Q_{N+n} - Q_{N+n-1} - Q_{N+n+1} over 0 <= n <= window.

    u = 1 - (y/N)^2 / 2, Q_n = S_n. Normalized by max |Q| over the window.
    """
    if N < 1 or window < 0:
        raise DomainError("need N >= 1 and window >= 0")
    q, _ = cdh_recursion_scaled(args, N - 1, N + window + 1)
    u = 1.0 - 0.5 * args.y2 / N ** 2
    res = 2 * u * q[1:-1] - q[:-2] - q[2:]
    return float(np.max(np.abs(res)) / np.max(np.abs(q)))
