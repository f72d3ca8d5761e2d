"""Scattering (|eps| > 1) series solution in the kinetically balanced basis.

With mu = xi/w and tau = (w/2)/(C + eps) the expansion coefficients are

    f_n(eps) = sqrt(Gamma(n+2alpha)/n!) S_n^alpha(y^2; alpha, b),
    y^2 = (eps^2 - 1)/(lc w)^2,   b = -(xi/(C w)) eps (A > 0),  1 + (xi/(C w)) eps (A < 0),

and chi = N(eps) sum_n f_n psi_n. alpha > 0 is a free basis parameter.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ThresholdDivergence, WeightRegimeWarning
from .model import Frame, ModelParams, SpinorSample, check_pole, z_of_x
from .specfun import CDHArgs, cdh_recursion, cdh_weight, chebyshev_tail_residual, laguerre_all
from .tridiag import BasisParams, basis_all

DEFAULT_N_TERMS = 64


def balanced_params(params: ModelParams, epsilon: float):
    """(mu, tau) that make the basis obey kinetic balance exactly."""
    check_pole(params, epsilon)
    return params.xi / params.omega, 0.5 * params.omega / (params.C + epsilon)


def balanced_basis(params: ModelParams, epsilon: float, alpha: float) -> BasisParams:
    mu, tau = balanced_params(params, epsilon)
    return BasisParams.for_model(params, alpha, mu, tau)


def cdh_args_of_energy(params: ModelParams, epsilon: float, alpha: float) -> CDHArgs:
    y2 = (epsilon * epsilon - 1) / (params.lambda_c * params.omega) ** 2
    k = params.xi / (params.C * params.omega)
    b = -k * epsilon if params.A > 0 else 1 + k * epsilon
    return CDHArgs(alpha, alpha, b, y2)


def _require_scattering(epsilon: float):
    if not abs(epsilon) > 1:
        raise DomainError(f"scattering requires |eps| > 1, got {epsilon!r}")


def expansion_coefficients(params: ModelParams, epsilon: float, alpha: float,
                           n_terms: int) -> np.ndarray:
    """f_0 .. f_{n_terms-1}."""
    _require_scattering(epsilon)
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    s = cdh_recursion(cdh_args_of_energy(params, epsilon, alpha), n_terms - 1)
    n = np.arange(n_terms)
    log_ratio = np.array([math.lgamma(k + 2 * alpha) - math.lgamma(k + 1) for k in n])
    return np.exp(0.5 * log_ratio) * s


def dy_de(params: ModelParams, epsilon: float) -> float:
    """Derivative of y(eps) = sqrt(eps^2 - 1)/(lc w)."""
    gap = abs(epsilon) - 1
    if gap < 1e-12:
        raise ThresholdDivergence(f"dy/deps diverges at the threshold (|eps| - 1 = {gap:g})")
    return epsilon / (params.lambda_c * params.omega * math.sqrt(epsilon * epsilon - 1))


def normalization(params: ModelParams, epsilon: float, alpha: float) -> float:
    """N(eps) = sqrt(rho^alpha(y) dy/deps).

    For b <= 0 (A > 0, eps > 0) the weight is outside its positive-measure
    regime; the closed-form weight is still evaluated and a WeightRegimeWarning
    is issued. For eps < -1, dy/deps < 0 and |dy/deps| is used.
    """
    _require_scattering(epsilon)
    args = cdh_args_of_energy(params, epsilon, alpha)
    if args.b <= 0:
        warnings.warn(f"dual Hahn parameter b = {args.b:.6g} <= 0: weight outside its "
                      "positive-measure regime", WeightRegimeWarning, stacklevel=2)
    rho = cdh_weight(args.lam, args.a, args.b, math.sqrt(args.y2), strict=False)
    return math.sqrt(rho * abs(dy_de(params, epsilon)))


@dataclass(frozen=True)
class ScatterSolution:
    epsilon: float
    alpha: float
    cdh: CDHArgs
    n_terms: int
    coefficients: np.ndarray
    normalization: float | None

    def tail_estimate(self, params: ModelParams, x) -> np.ndarray:
        """|f_{N-1} phi_{N-1}(x)|, a size estimate of the first omitted term."""
        bp = balanced_basis(params, self.epsilon, self.alpha)
        ph, _ = basis_all(params, bp, self.n_terms - 1, z_of_x(params, x))
        return np.abs(self.coefficients[-1] * ph[-1])


def solve(params: ModelParams, epsilon: float, alpha: float = 1.0,
          n_terms: int = DEFAULT_N_TERMS, normalize: bool = False) -> ScatterSolution:
    coeffs = expansion_coefficients(params, epsilon, alpha, n_terms)
    coeffs.setflags(write=False)
    norm = normalization(params, epsilon, alpha) if normalize else None
    return ScatterSolution(epsilon, alpha, cdh_args_of_energy(params, epsilon, alpha),
                           n_terms, coeffs, norm)


def _cesaro_weights(n_terms: int, order: int) -> np.ndarray:
    if order == 0:
        return np.ones(n_terms)
    return (1.0 - np.arange(n_terms) / n_terms) ** order


def wavefunction(params: ModelParams, epsilon: float, alpha: float, n_terms: int, x,
                 normalize: bool = False, cesaro: int = 0) -> SpinorSample:
    """Truncated series sum_{n < n_terms} f_n psi_n(x), both components.

    cesaro > 0 replaces the partial sum by the Riesz mean of that order, which
    converges pointwise where the plain partial sums only oscillate.
    """
    coeffs = expansion_coefficients(params, epsilon, alpha, n_terms)
    coeffs = coeffs * _cesaro_weights(n_terms, cesaro)
    bp = balanced_basis(params, epsilon, alpha)
    z = z_of_x(params, x)
    ph, th = basis_all(params, bp, n_terms - 1, z)
    upper = np.tensordot(coeffs, ph, axes=1)
    lower = np.tensordot(coeffs, th, axes=1)
    if normalize:
        nrm = normalization(params, epsilon, alpha)
        upper, lower = nrm * upper, nrm * lower
    return SpinorSample(upper, lower, Frame.ROTATED)


def nonrel_limit_params(params: ModelParams):
    """(B, D) of the lc -> 0 Morse problem: B = |A|/xi, D = xi (A > 0) or -w - xi (A < 0)."""
    B = abs(params.A) / params.xi
    D = params.xi if params.A > 0 else -params.omega - params.xi
    return B, D


def nonrel_series(params: ModelParams, E: float, alpha: float, n_terms: int, x):
    """Nonrelativistic series sum f_n^NR phi_n(x) with S_n^alpha(2E/w^2; alpha, -D/w).

    Basis functions live on z = (2B/w) e^{-w x}.
    """
    if not E > 0:
        raise DomainError("nonrelativistic scattering requires E > 0")
    B, D = nonrel_limit_params(params)
    w = params.omega
    s = cdh_recursion(CDHArgs(alpha, alpha, -D / w, 2 * E / w ** 2), n_terms - 1)
    z = 2 * B / w * np.exp(-w * np.asarray(x, dtype=float))
    lag = laguerre_all(n_terms - 1, 2 * alpha - 1, z)
    # f_n c_n = sqrt(Gamma(n+2a)/n!) sqrt(w n!/Gamma(n+2a)) = sqrt(w)
    return math.sqrt(w) * z ** alpha * np.exp(-z / 2) * np.tensordot(s, lag, axes=1)


def chebyshev_tail(params: ModelParams, epsilon: float, alpha: float, N: int,
                   window: int) -> float:
    """Tail residual of the normalized recursion at the dual Hahn arguments of eps."""
    _require_scattering(epsilon)
    return chebyshev_tail_residual(cdh_args_of_energy(params, epsilon, alpha), N, window)


def sign_change_spacing(values) -> float:
    """Mean index spacing between consecutive sign changes of a sequence."""
    v = np.asarray(values, dtype=float)
    idx = np.nonzero(np.signbit(v[1:]) != np.signbit(v[:-1]))[0]
    if len(idx) < 2:
        return math.inf
    return (idx[-1] - idx[0]) / (len(idx) - 1)
