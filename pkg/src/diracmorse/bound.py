"""Discrete spectrum and bound-state spinors.

The energies come in two branches,

    A > 0:  eps_n / C =  lc^2 xi w n     +/- sqrt(1 - (lc C w n)^2),      n = 0..n_max
    A < 0:  eps_n / C = -lc^2 xi w (n+1) +/- sqrt(1 - (lc C w (n+1))^2),  n = 0..n_max-1

with exponents alpha_n; a state is square integrable only for alpha_n > 0.
The A < 0 energies are evaluated as exact negations of A > 0 ones, so the
degeneracy eps_n^{+/-}(A<0) = -eps_{n+1}^{-/+}(A>0) holds bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoPartnerError
from .model import ModelParams, SpinorSample, Frame, check_pole
from .specfun import laguerre_or_zero
from .tridiag import log_norm

PLUS = 1
MINUS = -1


@dataclass(frozen=True)
class BoundState:
    n: int
    branch: int  # +1 or -1
    epsilon: float
    alpha_n: float
    valid: bool
    a_sign: int

    @property
    def branch_symbol(self) -> str:
        return "+" if self.branch > 0 else "-"


def n_max(params: ModelParams) -> int:
    """Largest integer <= 1/(lc C w), with a 1e-12 relative guard against round-off."""
    v = 1.0 / (params.lambda_c * params.C * params.omega)
    return int(math.floor(v * (1 + 1e-12)))


def _eps_positive_a(params: ModelParams, m: int, branch: int) -> float:
    lc, C, w, xi = params.lambda_c, params.C, params.omega, params.xi
    t = lc * C * w * m
    root = math.sqrt(max(0.0, (1.0 - t) * (1.0 + t)))
    return C * (lc * lc * xi * w * m + branch * root)


def energy(params: ModelParams, n: int, branch: int) -> float:
    if params.A > 0:
        return _eps_positive_a(params, n, branch)
    return -_eps_positive_a(params, n + 1, -branch)


def alpha_n(params: ModelParams, n: int, epsilon: float) -> float:
    k = params.xi / (params.C * params.omega)
    if params.A > 0:
        return k * epsilon - n
    return -k * epsilon - n - 1


def _state(params: ModelParams, n: int, branch: int, epsilon: float) -> BoundState:
    a = alpha_n(params, n, epsilon)
    return BoundState(n, branch, epsilon, a, a > 0, params.sign)


def spectrum(params: ModelParams) -> list[BoundState]:
    """All states of both branches sorted by (n, branch), plus branch first."""
    top = n_max(params) if params.A > 0 else n_max(params) - 1
    return [_state(params, n, br, energy(params, n, br))
            for n in range(top + 1) for br in (PLUS, MINUS)]


def valid_states(params: ModelParams) -> list[BoundState]:
    return [s for s in spectrum(params) if s.valid]


def binding_energy(params: ModelParams, state: BoundState) -> float:
    """(eps - 1)/lc^2 without catastrophic cancellation (A > 0 only)."""
    if params.A < 0:
        return (state.epsilon - 1) / params.lambda_c ** 2
    lc, xi, w, n = params.lambda_c, params.xi, params.omega, state.n
    C = params.C
    t = lc * C * w * n
    root = math.sqrt(max(0.0, (1 - t) * (1 + t)))
    c_minus_1 = -(lc * xi) ** 2 / (1 + C)
    root_minus_1 = -t * t / (1 + root)
    # eps - 1 = C lc^2 xi w n + branch C root - 1
    if state.branch > 0:
        shift = C * lc * lc * xi * w * n + C * root_minus_1 + c_minus_1
    else:
        shift = state.epsilon - 1
    return shift / lc ** 2


def degeneracy_partner(params: ModelParams, state: BoundState) -> BoundState:
    """Degenerate partner in the sign-flipped problem.

    A < 0 state (n, +/-) pairs with A > 0 state (n+1, -/+) and vice versa; the
    two A > 0 states with n = 0 have no partner.
    """
    partner = params.flipped()
    if state.a_sign < 0:
        m, br = state.n + 1, -state.branch
        if m > n_max(partner):
            raise NoPartnerError(f"no A > 0 state with n = {m}")
    else:
        if state.n == 0:
            raise NoPartnerError("the n = 0 states eps = +/-C of A > 0 are unpaired")
        m, br = state.n - 1, -state.branch
        if m > n_max(partner) - 1:
            raise NoPartnerError(f"no A < 0 state with n = {m}")
    return _state(partner, m, br, energy(partner, m, br))


def _b_of_energy(params: ModelParams, epsilon: float) -> float:
    k = params.xi / (params.C * params.omega)
    return -k * epsilon if params.A > 0 else 1 + k * epsilon


def diagonalization_spectrum(params: ModelParams) -> list[BoundState]:
    """Energies from n + alpha + b(eps) = 0 and y(eps)^2 = -alpha^2.

    Eliminating alpha gives F(eps) = y(eps)^2 + (n + b(eps))^2 = 0, a quadratic
    in eps (b is affine in eps). Its coefficients are read off from three
    samples of F and the two roots taken with the cancellation-free formula.
    """
    lc, w = params.lambda_c, params.omega
    top = n_max(params) if params.A > 0 else n_max(params) - 1
    out = []
    for n in range(top + 1):
        def F(e):
            return (e * e - 1) / (lc * w) ** 2 + (n + _b_of_energy(params, e)) ** 2
        f0, fp, fm = F(0.0), F(1.0), F(-1.0)
        qa = 0.5 * (fp + fm) - f0
        qb = 0.5 * (fp - fm)
        qc = f0
        disc = max(0.0, qb * qb - 4 * qa * qc)
        if qb >= 0:
            r1 = (-qb - math.sqrt(disc)) / (2 * qa)
        else:
            r1 = (-qb + math.sqrt(disc)) / (2 * qa)
        r2 = qc / (qa * r1) if r1 != 0 else -qb / qa
        hi, lo = max(r1, r2), min(r1, r2)
        for br, e in ((PLUS, hi), (MINUS, lo)):
            a = -n - _b_of_energy(params, e)
            out.append(BoundState(n, br, e, a, a > 0, params.sign))
    return out


def bound_spinor(params: ModelParams, state: BoundState, z) -> SpinorSample:
    """Upper and lower components of a bound state at z > 0 (rotated frame).

        phi_n   = c_n z^a e^{-z/2} L_n^{2a}(z),  a = alpha_n
        theta_n = -lc w/(C+eps) c_n z^a e^{-z/2} {(a + xi/w) L_n^{2a} - z L_{n-1}^{2a+1}}   (A > 0)
                                                 {(a + xi/w) L_n^{2a} - z L_n^{2a+1}}       (A < 0)

    c_n = sqrt(w n!/Gamma(n+2a)). The Laguerre index 2a (not 2a - 1) is what
    solves the second-order equation for n >= 1; the lower component is the
    kinetic-balance image of the upper one.
    """
    if not state.valid:
        raise DomainError(f"state n={state.n} has alpha_n = {state.alpha_n} <= 0")
    check_pole(params, state.epsilon)
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("z must be > 0")
    n, a = state.n, state.alpha_n
    env = math.exp(log_norm(n, a, params.omega)) * z ** a * np.exp(-z / 2)
    low = laguerre_or_zero(n, 2 * a, z)
    if params.A > 0:
        second = z * laguerre_or_zero(n - 1, 2 * a + 1, z)
    else:
        second = z * laguerre_or_zero(n, 2 * a + 1, z)
    upper = env * low
    pref = -params.lambda_c * params.omega / (params.C + state.epsilon)
    lower = pref * env * ((a + params.xi / params.omega) * low - second)
    return SpinorSample(upper, lower, Frame.ROTATED)
