"""Invariant suites behind the `verify` command.

Each suite returns a list of Check records holding the measured residual and
the tolerance it is held to. `zeta_shift` is a fault-injection hook: it moves
the basis parameter zeta off its tridiagonalizing value, which must make the
tridiag suite fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bound, oracle, scatter, specfun, tridiag
from .errors import NoPartnerError
from .model import ModelParams, kinetic_balance_apply, x_of_z, z_of_x
from .tridiag import BasisParams

SUITES = ("laguerre", "cdh", "tridiag", "bound", "scatter", "limits", "oracle")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    measured: float
    tol: float
    at_least: bool = False  # pass when measured >= tol (orders, rates)

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.measured):
            return False
        return self.measured >= self.tol if self.at_least else self.measured <= self.tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        rel = ">=" if self.at_least else "<="
        return f"[{status}] {self.suite}/{self.name}: measured {self.measured:.3e} (need {rel} {self.tol:.1e})"


def _rel(a, b, floor: float = 0.0) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), floor, 1e-300))


# ---------------------------------------------------------------------------
# laguerre
# ---------------------------------------------------------------------------

def laguerre_identity_residuals(n_max: int = 15, nus=(-0.5, 0.3, 2.7)) -> dict:
    """Worst scaled residuals of the three-term and index-shift identities."""
    x = np.linspace(0.05, 30.0, 121)
    out = {"three_term": 0.0, "lower_index": 0.0, "index_step": 0.0, "x_ddx": 0.0}
    for nu in nus:
        L = specfun.laguerre_all(n_max + 1, nu, x)
        Lp = specfun.laguerre_all(n_max + 1, nu + 1, x)
        Lm = specfun.laguerre_all(n_max + 1, nu - 1, x) if nu - 1 > -1 else None
        for n in range(n_max + 1):
            prev = L[n - 1] if n else 0 * x
            terms = [(2 * n + nu + 1) * L[n], (n + nu) * prev, (n + 1) * L[n + 1]]
            res = x * L[n] - (terms[0] - terms[1] - terms[2])
            out["three_term"] = max(out["three_term"], _scaled(res, terms + [x * L[n]]))
            if Lm is not None:
                terms = [(n + nu) * Lm[n], (n + 1) * Lm[n + 1]]
                res = x * L[n] - (terms[0] - terms[1])
                out["lower_index"] = max(out["lower_index"], _scaled(res, terms + [x * L[n]]))
            prev_p = Lp[n - 1] if n else 0 * x
            res = L[n] - (Lp[n] - prev_p)
            out["index_step"] = max(out["index_step"], _scaled(res, [L[n], Lp[n], prev_p]))
            # x d/dx L_n^nu = -x L_{n-1}^{nu+1}
            res = specfun.laguerre_x_ddx(n, nu, x) + x * prev_p
            out["x_ddx"] = max(out["x_ddx"], _scaled(res, [x * prev_p, n * L[n], (n + nu) * prev]))
    return out


def _scaled(res, terms) -> float:
    scale = sum(np.abs(t) for t in terms)
    return float(np.max(np.abs(res) / np.maximum(scale, 1e-300)))


def laguerre_orthogonality_error(n_max: int = 15, nus=(-0.5, 0.3, 2.7)) -> float:
    worst = 0.0
    for nu in nus:
        rule = specfun.gauss_laguerre(n_max + 2, nu)
        L = specfun.laguerre_all(n_max, nu, rule.nodes)
        gram = (L * rule.weights) @ L.T
        norm = np.array([math.exp(math.lgamma(n + nu + 1) - math.lgamma(n + 1)) for n in range(n_max + 1)])
        worst = max(worst, float(np.max(np.abs(gram / np.sqrt(np.outer(norm, norm)) - np.eye(n_max + 1)))))
    return worst


def laguerre_hypergeometric_error(n_max: int = 15, nus=(-0.5, 0.3, 2.7)) -> float:
    x = np.linspace(0.05, 30.0, 61)
    worst = 0.0
    for nu in nus:
        for n in range(n_max + 1):
            pref = math.exp(math.lgamma(n + nu + 1) - math.lgamma(n + 1) - math.lgamma(nu + 1))
            hyp = pref * specfun.hyp1f1_terminating(n, nu + 1, x)
            # scale: the sum of |terms| bounds the achievable accuracy
            absum = pref * _abs_hyp_sum(n, nu + 1, x)
            worst = max(worst, float(np.max(np.abs(specfun.laguerre(n, nu, x) - hyp) / absum)))
    return worst


def _abs_hyp_sum(n, b, x):
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(n):
        term = term * abs((k - n) / ((b + k) * (k + 1))) * x
        total = total + term
    return total


def suite_laguerre(params: ModelParams, **_) -> list[Check]:
    ident = laguerre_identity_residuals()
    checks = [Check("laguerre", f"identity_{k}", v, 1e-11) for k, v in ident.items()]
    checks.append(Check("laguerre", "orthogonality", laguerre_orthogonality_error(), 1e-10))
    checks.append(Check("laguerre", "hypergeometric_form", laguerre_hypergeometric_error(), 1e-11))
    return checks


# ---------------------------------------------------------------------------
# cdh
# ---------------------------------------------------------------------------

CDH_LATTICE = [specfun.CDHArgs(lam, a, b, y2)
               for lam in (0.3, 1.0, 2.7)
               for a in (0.3, 1.5)
               for b in (0.4, 2.2)
               for y2 in (-0.8, 0.5, 4.0, 30.0)]


def cdh_dual_error(n_max: int = 30, lattice=CDH_LATTICE) -> float:
    """max |recursion - 3F2| / max_n |S_n| over the lattice."""
    worst = 0.0
    for args in lattice:
        rec = specfun.cdh_recursion(args, n_max)
        hyp = np.array([specfun.cdh_3f2(args, n) for n in range(n_max + 1)])
        worst = max(worst, _rel(rec, hyp))
    return worst


def cdh_orthogonality_error(n_max: int = 5, cases=((1.0, 0.8, 1.3), (0.5, 0.5, 2.0))) -> float:
    worst = 0.0
    for lam, a, b in cases:
        gram = specfun.cdh_gram(lam, a, b, n_max)
        norm = np.array([specfun.cdh_norm(lam, a, b, n) for n in range(n_max + 1)])
        worst = max(worst, float(np.max(np.abs(gram / np.sqrt(np.outer(norm, norm)) - np.eye(n_max + 1)))))
    return worst


def suite_cdh(params: ModelParams, **_) -> list[Check]:
    return [Check("cdh", "recursion_vs_3f2", cdh_dual_error(), 1e-10),
            Check("cdh", "orthogonality", cdh_orthogonality_error(), 1e-8)]


# ---------------------------------------------------------------------------
# tridiag
# ---------------------------------------------------------------------------

TRIDIAG_ALPHAS = (0.3, 1.0, 2.7)
TRIDIAG_ENERGIES = (-1.5, 0.3, 0.7, 1.25, 2.0)


def tridiag_errors(params: ModelParams, size: int = 11, zeta_shift: float = 0.0,
                   alphas=TRIDIAG_ALPHAS, energies=TRIDIAG_ENERGIES):
    """(off-band, analytic mismatch) worst relative errors over both signs of A.

    Both the balanced (mu, tau) and a generic pair are exercised.
    """
    off_worst, match_worst = 0.0, 0.0
    for pm in (params, params.flipped()):
        for alpha in alphas:
            for eps in energies:
                if eps == -pm.C:
                    continue
                mu_b, tau_b = scatter.balanced_params(pm, eps)
                for mu, tau in ((mu_b, tau_b), (0.37, 0.21)):
                    bp = BasisParams.for_model(pm, alpha, mu, tau)
                    bp = BasisParams(alpha, mu, tau, bp.zeta + zeta_shift, bp.a_sign)
                    M = tridiag.matrix_quadrature(pm, bp, eps, size)
                    band = np.abs(np.subtract.outer(np.arange(size), np.arange(size))) <= 1
                    scale = float(np.max(np.abs(M[band])))
                    off_worst = max(off_worst, float(np.max(np.abs(M[~band]))) / scale)
                    Ma = np.array([[tridiag.matrix_element_analytic(pm, bp, eps, n, m)
                                    for m in range(size)] for n in range(size)])
                    match_worst = max(match_worst, float(np.max(np.abs(M - Ma))) / scale)
    return off_worst, match_worst


def suite_tridiag(params: ModelParams, zeta_shift: float = 0.0, **_) -> list[Check]:
    off, match = tridiag_errors(params, zeta_shift=zeta_shift)
    return [Check("tridiag", "off_band_vanishes", off, 1e-10),
            Check("tridiag", "analytic_elements", match, 1e-8)]


# ---------------------------------------------------------------------------
# bound
# ---------------------------------------------------------------------------

def degeneracy_error(params: ModelParams):
    """(worst |eps(A<0) + partner|, number of unpaired states over both signs)."""
    worst, unpaired = 0.0, 0
    for pm in (params, params.flipped()):
        for st in bound.spectrum(pm):
            try:
                partner = bound.degeneracy_partner(pm, st)
            except NoPartnerError:
                unpaired += 1
                continue
            worst = max(worst, abs(st.epsilon + partner.epsilon))
    return worst, unpaired


def diagonalization_error(params: ModelParams) -> float:
    ref = {(s.n, s.branch): s.epsilon for s in bound.spectrum(params)}
    got = {(s.n, s.branch): s.epsilon for s in bound.diagonalization_spectrum(params)}
    if ref.keys() != got.keys():
        return math.inf
    return max(abs(ref[k] - got[k]) for k in ref)


def bound_basis(params: ModelParams, state: bound.BoundState) -> BasisParams:
    mu, tau = scatter.balanced_params(params, state.epsilon)
    return BasisParams.for_model(params, state.alpha_n, mu, tau)


def bound_coupling_error(params: ModelParams) -> float:
    """max |(H - eps)_{n,n+1}| / scale at each valid bound state (the b_n = 0 condition)."""
    worst = 0.0
    for st in bound.valid_states(params):
        bp = bound_basis(params, st)
        el = tridiag.matrix_element_analytic(params, bp, st.epsilon, st.n, st.n + 1)
        worst = max(worst, abs(el) / _element_scale(params, bp, st.epsilon, st.n))
    return worst


def _element_scale(params: ModelParams, bp: BasisParams, eps: float, n: int) -> float:
    """Size of the individual terms that make up row n (for scale-relative tests)."""
    rp = tridiag.pq(params, bp, eps)
    lc2 = params.lambda_c ** 2
    k = n + 1
    return (abs(params.C) + abs(eps)
            + lc2 * abs(rp.p) * (2 * k * k + 2 * k * (2 * bp.alpha + abs(bp.mu) + 1) + (bp.alpha + abs(bp.mu)) ** 2)
            + lc2 * k * (params.omega * params.xi / params.C + abs(rp.q)))


def bound_ode_error(params: ModelParams, z_range=(0.5, 20.0)) -> float:
    worst = 0.0
    x = x_of_z(params, np.linspace(*z_range, 201))
    for st in bound.valid_states(params):
        fn = lambda t, st=st: bound.bound_spinor(params, st, z_of_x(params, t)).upper
        worst = max(worst, float(np.max(oracle.ode_residual_profile(params, st.epsilon, fn, x))))
    return worst


def kinetic_balance_errors(params: ModelParams, n_max: int = 10, z_range=(0.5, 20.0),
                           scatter_energies=(1.25, -1.5), alpha: float = 1.0):
    """(bound, scattering basis) worst |analytic - operator| / max|lower| pointwise."""
    z = np.linspace(*z_range, 120)
    x = x_of_z(params, z)
    b_worst = 0.0
    for pm in (params, params.flipped()):
        for st in bound.valid_states(pm):
            up = lambda t, st=st, pm=pm: bound.bound_spinor(pm, st, z_of_x(pm, t)).upper
            ana = bound.bound_spinor(pm, st, z_of_x(pm, x)).lower
            num = kinetic_balance_apply(pm, st.epsilon, up, x)
            b_worst = max(b_worst, _rel(num, ana))
    s_worst = 0.0
    for pm in (params, params.flipped()):
        for eps in scatter_energies:
            bp = scatter.balanced_basis(pm, eps, alpha)
            xx = x_of_z(pm, z)
            for n in range(n_max + 1):
                up = lambda t, n=n, bp=bp, pm=pm: tridiag.phi_basis(pm, bp, n, z_of_x(pm, t))
                ana = tridiag.theta_basis(pm, bp, n, z)
                num = kinetic_balance_apply(pm, eps, up, xx)
                s_worst = max(s_worst, _rel(num, ana))
    return b_worst, s_worst


def suite_bound(params: ModelParams, **_) -> list[Check]:
    deg, unpaired = degeneracy_error(params)
    kb_bound, kb_scatter = kinetic_balance_errors(params)
    return [Check("bound", "degeneracy", deg, 1e-15),
            Check("bound", "unpaired_count", float(abs(unpaired - 2)), 0.0),
            Check("bound", "diagonalization", diagonalization_error(params), 1e-12),
            Check("bound", "coupling_vanishes", bound_coupling_error(params), 1e-10),
            Check("bound", "ode_residual", bound_ode_error(params), 1e-6),
            Check("bound", "kinetic_balance_bound", kb_bound, 1e-6),
            Check("bound", "kinetic_balance_basis", kb_scatter, 1e-6)]


# ---------------------------------------------------------------------------
# scatter
# ---------------------------------------------------------------------------

SCATTER_ENERGIES = (1.1, 1.25, 2.0, -1.5)


def recursion_residual(params: ModelParams, eps: float, alpha: float = 1.0, n_max: int = 60) -> float:
    """Scale-invariant residual of the three-term recursion for the f_n."""
    f = scatter.expansion_coefficients(params, eps, alpha, n_max + 2)
    bp = scatter.balanced_basis(params, eps, alpha)
    worst = 0.0
    for n in range(n_max + 1):
        d, lo, hi = tridiag.recursion_coefficients(params, bp, eps, n)
        prev = f[n - 1] if n else 0.0
        terms = (d * f[n], lo * prev, hi * f[n + 1])
        worst = max(worst, abs(terms[0] - terms[1] - terms[2]) / sum(abs(t) for t in terms))
    return worst


def suite_scatter(params: ModelParams, **_) -> list[Check]:
    # energies are mirrored for the sign-flipped problem, which maps b -> 1 - b
    worst = max(recursion_residual(pm, pm.sign * params.sign * e)
                for pm in (params, params.flipped()) for e in SCATTER_ENERGIES)
    return [Check("scatter", "coefficient_recursion", worst, 1e-9)]


# ---------------------------------------------------------------------------
# limits
# ---------------------------------------------------------------------------

def nonrel_binding_order(params: ModelParams, lambdas=(1e-2, 1e-3)):
    """Measured order of (eps_n - 1)/lc^2 -> -w^2 (xi/w - n)^2 / 2 for each bound A > 0 level.

    Returns the smallest order over the levels n < xi/w.
    """
    w, xi = params.omega, params.xi
    pm0 = ModelParams(abs(params.A), w, xi, lambdas[0])
    levels = [n for n in range(int(math.ceil(xi / w))) if xi / w - n > 0]
    orders = []
    for n in levels:
        errs = []
        for lc in lambdas:
            pm = ModelParams(pm0.A, w, xi, lc)
            st = next(s for s in bound.spectrum(pm) if s.n == n and s.branch == bound.PLUS)
            limit = -0.5 * w * w * (xi / w - n) ** 2
            errs.append(abs(bound.binding_energy(pm, st) - limit))
        orders.append(math.log(errs[0] / errs[1]) / math.log(lambdas[0] / lambdas[1]))
    return min(orders) if orders else math.inf


def nonrel_series_errors(params: ModelParams, E: float = 0.3, alpha: float = 1.0, n_terms: int = 32,
                         lambdas=(1e-1, 1e-2, 1e-3)) -> list:
    """Relative max difference between the relativistic and nonrelativistic series."""
    x = np.linspace(-2.0, 6.0, 41)
    out = []
    for lc in lambdas:
        pm = ModelParams(params.A, params.omega, params.xi, lc)
        eps = 1 + lc * lc * E
        rel = scatter.wavefunction(pm, eps, alpha, n_terms, x).upper
        nr = scatter.nonrel_series(pm, E, alpha, n_terms, x)
        out.append(_rel(rel, nr))
    return out


def suite_limits(params: ModelParams, **_) -> list[Check]:
    errs = nonrel_series_errors(params)
    monotone = all(b < a for a, b in zip(errs, errs[1:]))
    return [Check("limits", "binding_energy_order", nonrel_binding_order(params), 1.9, at_least=True),
            Check("limits", "series_convergence", errs[-1] if monotone else math.inf, 1e-5)]


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def shooting_mismatch(params: ModelParams, window=(0.01, 0.99)):
    """(worst |delta eps|, spurious count, node errors) against the valid closed-form states."""
    res = oracle.shoot_spectrum(params, window)
    ref = [s for s in bound.valid_states(params) if window[0] < s.epsilon < window[1]]
    if len(ref) != len(res.energies):
        return math.inf, abs(len(ref) - len(res.energies)), math.inf
    ref.sort(key=lambda s: s.epsilon)
    delta = max((abs(s.epsilon - e) for s, e in zip(ref, res.energies)), default=0.0)
    nodes = sum(abs(s.n - k) for s, k in zip(ref, res.node_counts))
    return delta, 0, nodes


def suite_oracle(params: ModelParams, **_) -> list[Check]:
    window = (0.01, 0.99) if params.A > 0 else (-0.99, -0.01)
    delta, spurious, nodes = shooting_mismatch(params, window)
    return [Check("oracle", "shooting_agreement", delta, 1e-6),
            Check("oracle", "spurious_states", float(spurious), 0.0),
            Check("oracle", "node_counts", float(nodes), 0.0)]


_RUNNERS: dict[str, Callable[..., list[Check]]] = {
    "laguerre": suite_laguerre,
    "cdh": suite_cdh,
    "tridiag": suite_tridiag,
    "bound": suite_bound,
    "scatter": suite_scatter,
    "limits": suite_limits,
    "oracle": suite_oracle,
}


def run(params: ModelParams, only=None, zeta_shift: float = 0.0) -> list[Check]:
    """Run the selected suites (all by default) in fixed order."""
    names = SUITES if not only else [s for s in SUITES if s in set(only)]
    unknown = set(only or ()) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(sorted(unknown))}")
    checks: list[Check] = []
    for name in names:
        checks.extend(_RUNNERS[name](params, zeta_shift=zeta_shift))
    return checks
