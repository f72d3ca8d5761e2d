from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracmorse import bound, oracle, tridiag, verify
from diracmorse.bound import MINUS, PLUS
from diracmorse.errors import DomainError, NoPartnerError
from diracmorse.model import ModelParams, kinetic_balance_apply, x_of_z, z_of_x

EXAMPLE = ModelParams(2.0, 0.5, 0.8, 1.0)
MANY = ModelParams(1.5, 0.5, 6.0, 0.1)  # fifteen normalizable levels

# closed-form energies evaluated with mpmath at 50 digits
EXAMPLE_ENERGIES = {
    (0, PLUS): 0.6, (0, MINUS): -0.6,
    (1, PLUS): 0.8123635208501673, (1, MINUS): -0.33236352085016735,
    (2, PLUS): 0.96, (2, MINUS): 0.0,
    (3, PLUS): 0.9815339366124405, (3, MINUS): 0.45846606338755946,
}
NEGATIVE_ENERGIES = {
    (0, PLUS): 0.33236352085016735, (0, MINUS): -0.8123635208501673,
    (1, PLUS): 0.0, (1, MINUS): -0.96,
    (2, PLUS): -0.45846606338755946, (2, MINUS): -0.9815339366124405,
}


def params_strategy():
    @st.composite
    def draw(d):
        s = d(st.floats(0.05, 0.95))
        w = d(st.floats(0.2, 3.0))
        v = d(st.floats(1.05, 9.0))
        lc = 1.0 / (v * math.sqrt(1 - s * s) * w)
        A = d(st.sampled_from([-1, 1])) * d(st.floats(0.1, 10.0))
        return ModelParams(A, w, s / lc, lc)
    return draw()


def test_example_spectrum():
    assert bound.n_max(EXAMPLE) == 3
    states = bound.spectrum(EXAMPLE)
    assert len(states) == 8
    for s in states:
        assert s.epsilon == pytest.approx(EXAMPLE_ENERGIES[(s.n, s.branch)], rel=1e-15, abs=1e-16)
    # the n = 0 levels are +/- C exactly
    assert bound.energy(EXAMPLE, 0, PLUS) == EXAMPLE.C
    assert bound.energy(EXAMPLE, 0, MINUS) == -EXAMPLE.C


def test_example_validity():
    valid = {(s.n, s.branch) for s in bound.valid_states(EXAMPLE)}
    assert valid == {(0, PLUS), (1, PLUS), (2, PLUS)}
    s3 = next(s for s in bound.spectrum(EXAMPLE) if (s.n, s.branch) == (3, PLUS))
    assert s3.alpha_n == pytest.approx(-0.382576169, abs=1e-9) and not s3.valid


def test_negative_A_spectrum():
    P = EXAMPLE.flipped()
    states = bound.spectrum(P)
    assert len(states) == 6
    for s in states:
        assert s.epsilon == pytest.approx(NEGATIVE_ENERGIES[(s.n, s.branch)], rel=1e-15, abs=1e-16)
    assert {(s.n, s.branch) for s in bound.valid_states(P)} == {(0, MINUS), (1, MINUS)}


@settings(max_examples=60, deadline=None)
@given(P=params_strategy())
def test_negative_A_matches_its_own_closed_form(P):
    # the A < 0 energies are built by negation; compare with the direct expression
    if P.A > 0:
        P = P.flipped()
    lc, C, w, xi = P.lambda_c, P.C, P.omega, P.xi
    for s in bound.spectrum(P):
        m = s.n + 1
        t = lc * C * w * m
        direct = C * (-lc * lc * xi * w * m + s.branch * math.sqrt(max(0.0, (1 - t) * (1 + t))))
        assert s.epsilon == pytest.approx(direct, rel=1e-14, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(P=params_strategy())
def test_alpha_relation_and_sign_rules(P):
    for s in bound.spectrum(P):
        # at a bound state y^2 = -alpha^2, i.e. alpha_n = sqrt(1 - eps^2)/(lc w)
        if s.valid:
            assert s.alpha_n == pytest.approx(math.sqrt(max(0.0, 1 - s.epsilon ** 2)) / (P.lambda_c * P.omega),
                                              rel=1e-8, abs=1e-8)
        # minus branch for A > 0 and plus branch for A < 0 are never normalizable
        if s.branch == -P.sign:
            assert not s.valid


@settings(max_examples=60, deadline=None)
@given(P=params_strategy())
def test_degeneracy_relation(P):
    deg, unpaired = verify.degeneracy_error(P)
    assert deg == 0.0
    assert unpaired == 2


def test_degeneracy_partner_examples():
    neg = EXAMPLE.flipped()
    s = next(s for s in bound.spectrum(neg) if (s.n, s.branch) == (0, MINUS))
    partner = bound.degeneracy_partner(neg, s)
    assert (partner.n, partner.branch, partner.a_sign) == (1, PLUS, 1)
    assert partner.epsilon == -s.epsilon
    for br in (PLUS, MINUS):
        with pytest.raises(NoPartnerError):
            bound.degeneracy_partner(EXAMPLE, bound.spectrum(EXAMPLE)[0 if br == PLUS else 1])


@settings(max_examples=60, deadline=None)
@given(P=params_strategy())
def test_diagonalization_spectrum_matches_closed_form(P):
    # where the two branches merge (lc C w (n+1) -> 1) the quadratic has a double
    # root and its roots lose half the digits; keep clear of that edge
    t = P.lambda_c * P.C * P.omega
    if min(abs(1 - (t * (n + 1)) ** 2) for n in range(bound.n_max(P) + 2)) < 1e-6:
        return
    assert verify.diagonalization_error(P) <= 1e-12


def test_diagonalization_near_branch_merge_loses_half_the_digits():
    P = ModelParams(-1.0, 1.0, 0.9921567416492215, 0.7559289460184544)  # lc C w = 1/2
    err = verify.diagonalization_error(P)
    assert 1e-12 < err <= 1e-7


def test_n_max_guard_for_exact_integer():
    # 1/(lc C w) = 2 exactly in real arithmetic
    P = ModelParams(1.0, 0.5, 0.48, 1.25)
    assert P.lambda_c * P.C * P.omega == pytest.approx(0.5)
    assert bound.n_max(P) == 2


def test_binding_energy_without_cancellation():
    # (eps - 1)/lc^2 for n = 1, plus branch; mpmath at 50 digits
    for lc, ref in ((1e-3, -0.04500006701254455), (1e-5, -0.04500000000670126)):
        P = ModelParams(2.0, 0.5, 0.8, lc)
        s = next(s for s in bound.spectrum(P) if (s.n, s.branch) == (1, PLUS))
        assert bound.binding_energy(P, s) == pytest.approx(ref, rel=1e-12)


def test_nonrelativistic_binding_order():
    assert verify.nonrel_binding_order(EXAMPLE) >= 1.9


def _upper(P, st):
    return lambda t: bound.bound_spinor(P, st, z_of_x(P, t)).upper


@pytest.mark.parametrize("P", [EXAMPLE, EXAMPLE.flipped(), MANY], ids=["A>0", "A<0", "many"])
def test_bound_states_solve_the_ode(P):
    x = x_of_z(P, np.linspace(0.5, 20, 150))
    for st in bound.valid_states(P):
        res = oracle.ode_residual_profile(P, st.epsilon, _upper(P, st), x)
        assert np.max(res) <= 1e-7, (st, np.max(res))


def test_basis_index_2a_minus_1_fails_beyond_ground_state():
    # with L_n^{2 alpha_n - 1} (the basis function at alpha = alpha_n) only n = 0 solves the ODE
    x = x_of_z(EXAMPLE, np.linspace(0.5, 20, 150))
    for st in bound.valid_states(EXAMPLE):
        bp = tridiag.BasisParams.for_model(EXAMPLE, st.alpha_n, 1.6, 0.5)
        fn = lambda t, st=st, bp=bp: tridiag.phi_basis(EXAMPLE, bp, st.n, z_of_x(EXAMPLE, t))
        res = np.max(oracle.ode_residual_profile(EXAMPLE, st.epsilon, fn, x))
        if st.n == 0:
            assert res <= 1e-7
        else:
            assert res > 1e-2


@pytest.mark.parametrize("P", [EXAMPLE, EXAMPLE.flipped(), MANY], ids=["A>0", "A<0", "many"])
def test_bound_lower_component_is_kinetic_balance_image(P):
    z = np.linspace(0.5, 20, 80)
    x = x_of_z(P, z)
    for st in bound.valid_states(P):
        ana = bound.bound_spinor(P, st, z).lower
        num = kinetic_balance_apply(P, st.epsilon, _upper(P, st), x)
        assert np.max(np.abs(num - ana)) <= 1e-6 * np.max(np.abs(ana))


def test_bound_state_is_finite_null_vector_of_the_matrix():
    # the eigenvector has components sqrt(Gamma(k+2a)/k!) for k <= n and zero beyond
    for P in (EXAMPLE, EXAMPLE.flipped(), MANY):
        for st in bound.valid_states(P):
            bp = verify.bound_basis(P, st)
            size = st.n + 3
            M = np.array([[tridiag.matrix_element_analytic(P, bp, st.epsilon, i, j)
                           for j in range(size)] for i in range(size)])
            v = np.zeros(size)
            v[: st.n + 1] = [math.exp(-tridiag.log_norm(k, st.alpha_n, P.omega)) for k in range(st.n + 1)]
            scale = np.max(np.abs(M)) * np.max(np.abs(v))
            assert np.max(np.abs(M @ v)) <= 1e-10 * scale


def test_bound_spinor_rejects_bad_input():
    s3 = next(s for s in bound.spectrum(EXAMPLE) if (s.n, s.branch) == (3, PLUS))
    with pytest.raises(DomainError):
        bound.bound_spinor(EXAMPLE, s3, 1.0)
    s0 = bound.valid_states(EXAMPLE)[0]
    with pytest.raises(DomainError):
        bound.bound_spinor(EXAMPLE, s0, np.array([1.0, 0.0]))


def test_ground_state_normalization():
    # phi_0 = c_0 z^a e^{-z/2} integrates to 1 with dx = dz/(w z)
    from scipy.integrate import quad
    s0 = bound.valid_states(EXAMPLE)[0]
    val, _ = quad(lambda z: bound.bound_spinor(EXAMPLE, s0, z).upper ** 2 / (EXAMPLE.omega * z), 0, 80)
    assert val == pytest.approx(1.0, rel=1e-9)
