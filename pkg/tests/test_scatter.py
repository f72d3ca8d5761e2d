from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracmorse import oracle, scatter, verify
from diracmorse.errors import DomainError, PoleError, ThresholdDivergence, WeightRegimeWarning
from diracmorse.model import ModelParams, x_of_z
from diracmorse.specfun import CDHArgs, cdh_recursion, cdh_recursion_scaled

EXAMPLE = ModelParams(2.0, 0.5, 0.8, 1.0)


def test_balanced_parameters():
    mu, tau = scatter.balanced_params(EXAMPLE, 1.25)
    assert mu == pytest.approx(1.6) and tau == pytest.approx(0.25 / 1.85)
    with pytest.raises(PoleError):
        scatter.balanced_params(EXAMPLE, -0.6)


def test_dual_hahn_arguments():
    a = scatter.cdh_args_of_energy(EXAMPLE, 1.25, 1.0)
    assert (a.lam, a.a) == (1.0, 1.0)
    assert a.b == pytest.approx(-0.8 * 1.25 / 0.3)
    assert a.y2 == pytest.approx((1.25 ** 2 - 1) / 0.25)
    n = scatter.cdh_args_of_energy(EXAMPLE.flipped(), 1.25, 1.0)
    assert n.b == pytest.approx(1 + 0.8 * 1.25 / 0.3)


def test_coefficients_start_and_values():
    f = scatter.expansion_coefficients(EXAMPLE, 1.25, 1.0, 4)
    # alpha = 1: sqrt(Gamma(n+2)/n!) = sqrt(n+1)
    s = cdh_recursion(CDHArgs(1.0, 1.0, -0.8 * 1.25 / 0.3, 2.25), 3)
    np.testing.assert_allclose(f, np.sqrt(np.arange(1, 5)) * s, rtol=1e-14)
    assert f[0] == 1.0


@pytest.mark.parametrize("eps", [0.5, 1.0, -1.0])
def test_scattering_regime_required(eps):
    with pytest.raises(DomainError):
        scatter.expansion_coefficients(EXAMPLE, eps, 1.0, 4)


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("eps", [1.1, 1.25, 2.0, -1.5])
def test_coefficients_satisfy_three_term_recursion(sign, eps):
    P = ModelParams(sign * 2.0, 0.5, 0.8, 1.0)
    eps = sign * eps  # mirrored energies keep clear of degenerate b for A < 0
    assert verify.recursion_residual(P, eps, alpha=1.0, n_max=60) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.2, 4.0), eps=st.floats(1.02, 5.0), sign=st.sampled_from([1, -1]))
def test_recursion_residual_property(alpha, eps, sign):
    P = ModelParams(sign * 2.0, 0.5, 0.8, 1.0)
    b = scatter.cdh_args_of_energy(P, eps, alpha).b
    if min(abs(n + alpha + b) for n in range(45)) < 1e-3:
        return
    assert verify.recursion_residual(P, eps, alpha, n_max=40) <= 1e-9


def test_threshold_divergence():
    with pytest.raises(ThresholdDivergence):
        scatter.dy_de(EXAMPLE, 1.0 + 1e-14)
    assert scatter.dy_de(EXAMPLE, 1.25) == pytest.approx(1.25 / (0.5 * 0.75))
    assert scatter.dy_de(EXAMPLE, -1.25) < 0


def test_normalization_regimes():
    # A > 0, eps > 1 gives b < 0: formal weight with a warning
    with pytest.warns(WeightRegimeWarning):
        n_pos = scatter.normalization(EXAMPLE, 1.25, 1.0)
    assert math.isfinite(n_pos) and n_pos > 0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        n_neg = scatter.normalization(EXAMPLE, -1.5, 1.0)
    assert n_neg > 0


def test_solve_record():
    sol = scatter.solve(EXAMPLE.flipped(), 1.5, 1.2, 10, normalize=True)
    assert sol.n_terms == 10 and sol.coefficients.shape == (10,)
    assert not sol.coefficients.flags.writeable
    assert sol.normalization > 0
    assert sol.cdh.lam == 1.2
    tail = sol.tail_estimate(EXAMPLE.flipped(), np.array([0.0, 1.0]))
    assert tail.shape == (2,) and np.all(tail >= 0)


def test_wavefunction_components_and_normalize():
    x = np.linspace(-1, 4, 7)
    plain = scatter.wavefunction(EXAMPLE, -1.5, 1.0, 16, x)
    scaled = scatter.wavefunction(EXAMPLE, -1.5, 1.0, 16, x, normalize=True)
    nrm = scatter.normalization(EXAMPLE, -1.5, 1.0)
    np.testing.assert_allclose(scaled.upper, nrm * plain.upper, rtol=1e-14)
    np.testing.assert_allclose(scaled.lower, nrm * plain.lower, rtol=1e-14)


def test_truncated_series_is_not_pointwise_convergent():
    # the plain partial sums do not settle: residuals are O(1) and not monotone in n_terms
    x = x_of_z(EXAMPLE, np.linspace(10, 1, 300))
    res = []
    for n in (8, 16, 32, 64):
        fn = lambda t, n=n: scatter.wavefunction(EXAMPLE, 1.25, 1.0, n, t).upper
        res.append(float(np.max(oracle.ode_residual_profile(EXAMPLE, 1.25, fn, x))))
    assert min(res) > 0.1
    assert not all(b < a for a, b in zip(res, res[1:]))


def test_riesz_means_converge_to_the_ode_solution():
    eps = 1.25
    g = oracle.Grid(float(x_of_z(EXAMPLE, 60.0)), float(x_of_z(EXAMPLE, 0.5)), 8001)
    ref_sol = oracle.integrate_ode(EXAMPLE, eps, g, 0.0, 1.0)
    mask = (g.x >= x_of_z(EXAMPLE, 10.0)) & (g.x <= x_of_z(EXAMPLE, 1.0))
    xs, ref = g.x[mask], ref_sol.phi[mask]
    errs = []
    for n in (32, 128, 512, 2048):
        s = scatter.wavefunction(EXAMPLE, eps, 1.0, n, xs, cesaro=2).upper
        c = (s @ ref) / (s @ s)
        errs.append(float(np.max(np.abs(c * s - ref)) / np.max(np.abs(ref))))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 5e-3


def test_nonrelativistic_series_limit():
    errs = verify.nonrel_series_errors(EXAMPLE)
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-5
    with pytest.raises(DomainError):
        scatter.nonrel_series(EXAMPLE, 0.0, 1.0, 4, 0.0)


def test_nonrel_limit_parameters():
    assert scatter.nonrel_limit_params(EXAMPLE) == (2.5, 0.8)
    assert scatter.nonrel_limit_params(EXAMPLE.flipped()) == (2.5, -1.3)


def test_chebyshev_tail_from_energy():
    r = [scatter.chebyshev_tail(EXAMPLE, 1.25, 1.0, N, 20) for N in (100, 200)]
    assert all(math.isfinite(v) for v in r)


def test_coefficient_sign_change_spacing_tracks_arccos():
    # near a fixed large n, S_n oscillates like cos(n arccos u + phase) with
    # u = 1 - y^2/(2 n^2), so sign changes are pi/arccos(u) apart
    for y, n0 in ((300.0, 1000), (500.0, 3000)):
        vals, _ = cdh_recursion_scaled(CDHArgs(1.0, 1.0, 2.0, y * y), n0 - 200, n0 + 200)
        expected = math.pi / math.acos(1 - y * y / (2 * n0 ** 2))
        assert scatter.sign_change_spacing(vals) == pytest.approx(expected, rel=0.03)
    assert scatter.sign_change_spacing([1.0, 2.0]) == math.inf
