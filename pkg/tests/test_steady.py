import math
import time

import numpy as np
import pytest

from conftest import coupled
from twobath.errors import ClosedFormMismatch, InvalidParameter, UnstableSystem
from twobath.gaussian import log_negativity, mode_swap, partial_transpose, symplectic_spectrum
from twobath.model import SystemParams
from twobath.oracle import lyapunov_steady, moment_ode
from twobath.steady import (
    ClosedFormWarning,
    SteadyMoments,
    adjudicate,
    closed_form_log_negativity,
    closed_form_symplectic,
    critical_temperature_curve,
    critical_temperature_equilibrium,
    log_negativity_weak,
    oracle_steady_moments,
    printed_steady_moments,
    steady_log_negativity,
    steady_state_covariance,
    steady_symplectic_weak,
    symplectic_weak,
)

TC_ALPHA1 = 1 / (2 * math.atanh(1 / math.sqrt(2)))


def weak(T1, T2, kappa=-1.0, gamma=0.01):
    return coupled(T1=T1, T2=T2, kappa=kappa, gamma1=gamma, gamma2=gamma, regime="weak")


def test_moments_covariance_round_trip():
    m = SteadyMoments(1.0, 2.0, 3.0, 4.0, 0.5, -0.25)
    assert SteadyMoments.from_covariance(m.covariance()) == m
    g = m.covariance()
    assert g[0, 3] == -0.5 and g[1, 2] == 0.5 and g[1, 3] == 0


def test_printed_moments_against_oracle():
    # momentum variances agree; the position moments and <x1 p2> do not
    p = coupled(gamma1=0.02, gamma2=0.005, T1=1.5, T2=0.5)
    printed, oracle = printed_steady_moments(p), oracle_steady_moments(p)
    assert printed.pp1 == pytest.approx(oracle.pp1, rel=1e-10)
    assert printed.pp2 == pytest.approx(oracle.pp2, rel=1e-10)
    # <x_i^2> printed without the 1/m, <x1 x2> with flipped sign, <x1 p2> as 0
    assert printed.xx1 / p.m == pytest.approx(oracle.xx1, rel=1e-10)
    assert printed.xx2 / p.m == pytest.approx(oracle.xx2, rel=1e-10)
    assert -printed.x1x2 == pytest.approx(oracle.x1x2, rel=1e-10)
    assert printed.x1p2 == 0


@pytest.mark.parametrize("g1, g2, T1, T2", [(0.01, 0.01, 1, 0.25), (0.02, 0.005, 1.5, 0.5), (0.3, 0.1, 2, 7)])
def test_x1p2_closed_form(g1, g2, T1, T2):
    # derived from the stationary moment equations; checked against the Lyapunov solve
    p = coupled(gamma1=g1, gamma2=g2, T1=T1, T2=T2)
    w, k = p.omega0, p.kappa
    expected = g1 * g2 * k * (T2 - T1) / ((g1 + g2) * (g1 * g2 * w**2 + k**2))
    assert oracle_steady_moments(p).x1p2 == pytest.approx(expected, rel=1e-10)


def test_adjudication_report():
    report = adjudicate(coupled())
    assert report.mismatched == ["xx1", "xx2", "x1x2", "x1p2"]
    assert report["pp1"].matches
    assert report["x1p2"].oracle == pytest.approx(0.0037496250374962, rel=1e-10)
    assert set(report.as_dict()) == {"xx1", "xx2", "pp1", "pp2", "x1x2", "x1p2"}


def test_validation_modes():
    p = coupled()
    with pytest.warns(ClosedFormWarning, match="xx1"):
        g = steady_state_covariance(p)
    np.testing.assert_allclose(g, lyapunov_steady(moment_ode(p)), rtol=1e-12, atol=1e-14)
    with pytest.raises(ClosedFormMismatch) as info:
        steady_state_covariance(p, validate="strict")
    assert "x1p2" in info.value.mismatches
    np.testing.assert_array_equal(steady_state_covariance(p, validate="off"), printed_steady_moments(p).covariance())
    with pytest.raises(InvalidParameter):
        steady_state_covariance(p, validate="sometimes")


def test_decoupled_equipartition():
    T = 0.8
    p = SystemParams(m=1, omega0=1, kappa=0.0, gamma1=0.05, gamma2=0.05, T1=T, T2=T)
    mom = SteadyMoments.from_covariance(steady_state_covariance(p, validate="strict"))
    assert mom.x1x2 == 0
    assert mom.pp1 == pytest.approx(T, rel=1e-12)
    assert mom.x1p2 == 0


def test_symmetric_baths_no_current():
    mom = oracle_steady_moments(coupled(T1=0.7, T2=0.7))
    assert abs(mom.x1p2) < 1e-14
    assert min(mom.xx1, mom.xx2, mom.pp1, mom.pp2) > 0


def test_preconditions():
    with pytest.raises(InvalidParameter):
        steady_state_covariance(SystemParams(m=2, omega0=1, kappa=-1, T1=1, T2=1))


@pytest.mark.parametrize("T", [5.0, 10.0])
def test_equilibrium_spectrum_high_t(T):
    p = coupled(T1=T, T2=T, gamma1=1e-4, gamma2=1e-4)
    with pytest.warns(ClosedFormWarning):
        nu = symplectic_spectrum(partial_transpose(steady_state_covariance(p))).nu
    alpha = p.alpha
    expected = sorted([2 * T / math.sqrt(1 + alpha), 2 * T / math.sqrt(1 - alpha)], reverse=True)
    np.testing.assert_allclose(nu, expected, rtol=1e-5)


def test_label_swap_steady():
    p = coupled(gamma1=0.02, gamma2=0.006, T1=0.4, T2=1.7)
    g = steady_state_covariance(p, validate="off")
    gs = steady_state_covariance(p.swapped(), validate="off")
    np.testing.assert_allclose(mode_swap(g), gs, rtol=0, atol=1e-12 * np.max(np.abs(g)))
    with pytest.warns(ClosedFormWarning):
        g = steady_state_covariance(p)
        gs = steady_state_covariance(p.swapped())
    np.testing.assert_allclose(mode_swap(g), gs, rtol=0, atol=1e-12 * np.max(np.abs(g)))


def test_symplectic_weak_limits():
    # T -> 0: coth -> 1
    lp, lm = symplectic_weak(1.0, 0.5, 0.0, 0.0)
    assert lp == pytest.approx(1 / math.sqrt(1.5), rel=1e-15)
    assert lm == pytest.approx(1 / math.sqrt(0.5), rel=1e-15)
    # high T: 2 (T/omega) / sqrt(1 +- alpha)
    T = 1e5
    lp, lm = symplectic_weak(1.0, -0.5, T, T)
    assert lp == pytest.approx(2 * T / math.sqrt(0.5), rel=1e-9)
    assert lm == pytest.approx(2 * T / math.sqrt(1.5), rel=1e-9)


def test_low_temperature_negativity():
    lp, _ = symplectic_weak(1.0, 1.0, 0.01, 0.01)
    assert lp == pytest.approx(0.70711, abs=1e-5)
    start = time.perf_counter()
    value = log_negativity_weak(1.0, 1.0, 0.01, 0.01)
    assert time.perf_counter() - start < 1e-3
    assert abs(value - 1.0) < 1e-3
    # log2(1 + |alpha|) at low temperature
    assert log_negativity_weak(1.0, 0.4, 0.01, 0.02) == pytest.approx(math.log2(1.4), abs=1e-9)


def test_alpha_domain():
    with pytest.raises(UnstableSystem):
        symplectic_weak(1.0, 1.2, 0.1, 0.1)
    with pytest.raises(UnstableSystem):
        log_negativity_weak(1.0, -1.5, 0.1, 0.1)
    # |alpha| = 1 is the edge of stability; lambda_- diverges there
    assert symplectic_weak(1.0, 1.0, 0.1, 0.1)[1] == math.inf


def test_steady_functions_need_weak_regime():
    with pytest.raises(InvalidParameter):
        steady_log_negativity(coupled())
    with pytest.raises(InvalidParameter):
        steady_symplectic_weak(coupled())


def test_closed_form_dispatch():
    hot = coupled(T1=3, T2=5)
    lp, lm = closed_form_symplectic(hot)
    assert lp == pytest.approx(8 / math.sqrt(0.5))
    assert lm == pytest.approx(8 / math.sqrt(1.5))
    cold = weak(0.1, 0.2)
    assert closed_form_log_negativity(cold) == steady_log_negativity(cold)
    assert closed_form_symplectic(cold) == steady_symplectic_weak(cold)


def test_hot_baths_not_entangled():
    assert steady_log_negativity(weak(1.0, 4.0)) == 0.0
    assert closed_form_log_negativity(coupled(T1=1.0, T2=4.0)) == 0.0


def test_cold_baths_small_alpha():
    # T1 = 1/10, T2 = 1/8: entangled already at very small |alpha|
    for alpha in (0.01, 0.05, -0.02):
        assert log_negativity_weak(1.0, alpha, 0.1, 0.125) > 0
    assert log_negativity_weak(1.0, 0.0, 0.1, 0.125) == 0.0


def test_critical_temperature_equilibrium():
    start = time.perf_counter()
    tc = critical_temperature_equilibrium(1.0, 1.0)
    assert time.perf_counter() - start < 1e-3
    assert abs(tc - 0.5686) <= 0.005
    assert tc == pytest.approx(TC_ALPHA1, rel=1e-15)
    assert critical_temperature_equilibrium(2.0, 1.0) == pytest.approx(2 * tc, rel=1e-15)
    assert critical_temperature_equilibrium(1.0, -0.3) == critical_temperature_equilibrium(1.0, 0.3)
    assert critical_temperature_equilibrium(1.0, 1e-8) < 0.1
    with pytest.warns(UserWarning, match="alpha = 0"):
        assert critical_temperature_equilibrium(1.0, 0.0) == 0.0
    with pytest.raises(InvalidParameter):
        critical_temperature_equilibrium(0.0, 0.5)


@pytest.mark.parametrize("alpha", [0.1, 0.5, -0.8])
def test_boundary_consistency(alpha):
    tc = critical_temperature_equilibrium(1.0, alpha)
    p = weak(tc, tc, kappa=alpha * 2.0)
    assert steady_log_negativity(p) <= 1e-10
    assert steady_log_negativity(weak(0.98 * tc, 0.98 * tc, kappa=alpha * 2.0)) > 0


def test_critical_curve():
    t2 = critical_temperature_curve(1.0, 1.0, 0.0)
    # derived: coth(1/2 T2) = 2 sqrt(2) - 1
    assert abs(1 / math.tanh(1 / (2 * t2)) - (2 * math.sqrt(2) - 1)) < 1e-10
    assert t2 == pytest.approx(0.8143672777514634, rel=1e-10)
    tc = critical_temperature_equilibrium(1.0, 0.6)
    assert critical_temperature_curve(1.0, 0.6, tc) == pytest.approx(tc, rel=1e-10)
    assert critical_temperature_curve(1.0, 0.6, 5.0) is None
    # the curve ends on the T2 = 0 axis at T1 = critical T2(T1 = 0)
    assert critical_temperature_curve(1.0, 1.0, t2) == 0.0


def test_critical_curve_is_boundary():
    alpha = 0.7
    for T1 in (0.05, 0.2, 0.4):
        T2 = critical_temperature_curve(1.0, alpha, T1)
        p = weak(T1, T2, kappa=2 * alpha)
        assert steady_log_negativity(p) <= 1e-10
        assert steady_log_negativity(weak(T1, 0.95 * T2, kappa=2 * alpha)) > 0


def test_monotone_in_temperatures():
    alpha = 0.5
    tc = critical_temperature_equilibrium(1.0, alpha)
    grid = np.linspace(2 * tc / 20, 2 * tc, 20)
    L = np.array([[log_negativity_weak(1.0, alpha, a, b) for b in grid] for a in grid])
    assert np.all(np.diff(L, axis=0) <= 0)
    assert np.all(np.diff(L, axis=1) <= 0)
    assert L[0, 0] > 0 and L[-1, -1] == 0


def test_gamma_robustness():
    # closed form is exact to first order in gamma: deviations scale as gamma^2
    devs = []
    for gamma in (1e-4, 1e-3):
        p = weak(0.3, 0.2, gamma=gamma)
        nu = symplectic_spectrum(partial_transpose(lyapunov_steady(moment_ode(p)))).nu
        lp, lm = steady_symplectic_weak(p)
        devs.append(max(abs(nu[0] - max(lp, lm)), abs(nu[1] - min(lp, lm))))
    assert 50 <= devs[1] / devs[0] <= 200


def test_closed_form_matches_lyapunov_log_negativity():
    p = weak(0.15, 0.25, gamma=1e-4)
    ln = log_negativity(lyapunov_steady(moment_ode(p)))
    assert ln == pytest.approx(steady_log_negativity(p), abs=1e-6)
