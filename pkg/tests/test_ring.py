import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motirr.errors import ConvergenceError
from motirr.ring import (
    RingParams,
    asymptotic_spectral_ratio,
    coupling_c,
    eta_curve,
    eta_limit,
    eta_limit_small_angle,
    eta_n,
    finesse,
    partial_amplitude,
    steady_eta,
)
from motirr.spectral import SourceSpec, make_grid

CW = SourceSpec.cw()

# Independent quadrature (scipy.integrate.quad over u, and the cosine series
# 1 - (1-R)/(1+R)(1 + 2 sum R^m exp(-m^2/4a^2))) agree on these to ~1e-12.
GOLDEN_LIMITS = {100: 0.0931575338345, 200: 0.0281689867292, 400: 0.00748678404497}


def brute_eta(R, n, a, points=4001):
    """Gaussian-weighted average of |B_n(u)|^2 summed term by term on a grid."""
    g = make_grid(a, points)
    w = np.exp(-((a * g.detuning) ** 2))
    b = partial_amplitude(n, R, g.detuning, method="loop")
    return g.integrate(np.abs(b) ** 2 * w) / g.integrate(w)


# coupling and steady state


def test_coupling_matched_is_one():
    for alpha in (1e-4, 0.0015, 0.1, 1.0):
        assert coupling_c(math.exp(-alpha), alpha) == pytest.approx(1.0, abs=1e-12)


def test_coupling_lossless_is_zero():
    assert coupling_c(0.3, 0.0) == 0.0
    assert coupling_c(0.999, 0.0) == 0.0


def test_coupling_hand_value():
    expected = (1 - math.exp(-0.003)) * (1 - 0.98**2) / (1 - math.exp(-0.0015) * 0.98) ** 2
    assert coupling_c(0.98, 0.0015) == pytest.approx(expected, rel=1e-13)
    assert coupling_c(0.98, 0.0015) == pytest.approx(0.2578, abs=1e-3)


def test_coupling_rejects_unit_reflectivity():
    with pytest.raises(ValueError):
        coupling_c(1.0, 0.1)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.9999), st.floats(0, 2))
def test_coupling_at_most_one(r, alpha):
    assert 0 <= coupling_c(r, alpha) <= 1 + 1e-12


def test_steady_eta_zero_when_matched_on_resonance():
    for alpha in (0.0005, 0.0015, 0.005):
        for delta in (0.0, 0.7678, -2.0):
            assert abs(steady_eta(RingParams.matched(alpha, delta))) < 1e-10


def test_steady_eta_off_resonance_tends_to_one():
    rp = RingParams.matched(0.0015)
    assert steady_eta(rp, math.pi) > 1 - 1e-5


def test_steady_eta_unmatched_on_resonance():
    rp = RingParams.on_resonance(0.98**2, 0.0015)
    assert steady_eta(rp) == pytest.approx(1 - coupling_c(0.98, 0.0015), abs=1e-12)
    assert steady_eta(rp) == pytest.approx(0.7422, abs=1e-3)


def test_finesse_definition():
    rp = RingParams(0.98**2, 0.0015)
    rho = math.exp(-0.0015) * 0.98
    assert rp.finesse == pytest.approx(math.pi * math.sqrt(rho) / (1 - rho))
    with pytest.raises(ValueError):
        finesse(1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.999), st.floats(0, 1), st.floats(-10, 10))
def test_steady_eta_range(R, alpha, det):
    rp = RingParams(R, alpha, 0.3, 0.1)
    eta = steady_eta(rp, det)
    assert max(0.0, 1 - rp.coupling) - 1e-12 <= eta <= 1.0


# round-trip amplitudes


def test_partial_amplitude_small_n():
    R = 0.98
    assert partial_amplitude(0, R, 0.3) == pytest.approx(-math.sqrt(R))
    assert partial_amplitude(1, R, 0.0) == pytest.approx(-(R**1.5), abs=1e-15)


@pytest.mark.parametrize("R", [0.0, 0.5, 0.9, 0.98, 0.9999])
def test_partial_amplitude_on_resonance_telescopes(R):
    for n in range(0, 300, 7):
        assert abs(partial_amplitude(n, R, 0.0, "loop") - (-math.sqrt(R) * R**n)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 400), st.floats(0, 0.9999), st.floats(-math.pi, math.pi))
def test_partial_amplitude_loop_equals_closed(n, R, psi):
    assert abs(partial_amplitude(n, R, psi, "loop") - partial_amplitude(n, R, psi, "closed")) < 1e-12


def test_partial_amplitude_tends_to_limit():
    R, psi = 0.9, 0.37
    b = partial_amplitude(2000, R, psi)
    assert abs(b) ** 2 == pytest.approx(asymptotic_spectral_ratio(R, psi), abs=1e-14)


def test_spectral_ratio_values():
    assert asymptotic_spectral_ratio(0.98, 0.0) == 0.0
    assert asymptotic_spectral_ratio(0.98, math.pi) == pytest.approx(1 - (0.02 / 1.98) ** 2, abs=1e-14)
    assert asymptotic_spectral_ratio(0.98, math.pi) == pytest.approx(0.9998980, abs=1e-7)
    np.testing.assert_array_equal(asymptotic_spectral_ratio(0.0, np.linspace(-3, 3, 11)), 0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.9999))
def test_spectral_ratio_forms_agree(R):
    psi = np.linspace(-math.pi, math.pi, 2001)
    a = asymptotic_spectral_ratio(R, psi, "amplitude")
    b = asymptotic_spectral_ratio(R, psi, "lorentzian")
    assert np.max(np.abs(a - b)) < 1e-12


# energy ratios


@pytest.mark.parametrize("R", [0.5, 0.98])
def test_eta_n_zero_is_R(R):
    assert eta_n(R, 0, CW) == R
    assert eta_n(R, 0, SourceSpec.pulse(200)) == R


def test_eta_n_cw_values():
    assert eta_n(0.98, 1, CW) == pytest.approx(0.941192, abs=1e-15)
    assert eta_n(0.98, 100, CW) == pytest.approx(0.98**201, abs=1e-15)
    assert eta_n(0.98, 100, CW) == pytest.approx(1.72e-2, abs=1e-4)


@pytest.mark.parametrize("R", [0.9, 0.98, 0.998])
@pytest.mark.parametrize("form", ["stable", "literal"])
def test_eta_n_cw_closed_form(R, form):
    for n in range(501):
        assert abs(eta_n(R, n, CW, form) - R ** (2 * n + 1)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.9999), st.integers(0, 600), st.floats(1, 1e4))
def test_eta_n_forms_agree(R, n, a):
    src = SourceSpec.pulse(a)
    assert eta_n(R, n, src, "stable") == pytest.approx(eta_n(R, n, src, "literal"), abs=1e-13)


def test_eta_n_large_n_underflow():
    assert eta_n(0.9, 5000, CW) == pytest.approx(0.0, abs=1e-300)
    assert eta_n(0.98, 50_000, SourceSpec.pulse(100)) == pytest.approx(GOLDEN_LIMITS[100], abs=1e-10)


@pytest.mark.parametrize("a", [100, 200, 400])
@pytest.mark.parametrize("n", [1, 2, 5, 17, 50])
@pytest.mark.parametrize("form", ["stable", "literal"])
def test_eta_n_matches_brute_force_spectrum(a, n, form):
    assert eta_n(0.98, n, SourceSpec.pulse(a), form) == pytest.approx(brute_eta(0.98, n, a), rel=1e-6)


def test_brute_force_is_grid_converged():
    assert brute_eta(0.98, 30, 100, 2001) == pytest.approx(brute_eta(0.98, 30, 100, 8001), rel=1e-12)


def test_pulse_ordering_smaller_a_reflects_more():
    vals = [eta_n(0.98, 400, SourceSpec.pulse(a)) for a in (100, 200, 400)]
    assert vals[0] > vals[1] > vals[2]


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.9999), st.integers(0, 2000), st.one_of(st.none(), st.floats(1, 1e4)))
def test_eta_n_in_unit_interval(R, n, a):
    src = CW if a is None else SourceSpec.pulse(a)
    assert 0.0 <= eta_n(R, n, src) <= 1.0


# asymptotic limit


@pytest.mark.parametrize("a", [100, 200, 400])
def test_eta_limit_golden(a):
    assert eta_limit(0.98, SourceSpec.pulse(a)) == pytest.approx(GOLDEN_LIMITS[a], abs=1e-10)


def test_eta_limit_a200_near_quoted_value():
    assert eta_limit(0.98, SourceSpec.pulse(200)) == pytest.approx(0.028, rel=0.1)


@pytest.mark.parametrize("a", [100, 200, 400])
def test_eta_limit_against_series(a):
    # eta_inf = 1 - (1-R)/(1+R) (1 + 2 sum R^m Phi(m)), from the Fourier series of the Lorentzian
    R = 0.98
    m = np.arange(1, 5000)
    s = math.fsum((R**m * np.exp(-(m**2) / (4 * a * a))).tolist())
    assert eta_limit(R, SourceSpec.pulse(a)) == pytest.approx(1 - (1 - R) / (1 + R) * (1 + 2 * s), abs=1e-11)


@pytest.mark.parametrize("a", [50, 100, 200, 400, 1000])
def test_eta_limit_small_angle_agrees(a):
    q = eta_limit(0.98, SourceSpec.pulse(a))
    assert eta_limit_small_angle(0.98, a) == pytest.approx(q, rel=1e-4)


def test_eta_limit_cw_is_zero():
    assert eta_limit(0.98, CW) == 0.0


def test_eta_limit_decreasing_in_a():
    vals = [eta_limit(0.98, SourceSpec.pulse(a)) for a in (100, 200, 400)]
    assert vals[0] > vals[1] > vals[2] > 0


def test_eta_limit_coarse_grid_fails():
    with pytest.raises(ConvergenceError):
        eta_limit(0.98, SourceSpec.pulse(200), make_grid(200, 5))


def test_eta_limit_narrow_grid_rejected():
    with pytest.raises(ValueError):
        eta_limit(0.98, SourceSpec.pulse(200), make_grid(200, 4001, 2))


@pytest.mark.parametrize("a", [100, 200, 400])
def test_convergence_to_limit(a):
    src = SourceSpec.pulse(a)
    lim = eta_limit(0.98, src)
    for n in (10 * a, 12 * a, 20 * a):
        assert abs(eta_n(0.98, n, src) - lim) < 1e-4


def test_cw_curve_ordering():
    Rs = (0.98, 0.99, 0.995, 0.997, 0.998)
    ns = range(0, 1001, 10)
    curves = np.array([eta_curve(R, ns, CW).eta_values for R in Rs])
    assert np.all(np.diff(curves, axis=1) < 0)
    assert np.all(np.diff(curves, axis=0) > 0)
