import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stokesdarcy.weights import (AnalysisParams, FrequencyBand, WeightPair,
                                 asymptotic_weights,
                                 endpoint_balanced_weights, frequency_band,
                                 k_star, minmax_oracle,
                                 mode_composition_oracle, optimal_weights,
                                 reduction_factor, rho_peak, rho_zeros)

CASE_A = AnalysisParams(mu_f=10.0, eta_p=4e-10)
CASE_B = AnalysisParams(mu_f=1.0, eta_p=4e-7)
CASE_C = AnalysisParams(mu_f=10.0, eta_p=4e-9)

positive = st.floats(min_value=1e-6, max_value=1e3, allow_nan=False)


# -- reduction factor --------------------------------------------------------

def test_zero_weights_give_unit_factor():
    w = WeightPair(0.0, 0.0)
    for k in (0.1, 1.0, 7.3, 500.0):
        assert reduction_factor(w, k, CASE_B) == 1.0


def test_quarter_weights_vanish_at_stationary_frequency():
    # sqrt(1/4) + sqrt(1/4) = 1 makes the interior maximum exactly zero
    w = WeightPair(0.25, 0.25)
    ks = k_star(w, CASE_B)
    assert reduction_factor(w, ks, CASE_B) == pytest.approx(0.0, abs=1e-15)


def test_case_b_level4_peak_value():
    # frozen from evaluating 1 - (sqrt(a_f) + sqrt(a_p))^2 at the
    # 3-digit reference weights of case (b), finest level
    w = WeightPair(5.78e-6, 9.06e-1)
    assert rho_peak(w) == pytest.approx(0.0894174613216, rel=1e-10)


def test_peak_equals_band_end_magnitudes_for_optimal_weights():
    band = frequency_band(0.5, 0.0125)
    w = optimal_weights(CASE_B, band)
    peak = rho_peak(w)
    assert peak == pytest.approx(0.08930111662358997, rel=1e-12)
    assert abs(reduction_factor(w, band.k_min, CASE_B)) == pytest.approx(
        peak, rel=1e-12)
    assert abs(reduction_factor(w, band.k_max, CASE_B)) == pytest.approx(
        peak, rel=1e-12)


def test_zero_frequency_rejected():
    with pytest.raises(ValueError, match="singular"):
        reduction_factor(WeightPair(0.1, 0.1), 0.0, CASE_B)


@settings(max_examples=200)
@given(k=st.floats(min_value=1e-3, max_value=1e4),
       alpha_f=positive, alpha_p=positive)
def test_factor_is_even_in_k(k, alpha_f, alpha_p):
    w = WeightPair(alpha_f, alpha_p)
    assert reduction_factor(w, k, CASE_B) == reduction_factor(w, -k, CASE_B)


def test_factor_vectorizes():
    k = np.geomspace(1.0, 100.0, 17)
    w = WeightPair(0.3, 0.4)
    vec = reduction_factor(w, k, CASE_B)
    assert vec.shape == (17,)
    assert vec[3] == reduction_factor(w, float(k[3]), CASE_B)


# -- optimal weights ---------------------------------------------------------

def test_reference_weights_case_a_level1():
    band = frequency_band(0.5, 0.1)
    w = optimal_weights(CASE_A, band)
    assert w.alpha_f == pytest.approx(9.97e-12, rel=5e-3)
    assert w.alpha_p == pytest.approx(1.00, rel=5e-3)


def test_reference_weights_case_b_level4():
    band = frequency_band(0.5, 0.0125)
    w = optimal_weights(CASE_B, band)
    assert w.alpha_f == pytest.approx(5.78e-6, rel=5e-3)
    assert w.alpha_p == pytest.approx(9.06e-1, rel=5e-3)


def test_stationary_frequency_is_band_geometric_mean():
    for params, h in ((CASE_A, 0.1), (CASE_B, 0.0125), (CASE_C, 0.05)):
        band = frequency_band(0.5, h)
        w = optimal_weights(params, band)
        assert k_star(w, params) == pytest.approx(
            math.sqrt(band.k_min * band.k_max), rel=1e-12)


def test_optimal_factor_bounded_below_one():
    band = frequency_band(0.5, 0.025)
    w = optimal_weights(CASE_C, band)
    k = np.geomspace(band.k_min, band.k_max, 100_000)
    rho = reduction_factor(w, k, CASE_C)
    assert np.max(np.abs(rho)) < 1.0
    assert np.max(np.abs(rho)) == pytest.approx(rho_peak(w), rel=1e-10)


def test_brute_force_search_confirms_closed_form():
    band = frequency_band(0.5, 0.1)
    w = optimal_weights(CASE_B, band)
    (w_grid, achieved) = minmax_oracle(CASE_B, band)
    k = np.geomspace(band.k_min, band.k_max, 10_000)
    formula_max = np.max(np.abs(reduction_factor(w, k, CASE_B)))
    grid_max = np.max(np.abs(reduction_factor(w_grid, k, CASE_B)))
    assert abs(formula_max - grid_max) <= 1e-4 * grid_max


def test_invalid_band_rejected():
    with pytest.raises(ValueError):
        optimal_weights(CASE_B, FrequencyBand(10.0, 1.0))


# -- stationary point and zeros ----------------------------------------------

def test_equal_weights_stationary_frequency():
    w = WeightPair(0.37, 0.37)
    assert k_star(w, CASE_B) == pytest.approx(
        (2.0 * CASE_B.mu_f * CASE_B.eta_p) ** -0.5, rel=1e-14)


def test_stationary_point_by_finite_differences():
    band = frequency_band(0.5, 0.05)
    w = optimal_weights(CASE_C, band)
    ks = k_star(w, CASE_C)
    dk = ks * 1e-5
    deriv = (reduction_factor(w, ks + dk, CASE_C)
             - reduction_factor(w, ks - dk, CASE_C)) / (2 * dk)
    # relative to the typical slope of rho over the upper half of the band
    slope_scale = abs(reduction_factor(w, band.k_max, CASE_C)
                      - reduction_factor(w, ks, CASE_C)) / (band.k_max - ks)
    assert abs(deriv) < 1e-6 * slope_scale


def test_zero_ordering_for_optimal_weights_case_c_level2():
    band = frequency_band(0.5, 0.05)
    w = optimal_weights(CASE_C, band)
    zeros = rho_zeros(w, CASE_C)
    assert zeros is not None
    k1, k2 = zeros
    ks = k_star(w, CASE_C)
    assert band.k_min < k1 < ks < k2 < band.k_max
    assert abs(reduction_factor(w, k1, CASE_C)) < 1e-10
    assert abs(reduction_factor(w, k2, CASE_C)) < 1e-10


def test_double_root_at_unit_sqrt_sum():
    w = WeightPair(0.25, 0.25)
    zeros = rho_zeros(w, CASE_B)
    assert zeros is not None
    k1, k2 = zeros
    ks = k_star(w, CASE_B)
    assert k1 == pytest.approx(ks, rel=1e-12)
    assert k2 == pytest.approx(ks, rel=1e-12)


def test_no_zeros_when_discriminant_negative():
    # (1 - a_f - a_p)^2 < 4 a_f a_p
    assert rho_zeros(WeightPair(0.4, 0.4), CASE_B) is None


def test_endpoint_balanced_weights_balance_the_band_ends():
    band = frequency_band(0.5, 0.05)
    (w, envelope_ok) = endpoint_balanced_weights(CASE_C, band)
    assert math.sqrt(w.alpha_f) + math.sqrt(w.alpha_p) == pytest.approx(
        1.0, rel=1e-12)
    lo = abs(reduction_factor(w, band.k_min, CASE_C))
    hi = abs(reduction_factor(w, band.k_max, CASE_C))
    assert lo == pytest.approx(hi, rel=1e-9)
    assert isinstance(envelope_ok, bool)


# -- frequency band and asymptotics ------------------------------------------

def test_band_for_coarsest_level():
    band = frequency_band(0.5, 0.1)
    assert band.k_min == pytest.approx(2 * math.pi, rel=1e-15)
    assert band.k_max == pytest.approx(20 * math.pi, rel=1e-15)


def test_band_for_finest_level():
    band = frequency_band(0.5, 0.0125)
    assert band.k_max == pytest.approx(160 * math.pi, rel=1e-15)


def test_band_element_convention_and_scaling():
    assert frequency_band(0.5, 0.1, "element").k_max == pytest.approx(
        10 * math.pi)
    a = frequency_band(0.5, 0.05).k_max
    b = frequency_band(0.5, 0.1).k_max
    assert a == pytest.approx(2 * b, rel=1e-15)
    with pytest.raises(ValueError):
        frequency_band(0.5, 0.1, "nodes")


def test_asymptotic_constant_case_a():
    # 4*pi^2*mu*eta ~ 1.6e-7 << L^2 = 0.25 so the shared constant of the
    # expansions is close to 1/L^2 = 4
    mu_eta = CASE_A.mu_f * CASE_A.eta_p
    c = 1.0 / (4 * math.pi**2 * mu_eta + 0.25)
    assert c == pytest.approx(4.0, rel=1e-5)
    asym = asymptotic_weights(0.5, 0.1, CASE_A)
    spacing = 0.05
    assert asym.alpha_f == pytest.approx(
        4 * math.pi**2 * mu_eta * c * (1 - 2 * 0.5 * c * spacing), rel=1e-12)
    assert asym.alpha_p == pytest.approx(
        0.25 / (math.pi**2 * mu_eta) * c * spacing**2, rel=1e-12)


def _defect_slopes(params: AnalysisParams):
    hs, dp, dr = [], [], []
    for level in (1, 2, 3, 4):
        h = 0.1 * 2 ** (1 - level)
        band = frequency_band(0.5, h)
        w = optimal_weights(params, band)
        asym = asymptotic_weights(0.5, h, params)
        hs.append(h)
        dp.append(abs(w.alpha_p - asym.alpha_p))
        dr.append(abs(reduction_factor(w, band.k_max, params)
                      - asym.rho_at_kmax))
    slope_p = np.polyfit(np.log(hs), np.log(dp), 1)[0]
    slope_r = np.polyfit(np.log(hs), np.log(dr), 1)[0]
    return slope_p, slope_r


def test_asymptotic_truncation_orders():
    # Orders are fitted where the expansion is valid at these mesh sizes
    # (mu*eta of order one); for the benchmark parameter magnitudes the
    # crossover to the h->0 regime happens only below h ~ 1e-4.
    slope_p, slope_r = _defect_slopes(AnalysisParams(1.0, 1.0))
    assert 2.5 <= slope_p <= 3.5
    assert 1.5 <= slope_r <= 2.5


# -- mode composition oracle ---------------------------------------------------

def test_mode_composition_zero_input():
    w = WeightPair(0.1, 0.2)
    assert mode_composition_oracle(0.0, 10.0, w, CASE_B, 4) == 0.0


def test_mode_composition_requires_positive_frequency():
    with pytest.raises(ValueError):
        mode_composition_oracle(1.0, -3.0, WeightPair(0.1, 0.1), CASE_B, 1)


@settings(max_examples=200)
@given(k=st.floats(min_value=1.0, max_value=600.0),
       alpha_f=st.floats(min_value=1e-12, max_value=0.9),
       alpha_p=st.floats(min_value=1e-3, max_value=0.999),
       lam0=st.floats(min_value=-10.0, max_value=10.0))
def test_single_sweep_reproduces_factor(k, alpha_f, alpha_p, lam0):
    w = WeightPair(alpha_f, alpha_p)
    got = mode_composition_oracle(lam0, k, w, CASE_B, 1)
    rho = reduction_factor(w, k, CASE_B)
    assert abs(got - rho * lam0) <= 1e-14 * max(abs(lam0), 1e-30) * max(
        1.0, abs(rho))


def test_three_sweeps_at_stationary_frequency():
    band = frequency_band(0.5, 0.025)
    w = optimal_weights(CASE_B, band)
    ks = k_star(w, CASE_B)
    lam0 = 0.731
    got = mode_composition_oracle(lam0, ks, w, CASE_B, 3)
    assert got == pytest.approx(rho_peak(w) ** 3 * lam0, rel=1e-12)


# -- brute-force search ---------------------------------------------------------

def test_degenerate_band_drives_factor_to_zero():
    band = FrequencyBand(100.0, 100.0 * (1 + 1e-9))
    _, achieved = minmax_oracle(CASE_B, band, n_alpha=41, n_k=51)
    assert achieved < 1e-8


def test_nested_grids_never_worsen():
    band = frequency_band(0.5, 0.1)
    _, coarse = minmax_oracle(CASE_B, band, n_alpha=51, n_k=501, refine=False)
    _, fine = minmax_oracle(CASE_B, band, n_alpha=101, n_k=501, refine=False)
    assert fine <= coarse
    _, polished = minmax_oracle(CASE_B, band, n_alpha=51, n_k=501)
    assert polished <= coarse
