"""Frequency-space convergence analysis of the interface iteration.

The two-sided update with weights ``(alpha_f, alpha_p)`` contracts each
tangential Fourier mode ``k`` of the interface error by a factor

    rho(alpha_f, alpha_p, k)
        = 1 - alpha_p * (1 + 2*mu_f*eta_p*k^2)
            - alpha_f * (1 + 1/(2*mu_f*eta_p*k^2)),

and the weights are chosen to minimize ``max |rho|`` over the band of
frequencies resolvable on the discrete interface.  This module provides
the closed-form optimal weights, their asymptotics, and two independent
oracles (a literal mode-by-mode recursion and a brute-force min-max
search) used to validate the closed forms.
"""

from __future__ import annotations

import math
from math import fsum, pi, sqrt
from typing import NamedTuple

import numpy as np


class WeightPair(NamedTuple):
    """Positive weights of the fluid and porous subdomain corrections."""

    alpha_f: float
    alpha_p: float


class AnalysisParams(NamedTuple):
    """Fluid viscosity and scalar permeability eta_p = sqrt(eta1*eta2)."""

    mu_f: float
    eta_p: float


class FrequencyBand(NamedTuple):
    """Interval [k_min, k_max] of relevant interface frequencies."""

    k_min: float
    k_max: float


class AsymptoticWeights(NamedTuple):
    alpha_f: float
    alpha_p: float
    rho_at_kmax: float


def _check_positive(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def reduction_factor(weights: WeightPair, k, params: AnalysisParams):
    """Per-mode contraction factor rho(alpha_f, alpha_p, k).

    Even in ``k``; singular at ``k = 0`` (rejected).  Accepts scalar or
    array ``k`` and evaluates the constant part with compensated
    summation so that near-cancellation at optimal weights stays
    accurate to machine precision.
    """
    alpha_f, alpha_p = weights
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr == 0.0):
        raise ValueError("reduction factor is singular at k = 0")
    t = 2.0 * params.mu_f * params.eta_p * k_arr**2
    const = fsum([1.0, -alpha_p, -alpha_f])
    rho = const - alpha_p * t - alpha_f / t
    if np.isscalar(k) or k_arr.ndim == 0:
        return float(rho)
    return rho


def optimal_weights(params: AnalysisParams, band: FrequencyBand) -> WeightPair:
    """Closed-form solution of min over weights of max_k |rho| on the band.

    With g = 2*mu_f*eta_p*k_min*k_max and the shared denominator
    D = 1 + g^2 + mu_f*eta_p*(k_min+k_max)^2:

        alpha_f = g^2 / D,    alpha_p = 1 / D.

    The denominator is evaluated once so the (often ~1e-12) alpha_f and
    (~1) alpha_p stay mutually consistent without cancellation.
    """
    _check_positive(mu_f=params.mu_f, eta_p=params.eta_p,
                    k_min=band.k_min, k_max=band.k_max)
    if not band.k_min < band.k_max:
        raise ValueError("band requires k_min < k_max")
    mu_eta = params.mu_f * params.eta_p
    g = 2.0 * mu_eta * band.k_min * band.k_max
    denom = fsum([1.0, g * g, mu_eta * (band.k_min + band.k_max) ** 2])
    return WeightPair(alpha_f=g * g / denom, alpha_p=1.0 / denom)


def k_star(weights: WeightPair, params: AnalysisParams) -> float:
    """Frequency of the interior maximum of rho.

    At k* the factor takes the value 1 - (sqrt(alpha_f)+sqrt(alpha_p))^2;
    for the optimal weights k* = sqrt(k_min*k_max).
    """
    _check_positive(alpha_f=weights.alpha_f, alpha_p=weights.alpha_p)
    return (weights.alpha_f / (weights.alpha_p
                               * (2.0 * params.mu_f * params.eta_p) ** 2)) ** 0.25


def rho_peak(weights: WeightPair) -> float:
    """Value of rho at the interior maximum: 1 - (sqrt(a_f)+sqrt(a_p))^2."""
    return 1.0 - (sqrt(weights.alpha_f) + sqrt(weights.alpha_p)) ** 2


def rho_zeros(weights: WeightPair, params: AnalysisParams):
    """Both positive zeros of rho, or None if there are none.

    Zeros exist iff (1 - alpha_f - alpha_p)^2 >= 4*alpha_f*alpha_p with
    1 - alpha_f - alpha_p > 0, i.e. sqrt(alpha_f) + sqrt(alpha_p) <= 1.
    Returns (k1, k2) with k1 <= k2.
    """
    alpha_f, alpha_p = weights
    _check_positive(alpha_f=alpha_f, alpha_p=alpha_p)
    lin = 1.0 - alpha_f - alpha_p
    disc = lin * lin - 4.0 * alpha_f * alpha_p
    if lin <= 0.0 or disc < 0.0:
        return None
    scale = sqrt(4.0 * params.mu_f * params.eta_p * alpha_p)
    root = sqrt(disc)
    k1 = sqrt(lin - root) / scale
    k2 = sqrt(lin + root) / scale
    return k1, k2


def endpoint_balanced_weights(params: AnalysisParams, band: FrequencyBand):
    """Weights with sqrt(alpha_f) + sqrt(alpha_p) = 1 balancing |rho| at
    the band ends (the interior maximum of rho is then exactly zero).

    Returns (weights, envelope_ok) where ``envelope_ok`` reports whether
    1 + g > sqrt(2*mu_f*eta_p) * (k_max - k_min), the sufficient
    condition for max |rho| < 1 on the band with these weights.
    """
    mu_eta = params.mu_f * params.eta_p
    g = 2.0 * mu_eta * band.k_min * band.k_max
    denom = (1.0 + g) ** 2
    weights = WeightPair(alpha_f=g * g / denom, alpha_p=1.0 / denom)
    envelope_ok = 1.0 + g > sqrt(2.0 * mu_eta) * (band.k_max - band.k_min)
    return weights, envelope_ok


def frequency_band(length: float, h: float, convention: str = "dof") -> FrequencyBand:
    """Resolvable frequency band of a discrete interface of the given length.

    ``k_min = pi/length``.  ``k_max = pi/s`` where ``s`` is the interface
    node spacing: ``s = h/2`` for biquadratic traces (convention "dof",
    the default) or ``s = h`` (convention "element").
    """
    _check_positive(length=length, h=h)
    if convention == "dof":
        spacing = h / 2.0
    elif convention == "element":
        spacing = h
    else:
        raise ValueError(f"unknown k_max convention {convention!r}")
    return FrequencyBand(k_min=pi / length, k_max=pi / spacing)


def asymptotic_weights(length: float, h: float, params: AnalysisParams,
                       convention: str = "dof") -> AsymptoticWeights:
    """Leading-order expansions of the optimal weights as the mesh refines.

    With c = 1/(4*pi^2*mu_f*eta_p + L^2) and s the interface node spacing
    (so that k_max = pi/s):

        alpha_f ~ 4*pi^2*mu_f*eta_p*c * (1 - 2*L*c*s)
        alpha_p ~ L^2/(pi^2*mu_f*eta_p) * c * s^2
        rho(k_max) ~ -L^2*c + (8*pi^2*mu_f*eta_p*L + 4*L^3)*c^2*s

    The truncation defects are O(s^3) for alpha_p and O(s^2) for the
    other two.
    """
    _check_positive(length=length, h=h)
    spacing = h / 2.0 if convention == "dof" else h
    mu_eta = params.mu_f * params.eta_p
    c = 1.0 / (4.0 * pi**2 * mu_eta + length**2)
    alpha_f = 4.0 * pi**2 * mu_eta * c * (1.0 - 2.0 * length * c * spacing)
    alpha_p = length**2 / (pi**2 * mu_eta) * c * spacing**2
    rho_kmax = -length**2 * c + (8.0 * pi**2 * mu_eta * length
                                 + 4.0 * length**3) * c**2 * spacing
    return AsymptoticWeights(alpha_f, alpha_p, rho_kmax)


def mode_composition_oracle(lam0: float, k: float, weights: WeightPair,
                            params: AnalysisParams, m: int) -> float:
    """Amplitude of one interface Fourier mode after m literal sweeps.

    Follows the half-plane solution of each of the six sweep stages for
    the mode with frequency k > 0: the prescribed trace determines the
    fluid amplitude U1 = lam and the porous amplitude Phi =
    lam/(eta_p*k); the combined interface stress is
    sigma = -(2*mu_f*k + 1/(eta_p*k)) * lam; the correcting solves
    return a fluid trace -sigma/(2*mu_f*k) and a porous flux
    -eta_p*k*sigma, which are combined with the weights.  The result
    must equal reduction_factor(...)**m * lam0; the recursion is kept
    deliberately step-by-step as an independent check of that factor.
    """
    if not k > 0:
        raise ValueError("mode frequency must be positive")
    mu_f, eta_p = params
    alpha_f, alpha_p = weights
    lam = float(lam0)
    for _ in range(m):
        u1_amp = lam
        phi_amp = lam / (eta_p * k)
        sigma = -2.0 * mu_f * k * u1_amp - phi_amp
        fluid_trace = -sigma / (2.0 * mu_f * k)
        porous_flux = -eta_p * k * sigma
        lam = lam - (alpha_f * fluid_trace + alpha_p * porous_flux)
    return lam


def _max_abs_rho(alpha_f, alpha_p, t_samples: np.ndarray) -> np.ndarray:
    """max_k |rho| over sampled t = 2*mu_f*eta_p*k^2, broadcast over weights."""
    af = np.asarray(alpha_f, dtype=float)[..., None]
    ap = np.asarray(alpha_p, dtype=float)[..., None]
    rho = 1.0 - ap * (1.0 + t_samples) - af * (1.0 + 1.0 / t_samples)
    return np.max(np.abs(rho), axis=-1)


def _zoom_1d(objective, center: float, width: float, n: int = 41,
             width_floor: float = 1e-9, max_rounds: int = 80,
             bounds: tuple = (1e-18, 10.0)):
    """Log-space grid descent: recenter at constant (expanding) width
    while the minimum sits on the window edge; otherwise the minimum is
    bracketed within one grid step, so the window shrinks to twice the
    step.  The center is clamped to ``bounds`` so a flat objective
    cannot walk the window into underflow."""
    best_val = np.inf
    for _ in range(max_rounds):
        center = min(max(center, bounds[0]), bounds[1])
        window = np.geomspace(center * 10**-width, center * 10**width, n)
        vals = objective(window)
        j = int(np.argmin(vals))
        center, best_val = float(window[j]), float(vals[j])
        if 0 < j < n - 1:
            width *= 4.0 / (n - 1)
        else:
            width = min(2.0 * width, 4.0)  # expand while walking an edge
        if width < width_floor:
            break
    return min(max(center, bounds[0]), bounds[1]), best_val


def minmax_oracle(params: AnalysisParams, band: FrequencyBand,
                  n_alpha: int = 81, n_k: int = 2001,
                  refine: bool = True,
                  alpha_range: tuple = (1e-16, 4.0)):
    """Brute-force minimizer of max_k |rho| over logarithmic weight grids.

    The objective forms a bent valley (the alpha_p direction is stiff
    while alpha_f is nearly flat until alpha_p is resolved), so the
    search minimizes the alpha_f profile function: for each alpha_f the
    inner minimum over alpha_p is found by a 1D log-grid zoom, and the
    outer alpha_f minimum by the same zoom over the profile.  Grid
    evaluation throughout, no derivatives, so the search shares nothing
    with the closed form it validates.  ``refine=False`` returns the raw
    optimum of the n_alpha x n_alpha product grid, which is monotone
    under nested grid refinement.

    Returns (WeightPair, achieved_max_abs_rho).
    """
    _check_positive(n_alpha=n_alpha, n_k=n_k)
    k_samples = np.geomspace(band.k_min, band.k_max, n_k)
    t_samples = 2.0 * params.mu_f * params.eta_p * k_samples**2
    grid = np.geomspace(alpha_range[0], alpha_range[1], n_alpha)
    log_step = math.log10(alpha_range[1] / alpha_range[0]) / (n_alpha - 1)

    if not refine:
        best_val = np.inf
        best_af = best_ap = grid[0]
        for af in grid:  # chunked to bound the broadcast size
            vals = _max_abs_rho(af, grid, t_samples)
            j = int(np.argmin(vals))
            if vals[j] < best_val:
                best_val = float(vals[j])
                best_af, best_ap = float(af), float(grid[j])
        return WeightPair(best_af, best_ap), best_val

    state = {"ap_hint": None}

    def min_over_ap(af: float):
        if state["ap_hint"] is None:
            vals = _max_abs_rho(af, grid, t_samples)
            center, width = float(grid[int(np.argmin(vals))]), log_step
        else:
            center, width = state["ap_hint"], 0.05
        ap, val = _zoom_1d(lambda ap: _max_abs_rho(af, ap, t_samples),
                           center, width)
        state["ap_hint"] = ap
        return ap, val

    def profile(af_values):
        out = np.empty(len(af_values))
        for i, af in enumerate(af_values):
            _, out[i] = min_over_ap(float(af))
        return out

    coarse_vals = profile(grid)
    j = int(np.argmin(coarse_vals))
    state["ap_hint"] = None  # the sweep ends at large alpha_f; drop its hint
    best_af, _ = _zoom_1d(profile, float(grid[j]), log_step)
    best_ap, best_val = min_over_ap(best_af)
    return WeightPair(best_af, best_ap), best_val
