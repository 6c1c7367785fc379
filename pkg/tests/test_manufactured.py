import math

import numpy as np
import pytest
import sympy as sp

from stokesdarcy import (CaseConfig, RectDomain, build_mesh, error_norms,
                         forcing_terms, interface_residuals, isotropic_params)
from stokesdarcy.manufactured import ExactSolution, scalar_field_error

CASE_B = isotropic_params(1.0, 4e-7)
CASE_A = isotropic_params(10.0, 4e-10)


def test_velocity_is_divergence_free():
    assert ExactSolution(CASE_A).divergence_is_zero()
    assert ExactSolution(isotropic_params(0.2, 1e-7)).divergence_is_zero()


def test_fluid_forcing_is_twice_viscosity():
    f_f, _ = forcing_terms(CASE_B)
    vals = f_f(np.array([0.1, 0.3]), np.array([1.2, 1.4]))
    assert np.allclose(vals, 2.0 * CASE_B.mu_f, rtol=0, atol=1e-14)
    f_f10, _ = forcing_terms(CASE_A)
    assert np.allclose(f_f10(0.2, 1.1), 20.0, rtol=0, atol=1e-12)


def test_porous_forcing_values():
    _, f_p = forcing_terms(CASE_B)
    assert f_p(0.3, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert f_p(0.1, 0.5) == pytest.approx(1.0, rel=1e-12)
    # matches 2 - 2y everywhere
    y = np.linspace(0.5, 1.0, 7)
    assert np.allclose(f_p(0.25, y), 2.0 - 2.0 * y, rtol=1e-12)


def test_tangential_defect_vanishes_for_unit_viscosity():
    _, g_tau = interface_residuals(CASE_B)
    assert np.allclose(g_tau(np.linspace(0, 0.5, 5), 1.0), 0.0, atol=1e-12)


def test_tangential_defect_for_viscosity_ten():
    _, g_tau = interface_residuals(CASE_A)
    expected = 10.0 - math.sqrt(10.0)
    assert g_tau(0.2, 1.0) == pytest.approx(expected, rel=1e-12)


def test_normal_stress_balance_is_exact():
    g_n, _ = interface_residuals(CASE_A)
    assert np.allclose(g_n(np.linspace(0, 0.5, 9), 1.0), 0.0, atol=1e-9)


def test_interface_flux_balance():
    # u . n = -alpha_bj x = -(perm grad p_p) . n along y = 1
    sol = ExactSolution(CASE_B)
    assert sp.simplify(sol.interface_flux_gap()) == 0
    x = np.linspace(0.0, 0.5, 11)
    u = sol.velocity(x, np.ones_like(x))
    flux = sol.darcy_flux((0, -1))(x, np.ones_like(x))
    assert np.allclose(-u[:, 1], -flux, rtol=0, atol=1e-14)
    assert np.allclose(-u[:, 1], -CASE_B.alpha_bj * x, atol=1e-14)


def test_exact_interface_stress_value():
    # both sides of the normal-stress balance equal 2 mu x + 1/(3 eta)
    sol = ExactSolution(CASE_B)
    x = np.linspace(0.0, 0.5, 11)
    p_p = sol.porous_pressure(x, np.ones_like(x))
    expected = 2.0 * CASE_B.mu_f * x + 1.0 / (3.0 * CASE_B.eta_p)
    assert np.allclose(p_p, expected, rtol=1e-12)
    traction = sol.traction((0, -1))(x, np.ones_like(x))
    assert np.allclose(-(-traction[:, 1]), expected, rtol=1e-12)


def test_nodal_interpolation_leaves_only_interpolation_error():
    mesh = build_mesh(RectDomain(0.0, 0.5, 0.5, 1.0), 5, 5)
    sol = ExactSolution(CASE_B)
    coords = mesh.q2_coords()
    nodal = sol.porous_pressure(coords[:, 0], coords[:, 1])
    l2, h1 = scalar_field_error(mesh, nodal, sol.porous_pressure,
                                sol.porous_pressure_grad)
    # cubic field vs biquadratic space: small but nonzero
    norm, _ = scalar_field_error(mesh, np.zeros_like(nodal),
                                 sol.porous_pressure)
    assert 0 < l2 < 1e-4 * norm


def test_zero_field_error_equals_solution_norm():
    mesh = build_mesh(RectDomain(0.0, 0.5, 1.0, 1.5), 5, 5)
    sol = ExactSolution(CASE_B)
    l2, _ = scalar_field_error(mesh, np.zeros(mesh.n_q1),
                               sol.fluid_pressure, family="q1")
    xq = np.linspace(0, 0.5, 201)
    # coarse cross-check of the L2 norm of p_f over the fluid box
    ref = np.sqrt(np.mean([np.mean(sol.fluid_pressure(xq, y) ** 2)
                           for y in np.linspace(1.0, 1.5, 201)]) * 0.25)
    assert l2 == pytest.approx(ref, rel=1e-3)


def test_error_norms_cover_all_fields():
    mesh_f = build_mesh(RectDomain(0.0, 0.5, 1.0, 1.5), 5, 5)
    mesh_p = build_mesh(RectDomain(0.0, 0.5, 0.5, 1.0), 5, 5)
    sol = ExactSolution(CASE_B)
    cf = mesh_f.q2_coords()
    cp = mesh_p.q2_coords()
    c1 = mesh_f.q1_coords()
    u = sol.velocity(cf[:, 0], cf[:, 1])
    p_f = sol.fluid_pressure(c1[:, 0], c1[:, 1])
    p_p = sol.porous_pressure(cp[:, 0], cp[:, 1])
    errs = error_norms(mesh_f, mesh_p, u, p_f, p_p, sol)
    assert set(errs) == {"u_f", "p_f", "p_p"}
    # velocity and fluid pressure are inside their FE spaces
    assert errs["u_f"][0] < 1e-12
    assert errs["p_f"][0] < 1e-10
    assert errs["p_p"][0] > 0


def test_case_config_parameter_map():
    assert CaseConfig("a", 1).params.mu_f == 10.0
    assert CaseConfig("a", 1).params.eta_p == pytest.approx(4e-10)
    assert CaseConfig("b", 2).params.eta_p == pytest.approx(4e-7)
    assert CaseConfig("c", 3).params.mu_f == 10.0
    assert CaseConfig("d", 4).params.mu_f == pytest.approx(0.2)
    with pytest.raises(ValueError):
        CaseConfig("e", 1)
    with pytest.raises(ValueError):
        CaseConfig("a", 5)


def test_problem_params_derived_quantities():
    p = isotropic_params(4.0, 1e-6, alpha_bj=2.0)
    assert p.eta_p == pytest.approx(1e-6)
    assert p.xi_f == pytest.approx(2.0 * math.sqrt(4.0 / 1e-6))
    aniso = type(p)(mu_f=1.0, eta1=2.0, eta2=0.5)
    assert aniso.eta_p == pytest.approx(1.0)
    assert aniso.xi_f == pytest.approx(math.sqrt(2.0))
    with pytest.raises(ValueError):
        type(p)(mu_f=-1.0, eta1=1.0, eta2=1.0)
