"""Closed-form benchmark solution and its derived data.

The coupled fields

    u_f = (sqrt(eta_p), alpha_bj * x),
    p_f = 2*mu_f*(x + y - 1) + 1/(3*eta_p),
    p_p = (1/eta_p) * (-alpha_bj*x*(y-1) + y^3/3 - y^2 + y) + 2*mu_f*x

satisfy the coupled equations with forcing f_f = (2*mu_f, 2*mu_f) and
f_p = 2 - 2*y; normal-flux and normal-stress continuity hold exactly on
y = 1, while the tangential friction condition leaves a constant defect
g_tau = alpha_bj * (mu_f - sqrt(mu_f)) for non-unit viscosity (isotropic
permeability), which assembly applies as natural interface data.

Every forcing, boundary and interface datum is derived symbolically from
the fields above in one place, so changing parameters cannot
desynchronize the data from the solution.
"""

from __future__ import annotations

import numpy as np
import sympy as sp

from .elements import gauss_2d, shape_q1, shape_q2
from .mesh import StructuredMesh
from .params import CaseConfig, ProblemParams

_X, _Y = sp.symbols("x y", real=True)


def _scalar_callable(expr):
    fn = sp.lambdify((_X, _Y), expr, "numpy")

    def call(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast_shapes(x.shape, y.shape)
        out = np.asarray(fn(x, y), dtype=float)
        return np.broadcast_to(out, shape).copy()

    return call


def _vector_callable(exprs):
    parts = [_scalar_callable(e) for e in exprs]

    def call(x, y):
        return np.stack([p(x, y) for p in parts], axis=-1)

    return call


class ExactSolution:
    """Symbolic benchmark fields plus numpy evaluators for all derived data."""

    def __init__(self, params: ProblemParams):
        self.params = params
        # exact rationals make the interface identities cancel exactly
        mu, e1, e2, abj = (sp.Rational(str(params.mu_f)),
                           sp.Rational(str(params.eta1)),
                           sp.Rational(str(params.eta2)),
                           sp.Rational(str(params.alpha_bj)))
        eta_p = sp.sqrt(e1 * e2)
        x, y = _X, _Y

        u = sp.Matrix([sp.sqrt(eta_p), abj * x])
        p_f = 2 * mu * (x + y - 1) + 1 / (3 * eta_p)
        p_p = (-abj * x * (y - 1) + y**3 / 3 - y**2 + y) / eta_p + 2 * mu * x

        grad_u = u.jacobian([x, y])
        sym_grad = (grad_u + grad_u.T) / 2
        stress = 2 * mu * sym_grad - p_f * sp.eye(2)
        self._stress = stress
        self._perm = sp.diag(e1, e2)
        self._grad_pp = sp.Matrix([sp.diff(p_p, x), sp.diff(p_p, y)])

        f_f = -sp.Matrix([sum(sp.diff(stress[i, j], [x, y][j])
                              for j in range(2)) for i in range(2)])
        f_p = -(e1 * sp.diff(p_p, x, 2) + e2 * sp.diff(p_p, y, 2))

        # Interface data on y = 1, fluid-outward normal n = (0, -1),
        # tangent tau = (1, 0).
        n = sp.Matrix([0, -1])
        tau = sp.Matrix([1, 0])
        traction = stress * n
        normal_stress = (n.T * traction)[0]
        g_n = sp.simplify((-normal_stress - p_p).subs(y, 1))
        xi_f = abj * sp.sqrt(mu / e2)
        g_tau = sp.simplify(
            (-(tau.T * traction)[0] - xi_f * (tau.T * u)[0]).subs(y, 1))

        self._sym = {
            "u": u, "p_f": p_f, "p_p": p_p, "f_f": f_f, "f_p": f_p,
            "g_n": g_n, "g_tau": g_tau,
            "div_u": sp.simplify(sp.diff(u[0], x) + sp.diff(u[1], y)),
        }

        self.velocity = _vector_callable([u[0], u[1]])
        self.velocity_grad = _vector_callable(
            [grad_u[0, 0], grad_u[0, 1], grad_u[1, 0], grad_u[1, 1]])
        self.fluid_pressure = _scalar_callable(p_f)
        self.fluid_pressure_grad = _vector_callable(
            [sp.diff(p_f, x), sp.diff(p_f, y)])
        self.porous_pressure = _scalar_callable(p_p)
        self.porous_pressure_grad = _vector_callable(
            [self._grad_pp[0], self._grad_pp[1]])
        self.forcing_fluid = _vector_callable([f_f[0], f_f[1]])
        self.forcing_porous = _scalar_callable(f_p)
        self.g_n = _scalar_callable(g_n)
        self.g_tau = _scalar_callable(g_tau)

    def traction(self, normal):
        """Evaluator of the fluid boundary traction (stress * n) for a
        constant unit normal."""
        n = sp.Matrix([sp.Rational(normal[0]), sp.Rational(normal[1])])
        t = self._stress * n
        return _vector_callable([t[0], t[1]])

    def darcy_flux(self, normal):
        """Evaluator of (permeability * grad p_p) . n for a constant normal."""
        n = sp.Matrix([sp.Rational(normal[0]), sp.Rational(normal[1])])
        q = (self._perm * self._grad_pp).T * n
        return _scalar_callable(q[0])

    def divergence_is_zero(self) -> bool:
        return self._sym["div_u"] == 0

    def interface_flux_gap(self):
        """Symbolic residual of normal-flux continuity at y = 1 (zero)."""
        n_y = -1
        u_n = (n_y * self._sym["u"][1]).subs(_Y, 1)
        darcy_n = (n_y * (self._perm * self._grad_pp)[1]).subs(_Y, 1)
        return sp.simplify(u_n - (-darcy_n))


def exact_solution(case: CaseConfig) -> ExactSolution:
    return ExactSolution(case.params)


def forcing_terms(params: ProblemParams):
    """Forcing evaluators (f_f, f_p) derived from the exact fields."""
    sol = ExactSolution(params)
    return sol.forcing_fluid, sol.forcing_porous


def interface_residuals(params: ProblemParams):
    """Interface defect evaluators (g_n, g_tau) of the exact fields.

    g_n is identically zero (normal-stress balance is exact); g_tau is
    the constant defect of the tangential friction condition.
    """
    sol = ExactSolution(params)
    return sol.g_n, sol.g_tau


# ---------------------------------------------------------------------------
# quadrature error norms
# ---------------------------------------------------------------------------

_FAMILY = {
    "q2": (shape_q2, "q2_connectivity", "q2_coords"),
    "q1": (shape_q1, "q1_connectivity", "q1_coords"),
}


def _quad_data(mesh: StructuredMesh, family: str, quad_order: int):
    shape_fn, conn_name, coords_name = _FAMILY[family]
    pts, wts = gauss_2d(quad_order)
    phi, dphi = shape_fn(pts)
    conn = getattr(mesh, conn_name)()
    coords = getattr(mesh, coords_name)()
    x0 = coords[conn[:, 0]]
    half = mesh.h / 2.0
    xq = x0[:, 0:1] + (pts[:, 0] + 1.0) * half
    yq = x0[:, 1:2] + (pts[:, 1] + 1.0) * half
    det = half * half
    return conn, phi, dphi, xq, yq, wts, det, 1.0 / half


def scalar_field_error(mesh: StructuredMesh, nodal: np.ndarray, exact,
                       exact_grad=None, family: str = "q2",
                       quad_order: int = 3):
    """(L2, H1-seminorm) error of a nodal FE field against exact evaluators.

    The H1 part is skipped (returned as nan) when no gradient is given.
    """
    conn, phi, dphi, xq, yq, wts, det, scale = _quad_data(mesh, family,
                                                          quad_order)
    elem_vals = nodal[conn]
    uh = elem_vals @ phi.T
    diff = uh - exact(xq, yq)
    l2_sq = float(np.sum(wts * det * diff**2))
    if exact_grad is None:
        return np.sqrt(l2_sq), float("nan")
    gx = (elem_vals @ dphi[:, :, 0].T) * scale
    gy = (elem_vals @ dphi[:, :, 1].T) * scale
    gex = exact_grad(xq, yq)
    h1_sq = float(np.sum(wts * det * ((gx - gex[..., 0])**2
                                      + (gy - gex[..., 1])**2)))
    return np.sqrt(l2_sq), np.sqrt(h1_sq)


def vector_field_error(mesh: StructuredMesh, nodal: np.ndarray, exact,
                       exact_grad=None, quad_order: int = 3):
    """(L2, H1-seminorm) error of a Q2 vector field with nodal shape (n, 2)."""
    conn, phi, dphi, xq, yq, wts, det, scale = _quad_data(mesh, "q2",
                                                          quad_order)
    uex = exact(xq, yq)
    gex = exact_grad(xq, yq) if exact_grad is not None else None
    l2_sq = 0.0
    h1_sq = 0.0
    for comp in range(2):
        elem_vals = nodal[:, comp][conn]
        diff = elem_vals @ phi.T - uex[..., comp]
        l2_sq += float(np.sum(wts * det * diff**2))
        if gex is not None:
            gx = (elem_vals @ dphi[:, :, 0].T) * scale
            gy = (elem_vals @ dphi[:, :, 1].T) * scale
            h1_sq += float(np.sum(wts * det * ((gx - gex[..., 2 * comp])**2
                                               + (gy - gex[..., 2 * comp + 1])**2)))
    return np.sqrt(l2_sq), (np.sqrt(h1_sq) if gex is not None else float("nan"))


def error_norms(mesh_f: StructuredMesh, mesh_p: StructuredMesh,
                u_f: np.ndarray, p_f: np.ndarray, p_p: np.ndarray,
                exact: ExactSolution, quad_order: int = 3):
    """Quadrature L2/H1-seminorm errors of all three fields.

    Returns a dict field name -> (l2, h1_seminorm).
    """
    return {
        "u_f": vector_field_error(mesh_f, u_f, exact.velocity,
                                  exact.velocity_grad, quad_order),
        "p_f": scalar_field_error(mesh_f, p_f, exact.fluid_pressure,
                                  exact.fluid_pressure_grad, "q1", quad_order),
        "p_p": scalar_field_error(mesh_p, p_p, exact.porous_pressure,
                                  exact.porous_pressure_grad, "q2", quad_order),
    }
