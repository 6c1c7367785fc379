"""Interface Schur operators, the weighted preconditioner, and the
explicit six-stage interface sweep.

All operators act on vectors indexed by the interface normal-velocity
unknowns.  Sigma_f maps a prescribed interface normal velocity to the
resulting fluid normal stress (integrated against interface test
functions); Sigma_p maps a prescribed interface flux to the
mass-weighted porous pressure trace.  Both are symmetric positive
definite, the reduced interface problem is (Sigma_f + Sigma_p) lam = b,
and the preconditioner is P = alpha_f Sigma_f^{-1} + alpha_p
Sigma_p^{-1}.

One six-stage sweep applied to an iterate lam equals exactly one
preconditioned Richardson step lam - P((Sigma_f + Sigma_p) lam - b);
the sweep is exposed stage by stage anyway so the equivalence is
testable instead of assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .assembly import ConfigurationError, CoupledSystem
from .subdomain import FluidSubdomain, PorousSubdomain, _factorize
from .weights import WeightPair

#: Largest interface size for which the dense operator oracles are allowed
#: without forcing; they exist only to cross-check the matrix-free path.
DENSE_ORACLE_MAX = 21


@dataclass
class FullSolution:
    """Nodal solution fields of the coupled problem."""

    u_f: np.ndarray   # (n_q2_fluid, 2)
    p_f: np.ndarray   # (n_q1_fluid,)
    p_p: np.ndarray   # (n_q2_porous,)
    trace: np.ndarray  # interface normal velocity


class SchurSystem:
    """Matrix-free interface operators over a reduced coupled system."""

    def __init__(self, coupled: CoupledSystem):
        self.coupled = coupled
        self.n = coupled.n_gamma

    @cached_property
    def fluid(self) -> FluidSubdomain:
        return FluidSubdomain(self.coupled)

    @cached_property
    def porous(self) -> PorousSubdomain:
        return PorousSubdomain(self.coupled)

    # -- operator actions ---------------------------------------------------

    def apply_sigma_f(self, lam: np.ndarray) -> np.ndarray:
        return self.fluid.solve_essential(lam)[1]

    def apply_sigma_p(self, lam: np.ndarray) -> np.ndarray:
        return self.porous.mass_apply(self.porous.solve_natural(lam)[1])

    def apply_schur(self, lam: np.ndarray) -> np.ndarray:
        return self.apply_sigma_f(lam) + self.apply_sigma_p(lam)

    def apply_sigma_f_inv(self, r: np.ndarray) -> np.ndarray:
        return self.fluid.solve_natural(r)[1]

    def apply_sigma_p_inv(self, r: np.ndarray) -> np.ndarray:
        return self.porous.solve_essential(r)[1]

    def apply_precond(self, r: np.ndarray, weights: WeightPair) -> np.ndarray:
        if not (weights.alpha_f > 0 and weights.alpha_p > 0):
            raise ValueError("preconditioner weights must be positive")
        return (weights.alpha_f * self.apply_sigma_f_inv(r)
                + weights.alpha_p * self.apply_sigma_p_inv(r))

    @cached_property
    def reduced_rhs(self) -> np.ndarray:
        """Right-hand side of the interface problem.

        Equals the combined interface stress imbalance of the two
        load-carrying subdomain solves at zero interface velocity, so
        the interface solution matches the monolithic trace exactly.
        """
        zero = np.zeros(self.n)
        stress0 = self.fluid.solve_essential(zero, with_loads=True)[1]
        trace0 = self.porous.solve_natural(zero, with_loads=True)[1]
        return -stress0 - self.porous.mass_apply(trace0)

    # -- the explicit interface sweep ----------------------------------------

    def nn_step(self, lam: np.ndarray, weights: WeightPair) -> np.ndarray:
        """One literal six-stage sweep starting from the iterate lam.

        1. fluid solve with prescribed normal velocity lam (with loads);
        2. porous solve with prescribed flux lam (with loads);
        3. interface stress imbalance sigma = -(fluid normal stress) -
           (porous pressure trace), functional-valued;
        4. fluid solve with prescribed normal stress sigma;
        5. porous solve with prescribed pressure trace sigma;
        6. weighted update of lam by the two correcting traces.
        """
        _, stress = self.fluid.solve_essential(lam, with_loads=True)
        _, trace = self.porous.solve_natural(lam, with_loads=True)
        sigma = -stress - self.porous.mass_apply(trace)
        _, v_n = self.fluid.solve_natural(-sigma)
        _, flux_out = self.porous.solve_essential(sigma)
        # flux_out is oriented outward of the porous domain; the update
        # uses the fluid-outward orientation.
        return lam - (weights.alpha_f * v_n + weights.alpha_p * (-flux_out))

    def richardson_step(self, lam: np.ndarray, weights: WeightPair,
                        relaxation: float = 1.0) -> np.ndarray:
        residual = self.apply_schur(lam) - self.reduced_rhs
        return lam - relaxation * self.apply_precond(residual, weights)

    # -- full solves ---------------------------------------------------------

    @cached_property
    def _monolithic_lu(self):
        c = self.coupled
        nf = c.S_f.shape[0]
        npk = c.S_p.shape[0]
        C = c.C.tocoo()
        upper = sp.coo_matrix((C.data, (c.gamma_f[C.row], c.gamma_p[C.col])),
                              shape=(nf, npk))
        lower = sp.coo_matrix((-C.data, (c.gamma_p[C.row], c.gamma_f[C.col])),
                              shape=(npk, nf))
        full = sp.bmat([[c.S_f, upper], [lower, c.S_p]], format="csc")
        return _factorize(full, "coupled monolithic")

    def monolithic_solve(self) -> FullSolution:
        """Direct sparse solve of the full coupled block system."""
        c = self.coupled
        rhs = np.concatenate([c.rhs_f, c.rhs_p])
        x = self._monolithic_lu.solve(rhs)
        nf = c.S_f.shape[0]
        u_f, p_f = c.expand_fluid(x[:nf])
        p_p = c.expand_porous(x[nf:])
        return FullSolution(u_f=u_f, p_f=p_f, p_p=p_p,
                            trace=x[:nf][c.gamma_f].copy())

    def recover_full_solution(self, lam: np.ndarray) -> FullSolution:
        """Back-substitute interior unknowns consistent with lam and loads."""
        x_f, _ = self.fluid.solve_essential(lam, with_loads=True)
        p, _ = self.porous.solve_natural(lam, with_loads=True)
        u_f, p_f = self.coupled.expand_fluid(x_f)
        return FullSolution(u_f=u_f, p_f=p_f,
                            p_p=self.coupled.expand_porous(p),
                            trace=np.asarray(lam, dtype=float).copy())

    # -- dense oracles --------------------------------------------------------

    def _check_dense(self, force: bool):
        if self.n > DENSE_ORACLE_MAX and not force:
            raise ValueError(
                f"dense oracle restricted to <= {DENSE_ORACLE_MAX} interface "
                f"unknowns (got {self.n}); pass force=True to override")

    def dense_sigma_f(self, force: bool = False) -> np.ndarray:
        """Fluid interface operator assembled densely from the block formula
        A_gg - A_gi X^{-1} A_ig (independent of the matrix-free path)."""
        self._check_dense(force)
        S = self.coupled.S_f
        g = self.fluid.gamma
        i = self.fluid.inner
        A_gg = S[g][:, g].toarray()
        A_gi = S[g][:, i].toarray()
        A_ig = S[i][:, g].toarray()
        X = S[i][:, i].toarray()
        return A_gg - A_gi @ np.linalg.solve(X, A_ig)

    def dense_sigma_p(self, force: bool = False) -> np.ndarray:
        """Porous interface operator [0 C] (A^p)^{-1} [0 C]^T, dense."""
        self._check_dense(force)
        c = self.coupled
        npk = c.S_p.shape[0]
        R = np.zeros((self.n, npk))
        R[:, c.gamma_p] = c.C.toarray()
        return R @ np.linalg.solve(c.S_p.toarray(), R.T)

    def operator_matrix(self, apply_op, force: bool = False) -> np.ndarray:
        """Dense matrix of a matrix-free operator via basis-vector probing."""
        self._check_dense(force)
        cols = []
        for j in range(self.n):
            e = np.zeros(self.n)
            e[j] = 1.0
            cols.append(apply_op(e))
        return np.column_stack(cols)
