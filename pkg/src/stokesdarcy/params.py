"""Physical parameters, benchmark case presets, and reference data.

The four benchmark configurations (a)-(d) pair a fluid viscosity with a
scalar permeability on the fixed geometry: fluid box (0, 0.5) x (1, 1.5)
above a porous box (0, 0.5) x (0.5, 1), coupled along y = 1.  Mesh level
j uses h = 0.1 * 2**(1-j), giving 11, 21, 41, 81 interface unknowns for
j = 1..4.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import NamedTuple

from .mesh import RectDomain
from .weights import AnalysisParams

FLUID_DOMAIN = RectDomain(0.0, 0.5, 1.0, 1.5)
POROUS_DOMAIN = RectDomain(0.0, 0.5, 0.5, 1.0)
INTERFACE_LENGTH = FLUID_DOMAIN.width

#: (mu_f, eta_p) per case label.  Case (d) uses eta_p = 1e-7: it is the
#: unique value consistent with the reference optimal-weight table below
#: (see the data notes in the README).
CASE_PARAMS: dict[str, tuple[float, float]] = {
    "a": (10.0, 4.0e-10),
    "b": (1.0, 4.0e-7),
    "c": (10.0, 4.0e-9),
    "d": (0.2, 1.0e-7),
}

CASE_LABELS = tuple(CASE_PARAMS)
LEVELS = (1, 2, 3, 4)


@dataclass(frozen=True)
class ProblemParams:
    """Coefficients of the coupled problem.

    eta1 and eta2 are the xx and yy entries of the diagonal permeability
    tensor.  The derived scalars are recomputed on access so they can
    never drift out of sync: eta_p = sqrt(eta1*eta2) and the interface
    friction coefficient xi_f = alpha_bj * sqrt(mu_f / eta2).
    """

    mu_f: float
    eta1: float
    eta2: float
    alpha_bj: float = 1.0

    def __post_init__(self):
        if not (self.mu_f > 0 and self.eta1 > 0 and self.eta2 > 0):
            raise ValueError("mu_f, eta1, eta2 must be positive")
        if self.alpha_bj < 0:
            raise ValueError("alpha_bj must be nonnegative")

    @property
    def eta_p(self) -> float:
        return sqrt(self.eta1 * self.eta2)

    @property
    def xi_f(self) -> float:
        return self.alpha_bj * sqrt(self.mu_f / self.eta2)

    @property
    def analysis(self) -> AnalysisParams:
        return AnalysisParams(mu_f=self.mu_f, eta_p=self.eta_p)


def isotropic_params(mu_f: float, eta_p: float,
                     alpha_bj: float = 1.0) -> ProblemParams:
    return ProblemParams(mu_f=mu_f, eta1=eta_p, eta2=eta_p, alpha_bj=alpha_bj)


@dataclass(frozen=True)
class CaseConfig:
    """A benchmark case label together with a mesh refinement level."""

    label: str
    level: int
    alpha_bj: float = 1.0

    def __post_init__(self):
        if self.label not in CASE_PARAMS:
            raise ValueError(f"unknown case label {self.label!r}")
        if self.level not in LEVELS:
            raise ValueError(f"level must be in {LEVELS}, got {self.level}")

    @property
    def h(self) -> float:
        return 0.1 * 2.0 ** (1 - self.level)

    @property
    def n_elems(self) -> int:
        return round(INTERFACE_LENGTH / self.h)

    @property
    def n_interface(self) -> int:
        return 2 * self.n_elems + 1

    @property
    def params(self) -> ProblemParams:
        mu_f, eta_p = CASE_PARAMS[self.label]
        return isotropic_params(mu_f, eta_p, self.alpha_bj)


class ReferenceRow(NamedTuple):
    """Expected optimal weights and iteration counts for one table row."""

    alpha_f: float
    alpha_p: float
    pcg_iters: int
    cg_iters: int


#: Reference benchmark table: optimal weights (3 significant digits) and
#: iteration counts of preconditioned / plain CG at tol 1e-9.
REFERENCE_TABLE: dict[tuple[str, int], ReferenceRow] = {
    ("a", 1): ReferenceRow(9.97e-12, 1.00e+0, 2, 12),
    ("a", 2): ReferenceRow(3.99e-11, 1.00e+0, 2, 17),
    ("a", 3): ReferenceRow(1.60e-10, 1.00e+0, 3, 22),
    ("a", 4): ReferenceRow(6.38e-10, 9.99e-1, 3, 31),
    ("b", 1): ReferenceRow(9.96e-08, 9.98e-1, 3, 12),
    ("b", 2): ReferenceRow(3.96e-07, 9.93e-1, 4, 17),
    ("b", 3): ReferenceRow(1.55e-06, 9.74e-1, 4, 24),
    ("b", 4): ReferenceRow(5.78e-06, 9.06e-1, 5, 30),
    ("c", 1): ReferenceRow(9.97e-10, 1.00e+0, 3, 12),
    ("c", 2): ReferenceRow(3.99e-09, 9.99e-1, 3, 17),
    ("c", 3): ReferenceRow(1.59e-08, 9.97e-1, 3, 24),
    ("c", 4): ReferenceRow(6.32e-08, 9.90e-1, 4, 30),
    ("d", 1): ReferenceRow(2.49e-10, 1.00e+0, 2, 12),
    ("d", 2): ReferenceRow(9.97e-10, 1.00e+0, 3, 17),
    ("d", 3): ReferenceRow(3.98e-09, 9.99e-1, 3, 22),
    ("d", 4): ReferenceRow(1.59e-08, 9.95e-1, 4, 29),
}


def all_cases(alpha_bj: float = 1.0):
    """All 16 (case, level) configurations in table order."""
    return [CaseConfig(label, level, alpha_bj)
            for label in CASE_LABELS for level in LEVELS]


def round_to_sig(value: float, digits: int = 3) -> float:
    """Round to the given number of significant digits."""
    if value == 0.0:
        return 0.0
    from math import floor, log10
    return round(value, -int(floor(log10(abs(value)))) + digits - 1)
