"""Conjugate-gradient, preconditioned CG and Richardson iterations over
abstract symmetric positive definite operators.

Operators are callables on dense vectors.  The stopping rule for all
methods is the relative Euclidean norm of the true (unpreconditioned)
residual, ||b - A x|| / ||b|| <= tol, with a zero initial guess by
default; the iteration count is the number of updates after which the
rule first holds, and a zero right-hand side counts as zero iterations.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .weights import WeightPair

Operator = Callable[[np.ndarray], np.ndarray]


class IndefiniteOperatorError(RuntimeError):
    """An operator supposed to be SPD produced a nonpositive energy."""


@dataclass
class SolveReport:
    """Outcome of one iterative (or direct) solve."""

    method: str
    iterations: int
    converged: bool
    tol: float
    residual_history: list[float] = field(default_factory=list)
    weights: Optional[WeightPair] = None
    wall_time: float = 0.0
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "iterations": self.iterations,
            "converged": self.converged,
            "tol": self.tol,
            "residual_history": list(self.residual_history),
            "wall_time": self.wall_time,
            "config": self.config,
        }
        if self.weights is not None:
            out["weights"] = {"alpha_f": self.weights.alpha_f,
                              "alpha_p": self.weights.alpha_p}
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _check_finite(value: float, what: str):
    if not np.isfinite(value):
        raise RuntimeError(f"non-finite residual in {what}")


def _pcg_loop(apply_A: Operator, apply_P: Optional[Operator], b: np.ndarray,
              tol: float, max_iter: int, x0: Optional[np.ndarray],
              method: str, weights: Optional[WeightPair],
              config: Optional[dict]):
    start = time.perf_counter()
    b = np.asarray(b, dtype=float)
    norm_b = np.linalg.norm(b)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)

    def report(iters, converged, history):
        return SolveReport(method=method, iterations=iters,
                           converged=converged, tol=tol,
                           residual_history=history, weights=weights,
                           wall_time=time.perf_counter() - start,
                           config=dict(config or {}))

    if norm_b == 0.0:
        return x, report(0, True, [0.0])

    r = b - apply_A(x) if x0 is not None else b.copy()
    rel = np.linalg.norm(r) / norm_b
    _check_finite(rel, method)
    history = [float(rel)]
    if rel <= tol:
        return x, report(0, True, history)

    z = apply_P(r) if apply_P is not None else r
    p = z.copy()
    rz = float(r @ z)
    if rz <= 0.0:
        raise IndefiniteOperatorError(
            f"{method}: preconditioner produced nonpositive r.P.r = {rz}")

    for it in range(1, max_iter + 1):
        Ap = apply_A(p)
        pAp = float(p @ Ap)
        if pAp <= 0.0:
            raise IndefiniteOperatorError(
                f"{method}: system operator produced nonpositive p.A.p = {pAp}")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        rel = np.linalg.norm(r) / norm_b
        _check_finite(rel, method)
        history.append(float(rel))
        if rel <= tol:
            return x, report(it, True, history)
        z = apply_P(r) if apply_P is not None else r
        rz_new = float(r @ z)
        if rz_new <= 0.0:
            raise IndefiniteOperatorError(
                f"{method}: preconditioner produced nonpositive r.P.r = {rz_new}")
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, report(max_iter, False, history)


def cg(apply_A: Operator, b: np.ndarray, tol: float = 1e-9,
       max_iter: int = 500, x0: Optional[np.ndarray] = None,
       config: Optional[dict] = None):
    """Plain conjugate gradients; returns (solution, SolveReport)."""
    return _pcg_loop(apply_A, None, b, tol, max_iter, x0, "cg", None, config)


def pcg(apply_A: Operator, apply_P: Operator, b: np.ndarray,
        tol: float = 1e-9, max_iter: int = 500,
        x0: Optional[np.ndarray] = None,
        weights: Optional[WeightPair] = None,
        config: Optional[dict] = None):
    """Preconditioned conjugate gradients; with ``apply_P = None`` the
    iterate sequence is identical to plain cg."""
    if apply_P is None:
        return _pcg_loop(apply_A, None, b, tol, max_iter, x0, "pcg",
                         weights, config)
    return _pcg_loop(apply_A, apply_P, b, tol, max_iter, x0, "pcg",
                     weights, config)


def richardson(apply_A: Operator, apply_P: Operator, b: np.ndarray,
               tol: float = 1e-9, max_iter: int = 500,
               relaxation: float = 1.0, x0: Optional[np.ndarray] = None,
               weights: Optional[WeightPair] = None,
               config: Optional[dict] = None):
    """Stationary iteration x <- x - relaxation * P (A x - b)."""
    start = time.perf_counter()
    b = np.asarray(b, dtype=float)
    norm_b = np.linalg.norm(b)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)

    def report(iters, converged, history):
        return SolveReport(method="richardson", iterations=iters,
                           converged=converged, tol=tol,
                           residual_history=history, weights=weights,
                           wall_time=time.perf_counter() - start,
                           config=dict(config or {}))

    if norm_b == 0.0:
        return x, report(0, True, [0.0])

    r = apply_A(x) - b
    rel = np.linalg.norm(r) / norm_b
    _check_finite(rel, "richardson")
    history = [float(rel)]
    if rel <= tol:
        return x, report(0, True, history)
    for it in range(1, max_iter + 1):
        x -= relaxation * apply_P(r)
        r = apply_A(x) - b
        rel = np.linalg.norm(r) / norm_b
        _check_finite(rel, "richardson")
        history.append(float(rel))
        if rel <= tol:
            return x, report(it, True, history)
    return x, report(max_iter, False, history)
