"""Reference-element shape functions and Gauss quadrature.

Everything lives on the reference square [-1, 1]^2 (or segment [-1, 1]);
the mapping to a physical square of side h is the diagonal scaling
x = x0 + (xi + 1) * h/2, so gradients scale by 2/h and the Jacobian is
h^2/4 (h/2 on edges).
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss


def gauss_1d(n: int):
    """n-point Gauss-Legendre rule on [-1, 1] (exact to degree 2n-1)."""
    return leggauss(n)


def gauss_2d(n: int):
    """Tensor-product Gauss rule on [-1, 1]^2: (points (n*n, 2), weights)."""
    x, w = leggauss(n)
    xx, yy = np.meshgrid(x, x, indexing="xy")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    wts = np.outer(w, w).ravel()
    return pts, wts


def _shape_1d_q2(xi: np.ndarray):
    xi = np.asarray(xi, dtype=float)
    vals = np.stack([0.5 * xi * (xi - 1.0), 1.0 - xi**2,
                     0.5 * xi * (xi + 1.0)], axis=-1)
    grads = np.stack([xi - 0.5, -2.0 * xi, xi + 0.5], axis=-1)
    return vals, grads


def _shape_1d_q1(xi: np.ndarray):
    xi = np.asarray(xi, dtype=float)
    vals = np.stack([0.5 * (1.0 - xi), 0.5 * (1.0 + xi)], axis=-1)
    grads = np.stack([np.full_like(xi, -0.5), np.full_like(xi, 0.5)], axis=-1)
    return vals, grads


def shape_q2(points: np.ndarray):
    """Biquadratic shapes at reference points: (vals (npts, 9), grads (npts, 9, 2)).

    Local node numbering is tensorized, loc = ix + 3*iy with ix, iy in
    {0, 1, 2} running over xi then eta.
    """
    pts = np.atleast_2d(points)
    nx, dnx = _shape_1d_q2(pts[:, 0])
    ny, dny = _shape_1d_q2(pts[:, 1])
    ix = np.arange(9) % 3
    iy = np.arange(9) // 3
    vals = nx[:, ix] * ny[:, iy]
    grads = np.empty((len(pts), 9, 2))
    grads[:, :, 0] = dnx[:, ix] * ny[:, iy]
    grads[:, :, 1] = nx[:, ix] * dny[:, iy]
    return vals, grads


def shape_q1(points: np.ndarray):
    """Bilinear shapes: (vals (npts, 4), grads (npts, 4, 2)), loc = ix + 2*iy."""
    pts = np.atleast_2d(points)
    nx, dnx = _shape_1d_q1(pts[:, 0])
    ny, dny = _shape_1d_q1(pts[:, 1])
    ix = np.arange(4) % 2
    iy = np.arange(4) // 2
    vals = nx[:, ix] * ny[:, iy]
    grads = np.empty((len(pts), 4, 2))
    grads[:, :, 0] = dnx[:, ix] * ny[:, iy]
    grads[:, :, 1] = nx[:, ix] * dny[:, iy]
    return vals, grads


def shape_edge_q2(xi: np.ndarray):
    """Quadratic trace shapes on a reference edge: (vals (npts, 3), grads)."""
    return _shape_1d_q2(np.asarray(xi, dtype=float))
