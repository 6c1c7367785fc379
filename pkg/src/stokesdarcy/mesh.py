"""Structured quadrilateral meshes of rectangular subdomains.

Node coordinates are affine functions of integer grid indices, so a mesh
regenerates bitwise identically from (domain, nx, ny).  Each mesh
carries two nested node families on the same elements: a biquadratic
grid (9 nodes per element, spacing h/2) and a bilinear grid (4 corner
nodes per element, spacing h).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EDGES = ("bottom", "top", "left", "right")


@dataclass(frozen=True)
class RectDomain:
    """Axis-aligned rectangle (x_min, x_max) x (y_min, y_max)."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("degenerate rectangle")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min


class StructuredMesh:
    """Uniform nx-by-ny quadrilateral mesh with square elements of size h."""

    def __init__(self, domain: RectDomain, nx: int, ny: int):
        if nx < 1 or ny < 1:
            raise ValueError("need at least one element per direction")
        hx = domain.width / nx
        hy = domain.height / ny
        if abs(hx - hy) > 1e-12 * max(hx, hy):
            raise ValueError(
                f"elements must be square: h_x={hx} differs from h_y={hy}")
        self.domain = domain
        self.nx = int(nx)
        self.ny = int(ny)
        self.h = hx

    # -- biquadratic (Q2) node family -------------------------------------

    @property
    def q2_shape(self) -> tuple[int, int]:
        return (2 * self.nx + 1, 2 * self.ny + 1)

    @property
    def n_q2(self) -> int:
        px, py = self.q2_shape
        return px * py

    def q2_index(self, i, j):
        """Global Q2 node id of grid position (i, j), x index fastest."""
        return np.asarray(i) + np.asarray(j) * (2 * self.nx + 1)

    def q2_coords(self) -> np.ndarray:
        px, py = self.q2_shape
        i = np.arange(px)
        j = np.arange(py)
        half = self.h / 2.0
        x = self.domain.x_min + i * half
        y = self.domain.y_min + j * half
        xx, yy = np.meshgrid(x, y, indexing="xy")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def q2_connectivity(self) -> np.ndarray:
        """(n_elements, 9) Q2 node ids, local numbering ix + 3*iy."""
        ex, ey = np.meshgrid(np.arange(self.nx), np.arange(self.ny),
                             indexing="xy")
        i0 = 2 * ex.ravel()
        j0 = 2 * ey.ravel()
        conn = np.empty((self.nx * self.ny, 9), dtype=np.int64)
        for loc in range(9):
            di, dj = loc % 3, loc // 3
            conn[:, loc] = self.q2_index(i0 + di, j0 + dj)
        return conn

    def q2_edge_nodes(self, edge: str) -> np.ndarray:
        """Q2 node ids along one boundary edge, ordered by the running
        coordinate (x for bottom/top, y for left/right)."""
        px, py = self.q2_shape
        if edge == "bottom":
            return self.q2_index(np.arange(px), 0)
        if edge == "top":
            return self.q2_index(np.arange(px), py - 1)
        if edge == "left":
            return self.q2_index(0, np.arange(py))
        if edge == "right":
            return self.q2_index(px - 1, np.arange(py))
        raise ValueError(f"edge must be one of {_EDGES}, got {edge!r}")

    # -- bilinear (Q1) node family -----------------------------------------

    @property
    def n_q1(self) -> int:
        return (self.nx + 1) * (self.ny + 1)

    def q1_index(self, i, j):
        return np.asarray(i) + np.asarray(j) * (self.nx + 1)

    def q1_coords(self) -> np.ndarray:
        i = np.arange(self.nx + 1)
        j = np.arange(self.ny + 1)
        x = self.domain.x_min + i * self.h
        y = self.domain.y_min + j * self.h
        xx, yy = np.meshgrid(x, y, indexing="xy")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def q1_connectivity(self) -> np.ndarray:
        """(n_elements, 4) corner node ids, local numbering ix + 2*iy."""
        ex, ey = np.meshgrid(np.arange(self.nx), np.arange(self.ny),
                             indexing="xy")
        i0 = ex.ravel()
        j0 = ey.ravel()
        conn = np.empty((self.nx * self.ny, 4), dtype=np.int64)
        for loc in range(4):
            di, dj = loc % 2, loc // 2
            conn[:, loc] = self.q1_index(i0 + di, j0 + dj)
        return conn

    @property
    def n_elements(self) -> int:
        return self.nx * self.ny


@dataclass(frozen=True)
class InterfaceTrace:
    """Matched interface node lists of two meshes sharing a horizontal edge.

    Both lists run in ascending x and have length 2*nx + 1; adjacent
    nodes are spaced h/2 apart.
    """

    fluid_nodes: np.ndarray
    porous_nodes: np.ndarray
    spacing: float
    length: float

    @property
    def n_nodes(self) -> int:
        return len(self.fluid_nodes)

    @property
    def n_edges(self) -> int:
        return (self.n_nodes - 1) // 2


def build_mesh(domain: RectDomain, nx: int, ny: int) -> StructuredMesh:
    """Build a structured mesh; rejects non-square elements."""
    return StructuredMesh(domain, nx, ny)


def extract_interface(mesh_f: StructuredMesh,
                      mesh_p: StructuredMesh) -> InterfaceTrace:
    """Identify matching interface nodes: fluid bottom edge = porous top edge.

    The fluid mesh must sit directly above the porous mesh; the traces
    must agree node by node to machine precision.
    """
    fd, pd = mesh_f.domain, mesh_p.domain
    if mesh_f.nx != mesh_p.nx:
        raise ValueError(
            f"interface resolutions differ: {mesh_f.nx} vs {mesh_p.nx} elements")
    if abs(mesh_f.h - mesh_p.h) > 1e-12 * mesh_f.h:
        raise ValueError("meshes have different element sizes")
    if not (fd.x_min == pd.x_min and fd.x_max == pd.x_max):
        raise ValueError("meshes do not share the same x extent")
    if abs(fd.y_min - pd.y_max) > 1e-12 * max(abs(fd.y_min), 1.0):
        raise ValueError("fluid bottom edge does not meet porous top edge")

    fluid_nodes = mesh_f.q2_edge_nodes("bottom")
    porous_nodes = mesh_p.q2_edge_nodes("top")
    xf = mesh_f.q2_coords()[fluid_nodes]
    xp = mesh_p.q2_coords()[porous_nodes]
    if not np.allclose(xf, xp, rtol=0.0, atol=1e-13 * max(fd.width, 1.0)):
        raise ValueError("interface node coordinates do not match")
    return InterfaceTrace(fluid_nodes=fluid_nodes, porous_nodes=porous_nodes,
                          spacing=mesh_f.h / 2.0, length=fd.width)
