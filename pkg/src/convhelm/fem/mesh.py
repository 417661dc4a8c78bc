"""Structured n x n square meshes and their DOF numbering.

Nodes are numbered lexicographically, ``node(i, j) = j * (n + 1) + i``.  Edges
are numbered row by row in increasing ``y`` of their midpoints: the ``n``
horizontal edges on the line ``y = y0 + j h`` come first, followed by the
``n + 1`` vertical edges of the element row above it.  This keeps the matrix
bandwidth at about ``2n`` for edge elements and ``n + 2`` for nodal ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from convhelm.dispersion import Element
from convhelm.fem.basis import FACE_NORMALS


@dataclass(frozen=True)
class QuadMesh:
    x0: float
    y0: float
    x1: float
    y1: float
    n: int

    @property
    def h(self) -> float:
        return (self.x1 - self.x0) / self.n

    @property
    def n_elements(self) -> int:
        return self.n * self.n

    @property
    def n_nodes(self) -> int:
        return (self.n + 1) ** 2

    @property
    def n_edges(self) -> int:
        return 2 * self.n * (self.n + 1)

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    @cached_property
    def element_ij(self) -> np.ndarray:
        """``(n^2, 2)`` integer element indices, element ``e = j * n + i``."""
        j, i = np.divmod(np.arange(self.n_elements), self.n)
        return np.column_stack([i, j])

    @cached_property
    def element_centers(self) -> np.ndarray:
        return np.column_stack(
            [
                self.x0 + (self.element_ij[:, 0] + 0.5) * self.h,
                self.y0 + (self.element_ij[:, 1] + 0.5) * self.h,
            ]
        )

    def to_physical(self, elements: np.ndarray, ref_pts: np.ndarray) -> np.ndarray:
        """Map reference points ``(q, 2)`` on each element to ``(e, q, 2)``."""
        return self.element_centers[elements][:, None, :] + 0.5 * self.h * ref_pts[None]


def build_mesh(domain: tuple[float, float, float, float], n: int) -> QuadMesh:
    """Uniform mesh of the square ``domain = (x0, y0, x1, y1)`` with ``n`` cells per side."""
    x0, y0, x1, y1 = map(float, domain)
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"degenerate domain {domain!r}")
    if not np.isclose(x1 - x0, y1 - y0, rtol=1e-12, atol=0.0):
        raise ValueError(f"domain must be square, got {domain!r}")
    return QuadMesh(x0, y0, x1, y1, int(n))


@dataclass(frozen=True)
class BoundaryFaces:
    """Element faces lying on the domain boundary."""

    elements: np.ndarray
    faces: np.ndarray  # local face index: right, left, top, bottom

    @property
    def normals(self) -> np.ndarray:
        return FACE_NORMALS[self.faces]


@dataclass(frozen=True)
class DofMap:
    mesh: QuadMesh
    element: Element
    element_dofs: np.ndarray  # (n^2, 4)
    dof_coords: np.ndarray  # (N, 2): node or edge midpoint
    horizontal: np.ndarray  # (N,) True for horizontal edges (edge DOFs only)
    boundary: np.ndarray  # (N,) bool

    @property
    def n_dofs(self) -> int:
        return len(self.dof_coords)

    @cached_property
    def boundary_faces(self) -> BoundaryFaces:
        n = self.mesh.n
        i, j = self.mesh.element_ij.T
        elems, faces = [], []
        for face, mask in enumerate([i == n - 1, i == 0, j == n - 1, j == 0]):
            idx = np.flatnonzero(mask)
            elems.append(idx)
            faces.append(np.full(len(idx), face))
        return BoundaryFaces(np.concatenate(elems), np.concatenate(faces))


@lru_cache(maxsize=16)
def build_dofmap(mesh: QuadMesh, element: Element) -> DofMap:
    element = Element(element)
    n, h = mesh.n, mesh.h
    i, j = mesh.element_ij.T
    if element is Element.P1C:
        node = lambda a, b: b * (n + 1) + a  # noqa: E731
        dofs = np.column_stack([node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)])
        jj, ii = np.divmod(np.arange(mesh.n_nodes), n + 1)
        coords = np.column_stack([mesh.x0 + ii * h, mesh.y0 + jj * h])
        boundary = (ii == 0) | (ii == n) | (jj == 0) | (jj == n)
        horizontal = np.zeros(len(coords), dtype=bool)
    else:
        stride = 2 * n + 1
        hor = lambda a, b: b * stride + a  # noqa: E731
        ver = lambda a, b: b * stride + n + a  # noqa: E731
        dofs = np.column_stack([ver(i + 1, j), ver(i, j), hor(i, j + 1), hor(i, j)])
        n_edges = mesh.n_edges
        row, col = np.divmod(np.arange(n_edges), stride)
        horizontal = col < n
        a = np.where(horizontal, col, col - n)
        x = np.where(horizontal, mesh.x0 + (a + 0.5) * h, mesh.x0 + a * h)
        y = np.where(horizontal, mesh.y0 + row * h, mesh.y0 + (row + 0.5) * h)
        coords = np.column_stack([x, y])
        boundary = np.where(horizontal, (row == 0) | (row == n), (a == 0) | (a == n))
    for arr in (dofs, coords, horizontal, boundary):
        arr.setflags(write=False)
    return DofMap(mesh, element, dofs, coords, horizontal, boundary)
