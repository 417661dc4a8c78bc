"""Reference shape functions on [-1, 1]^2 and element matrices for uniform squares."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from convhelm.dispersion import Element

# local DOF order: right, left, top, bottom (edge midpoints)
RT_EDGE_MIDPOINTS = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
# local DOF order: counterclockwise corners from (-1, -1)
Q1_CORNERS = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def tensor_gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss rule on [-1, 1]^2: points (n*n, 2) and weights (n*n,)."""
    x, w = gauss_legendre(n)
    xi, eta = np.meshgrid(x, x, indexing="ij")
    pts = np.column_stack([xi.ravel(), eta.ravel()])
    return pts, np.outer(w, w).ravel()


def _rt_monomials(xi, eta):
    xi, eta = np.asarray(xi, float), np.asarray(eta, float)
    return np.stack([np.ones_like(xi), xi, eta, xi**2 - eta**2], axis=-1)


def _rt_monomial_grads(xi, eta):
    xi, eta = np.asarray(xi, float), np.asarray(eta, float)
    zero, one = np.zeros_like(xi), np.ones_like(xi)
    dxi = np.stack([zero, one, zero, 2 * xi], axis=-1)
    deta = np.stack([zero, zero, one, -2 * eta], axis=-1)
    return np.stack([dxi, deta], axis=-1)


def edge_points(face: int, s) -> np.ndarray:
    """Points on local face ``face`` (right, left, top, bottom) at edge parameter ``s``."""
    s = np.asarray(s, float)
    one = np.ones_like(s)
    return {
        0: np.stack([one, s], -1),
        1: np.stack([-one, s], -1),
        2: np.stack([s, one], -1),
        3: np.stack([s, -one], -1),
    }[face]


FACE_NORMALS = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])


@dataclass(frozen=True)
class ShapeSet:
    """Four reference shape functions and their gradients.

    For the Rannacher-Turek elements ``coeffs[m, j]`` is the weight of monomial
    ``m`` of ``{1, xi, eta, xi^2 - eta^2}`` in shape function ``j``.
    """

    element: Element
    coeffs: np.ndarray | None = None

    def values(self, xi, eta) -> np.ndarray:
        if self.element is Element.P1C:
            xi, eta = np.asarray(xi, float), np.asarray(eta, float)
            cx, cy = Q1_CORNERS[:, 0], Q1_CORNERS[:, 1]
            return 0.25 * (1 + xi[..., None] * cx) * (1 + eta[..., None] * cy)
        return _rt_monomials(xi, eta) @ self.coeffs

    def gradients(self, xi, eta) -> np.ndarray:
        """Reference gradients with shape ``(..., 4, 2)``."""
        if self.element is Element.P1C:
            xi, eta = np.asarray(xi, float), np.asarray(eta, float)
            cx, cy = Q1_CORNERS[:, 0], Q1_CORNERS[:, 1]
            dxi = 0.25 * cx * (1 + eta[..., None] * cy)
            deta = 0.25 * cy * (1 + xi[..., None] * cx)
            return np.stack([dxi, deta], axis=-1)
        g = _rt_monomial_grads(xi, eta)  # (..., 4 monomials, 2)
        return np.einsum("...md,mj->...jd", g, self.coeffs)

    def dof_values(self, f) -> np.ndarray:
        """Apply the four local DOF functionals to ``f(xi, eta)`` (vectorised callable)."""
        if self.element is Element.P1C:
            return np.array([f(*c) for c in Q1_CORNERS])
        if self.element is Element.RT1NC:
            return np.array([f(*m) for m in RT_EDGE_MIDPOINTS])
        s, w = gauss_legendre(4)
        return np.array(
            [0.5 * np.sum(w * f(*edge_points(face, s).T)) for face in range(4)]
        )


@lru_cache(maxsize=None)
def reference_basis(element: Element) -> ShapeSet:
    element = Element(element)
    if element is Element.P1C:
        return ShapeSet(element)
    # vdm[l, m] = DOF_l(monomial_m); duality requires vdm @ coeffs = I
    probe = ShapeSet(element, np.eye(4))
    vdm = np.column_stack(
        [probe.dof_values(lambda x, y, m=m: _rt_monomials(x, y)[..., m]) for m in range(4)]
    )
    return ShapeSet(element, np.linalg.solve(vdm, np.eye(4)))


@dataclass(frozen=True)
class ElementMatrices:
    """Reference-element integrals; row index is the test function.

    On a square of side ``h``: stiffness ``(1-M^2) kxx + kyy``, mass ``h^2/4 * mass``,
    x-convection ``h/2 * conv_x`` (entry ``[i, j] = int dphi_j/dx phi_i``).
    """

    kxx: np.ndarray
    kyy: np.ndarray
    mass: np.ndarray
    conv_x: np.ndarray


@lru_cache(maxsize=None)
def element_matrices(element: Element, quad_order: int = 3) -> ElementMatrices:
    shapes = reference_basis(Element(element))
    pts, w = tensor_gauss(quad_order)
    phi = shapes.values(pts[:, 0], pts[:, 1])  # (q, 4)
    dphi = shapes.gradients(pts[:, 0], pts[:, 1])  # (q, 4, 2)
    kxx = np.einsum("q,qi,qj->ij", w, dphi[..., 0], dphi[..., 0])
    kyy = np.einsum("q,qi,qj->ij", w, dphi[..., 1], dphi[..., 1])
    mass = np.einsum("q,qi,qj->ij", w, phi, phi)
    conv = np.einsum("q,qi,qj->ij", w, phi, dphi[..., 0])
    for arr in (kxx, kyy, mass, conv):
        arr.setflags(write=False)
    return ElementMatrices(kxx, kyy, mass, conv)
