"""Assembly of the convected Helmholtz variational form with impedance boundary.

Find ``p`` such that for all test functions ``v``::

    (A grad p, grad v) - 2 i w (M . grad p, v) - w^2 (p, v) - i w <p, v> = <g, v>

with ``A = diag(1 - M^2, 1)`` and ``M = (M, 0)``.  Inner products are bilinear
(no complex conjugation), so the assembled matrix is complex symmetric apart
from the convection block.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from convhelm.dispersion import Element, FlowParams, Formulation, SchemeId, continuous_omega
from convhelm.fem.basis import (
    edge_points,
    element_matrices,
    gauss_legendre,
    reference_basis,
    tensor_gauss,
)
from convhelm.fem.mesh import DofMap, QuadMesh, build_dofmap, build_mesh


@dataclass(frozen=True)
class PlaneWave:
    """Exact solution ``exp(i k x . e_r)`` with ``e_r = (cos theta, sin theta)``."""

    k: float
    theta: float

    @classmethod
    def for_frequency(cls, omega: float, theta: float, flow: FlowParams | float) -> "PlaneWave":
        """Wave whose continuous dispersion relation gives frequency ``omega``."""
        flow = FlowParams.coerce(flow)
        return cls(omega / (1.0 + flow.mach * math.cos(theta)), theta)

    @property
    def direction(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    @property
    def vector(self) -> np.ndarray:
        return self.k * self.direction

    def value(self, xy: np.ndarray) -> np.ndarray:
        return np.exp(1j * (xy @ self.vector))

    def gradient(self, xy: np.ndarray) -> np.ndarray:
        return 1j * self.value(xy)[..., None] * self.vector

    def edge_mean(self, midpoint: np.ndarray, horizontal: np.ndarray, h: float) -> np.ndarray:
        """Exact mean over axis-aligned edges of length ``h`` centred at ``midpoint``."""
        kt = np.where(horizontal, self.vector[0], self.vector[1])
        return self.value(midpoint) * np.sinc(kt * h / (2.0 * math.pi))

    def impedance_data(self, xy: np.ndarray, normal: np.ndarray, omega: float, flow: FlowParams) -> np.ndarray:
        """``g = nu . (A grad p) - i w p = i (k nu . (A e_r) - w) p``."""
        a_er = flow.anisotropy @ self.direction
        return 1j * (self.k * (normal @ a_er) - omega) * self.value(xy)


@dataclass(frozen=True)
class FormBlocks:
    """Real sparse blocks of the form; rows index test functions."""

    stiffness: sp.csr_matrix
    convection: sp.csr_matrix
    mass: sp.csr_matrix
    boundary_mass: sp.csr_matrix


@dataclass(frozen=True)
class AssembledSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    omega: float
    flow: FlowParams
    scheme: SchemeId
    dofmap: DofMap

    @property
    def mesh(self) -> QuadMesh:
        return self.dofmap.mesh


def boundary_rule(element: Element) -> tuple[np.ndarray, np.ndarray]:
    """Edge quadrature on [-1, 1]: midpoint for RT1, 3-point Gauss for RT2, 2-point Gauss for Q1.

    RT2 functions are not pinned to their midpoint values; the midpoint rule
    there leaves an inconsistent boundary term that drags the energy-error
    rate towards h^(1/2).  Three points integrate the quartic edge products exactly.
    """
    element = Element(element)
    if element is Element.P1C:
        return gauss_legendre(2)
    if element is Element.RT2NC:
        return gauss_legendre(3)
    return np.array([0.0]), np.array([2.0])


def _scatter(dofmap: DofMap, local: np.ndarray) -> sp.csr_matrix:
    """Sum per-element 4x4 blocks (same block or one per element) into a CSR matrix."""
    dofs = dofmap.element_dofs
    ne = len(dofs)
    blocks = np.broadcast_to(local, (ne, 4, 4))
    rows = np.repeat(dofs, 4, axis=1).ravel()
    cols = np.tile(dofs, (1, 4)).ravel()
    n = dofmap.n_dofs
    mat = sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def _boundary_face_blocks(dofmap: DofMap) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shape values at boundary quadrature points: elements, faces, (faces, q, 4), weights."""
    bf = dofmap.boundary_faces
    s, w = boundary_rule(dofmap.element)
    shapes = reference_basis(dofmap.element)
    per_face = np.stack([shapes.values(*edge_points(f, s).T) for f in range(4)])  # (4, q, 4)
    return per_face[bf.faces], w, s


def assemble_blocks(mesh: QuadMesh, element: Element, flow: FlowParams | float, quad_order: int = 3) -> FormBlocks:
    flow = FlowParams.coerce(flow)
    dofmap = build_dofmap(mesh, element)
    em = element_matrices(Element(element), quad_order)
    h = mesh.h
    stiff = _scatter(dofmap, flow.a11 * em.kxx + em.kyy)
    conv = _scatter(dofmap, 0.5 * h * em.conv_x)
    mass = _scatter(dofmap, 0.25 * h * h * em.mass)
    vals, w, _ = _boundary_face_blocks(dofmap)
    bmass = 0.5 * h * np.einsum("q,fqi,fqj->fij", w, vals, vals)
    bdofs = dofmap.element_dofs[dofmap.boundary_faces.elements]
    rows = np.repeat(bdofs, 4, axis=1).ravel()
    cols = np.tile(bdofs, (1, 4)).ravel()
    n = dofmap.n_dofs
    bnd = sp.coo_matrix((bmass.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    bnd.sum_duplicates()
    bnd.sort_indices()
    return FormBlocks(stiff, conv, mass, bnd)


def assemble(
    mesh: QuadMesh,
    scheme: SchemeId | Element,
    flow: FlowParams | float,
    omega: float,
    wave: PlaneWave,
    quad_order: int = 3,
) -> AssembledSystem:
    """Assemble matrix and impedance right-hand side for the plane wave ``wave``."""
    flow = FlowParams.coerce(flow)
    if not isinstance(scheme, SchemeId):
        scheme = SchemeId(Element(scheme))
    if scheme.formulation is not Formulation.CONVECTED:
        raise ValueError("only the convected formulation has a boundary-value problem")
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    blocks = assemble_blocks(mesh, scheme.element, flow, quad_order)
    m = flow.mach
    matrix = (
        blocks.stiffness.astype(complex)
        - (2j * omega * m) * blocks.convection
        - omega**2 * blocks.mass
        - 1j * omega * blocks.boundary_mass
    ).tocsr()
    dofmap = build_dofmap(mesh, scheme.element)
    vals, w, s = _boundary_face_blocks(dofmap)
    bf = dofmap.boundary_faces
    ref = np.stack([edge_points(f, s) for f in range(4)])[bf.faces]  # (faces, q, 2)
    xy = mesh.element_centers[bf.elements][:, None, :] + 0.5 * mesh.h * ref
    g = wave.impedance_data(xy, bf.normals[:, None, :], omega, flow)  # (faces, q)
    local = 0.5 * mesh.h * np.einsum("q,fq,fqi->fi", w, g, vals)
    rhs = np.zeros(dofmap.n_dofs, dtype=complex)
    np.add.at(rhs, dofmap.element_dofs[bf.elements].ravel(), local.ravel())
    return AssembledSystem(matrix, rhs, float(omega), flow, scheme, dofmap)


def interpolate_exact(wave: PlaneWave, mesh: QuadMesh, element: Element) -> np.ndarray:
    """DOF-wise interpolant: point values (Q1 nodes, RT1 midpoints) or edge means (RT2)."""
    dofmap = build_dofmap(mesh, element)
    if dofmap.element is Element.RT2NC:
        return wave.edge_mean(dofmap.dof_coords, dofmap.horizontal, mesh.h)
    return wave.value(dofmap.dof_coords)


def energy_norm_error(
    solution: np.ndarray,
    wave: PlaneWave,
    mesh: QuadMesh,
    element: Element,
    omega: float,
    flow: FlowParams | float,
    quad_order: int = 3,
) -> float:
    """Broken energy norm ``||sqrt(A) grad(p - p_h)||^2 + w^2 ||p - p_h||^2``, square-rooted."""
    flow = FlowParams.coerce(flow)
    dofmap = build_dofmap(mesh, element)
    solution = np.asarray(solution)
    if solution.shape != (dofmap.n_dofs,):
        raise ValueError(f"solution has shape {solution.shape}, expected ({dofmap.n_dofs},)")
    pts, w = tensor_gauss(quad_order)
    shapes = reference_basis(dofmap.element)
    phi = shapes.values(pts[:, 0], pts[:, 1])  # (q, 4)
    dphi = shapes.gradients(pts[:, 0], pts[:, 1]) * (2.0 / mesh.h)  # physical
    coef = solution[dofmap.element_dofs]  # (e, 4)
    uh = coef @ phi.T  # (e, q)
    duh = np.einsum("ej,qjd->eqd", coef, dphi)
    xy = mesh.to_physical(np.arange(mesh.n_elements), pts)
    err = wave.value(xy) - uh
    derr = wave.gradient(xy) - duh
    density = flow.a11 * np.abs(derr[..., 0]) ** 2 + np.abs(derr[..., 1]) ** 2 + omega**2 * np.abs(err) ** 2
    total = 0.25 * mesh.h**2 * np.sum(density @ w)
    return math.sqrt(total)


def plane_wave_problem(
    n: int,
    element: Element,
    flow: FlowParams | float,
    omega: float,
    theta: float,
    domain: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0),
) -> tuple[QuadMesh, PlaneWave, AssembledSystem]:
    flow = FlowParams.coerce(flow)
    mesh = build_mesh(domain, n)
    wave = PlaneWave.for_frequency(omega, theta, flow)
    assert math.isclose(continuous_omega(wave.k, theta, flow), omega, rel_tol=1e-14)
    return mesh, wave, assemble(mesh, SchemeId(Element(element)), flow, omega, wave)
