"""Dispersion relations re-derived from an assembled 2 x 2 element patch.

The patch ``[-1, 1]^2`` (``h = 1``) is assembled with the same element matrices
as the global solver.  The test function is the global basis function of the
centre node (Q1) or the sum of the four basis functions of the edges meeting at
the centre (RT).  Substituting plane-wave DOF values into that single equation
gives a quadratic in ``omega h``.

Row sums of the stiffness and convection rows vanish (constants are in every
local space), so the wave is entered as ``p_j - 1``; this keeps ``c`` accurate
to full relative precision even for ``kappa ~ 1e-2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from convhelm.dispersion import (
    DENOMINATOR_TOL,
    Element,
    FlowParams,
    Formulation,
    InvalidProbeError,
    QuadraticInOmega,
    SchemeId,
    WaveProbe,
    helmholtz_k3,
)
from convhelm.fem.assembly import assemble_blocks
from convhelm.fem.mesh import build_dofmap, build_mesh


@dataclass(frozen=True)
class PatchRows:
    """Coefficients of the patch equation, one entry per patch DOF."""

    coords: np.ndarray
    horizontal: np.ndarray
    stiffness: np.ndarray
    convection: np.ndarray
    mass: np.ndarray
    test_dofs: np.ndarray


def patch_rows(element: Element, flow: FlowParams | float) -> PatchRows:
    element = Element(element)
    mesh = build_mesh((-1.0, -1.0, 1.0, 1.0), 2)
    dofmap = build_dofmap(mesh, element)
    blocks = assemble_blocks(mesh, element, flow)
    r = np.linalg.norm(dofmap.dof_coords, axis=1)
    test = np.flatnonzero(r < 0.75)  # centre node, or the four inner edges
    expected = 1 if element is Element.P1C else 4
    assert len(test) == expected, test

    def row(mat):
        return np.asarray(mat[test].sum(axis=0)).ravel()

    return PatchRows(
        dofmap.dof_coords,
        dofmap.horizontal,
        row(blocks.stiffness),
        row(blocks.convection),
        row(blocks.mass),
        test,
    )


def _wave_minus_one(element: Element, k1: float, k2: float, coords, horizontal) -> np.ndarray:
    """``p_j - 1`` for the plane wave's DOF values, without cancellation."""
    phase = coords @ np.array([k1, k2])
    e_minus_1 = -2.0 * np.sin(phase / 2) ** 2 + 1j * np.sin(phase)
    if element is not Element.RT2NC:
        return e_minus_1
    # edge means: exp(i phase) * sinc(k_t / 2) with k_t the tangential component
    u = np.where(horizontal, k1, k2) / 2.0
    s = np.sinc(u / math.pi)
    small = np.abs(u) < 0.1
    u2 = u * u
    series = -u2 / 6 * (1 - u2 / 20 * (1 - u2 / 42 * (1 - u2 / 72 * (1 - u2 / 110))))
    s_minus_1 = np.where(small, series, s - 1.0)
    return s * e_minus_1 + s_minus_1


def stencil_oracle(scheme: SchemeId, probe: WaveProbe, flow: FlowParams | float) -> QuadraticInOmega:
    """Quadratic in ``omega h`` obtained from the assembled patch."""
    flow = FlowParams.coerce(flow)
    m = flow.mach
    rows = patch_rows(scheme.element, flow)
    k1, k2 = probe.components
    helm = scheme.formulation is Formulation.HELMHOLTZ
    if helm:
        k1 = helmholtz_k3(k1, probe.kappa, flow)
        if abs(k1) >= math.pi:
            raise InvalidProbeError(f"transformed component {k1:.6g} beyond the grid Nyquist limit")
    pm1 = _wave_minus_one(scheme.element, k1, k2, rows.coords, rows.horizontal)
    wave = pm1 + 1.0
    a = -(rows.mass @ wave)
    b = -2j * m * (rows.convection @ pm1)
    c = rows.stiffness @ pm1
    if helm:
        a, b = a / flow.a11, 0.0
    if abs(a.real) < DENOMINATOR_TOL:
        raise InvalidProbeError(f"{scheme}: patch mass term vanishes")
    return QuadraticInOmega(float(a.real), float(np.real(b)), float(c.real))
