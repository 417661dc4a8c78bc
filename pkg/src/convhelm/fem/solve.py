"""Plane-wave verification solves: assemble, factorize, measure the energy error."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

from convhelm import linsolve
from convhelm.dispersion import Element, FlowParams
from convhelm.fem.assembly import energy_norm_error, plane_wave_problem


@dataclass(frozen=True)
class FemResult:
    element: Element
    mach: float
    theta: float
    omega: float
    n: int
    h: float
    err_energy: float
    residual: float
    wall_time: float
    n_dofs: int


def mesh_size_for(omega: float) -> int:
    """Smallest ``n`` on the unit square with ``omega^3 h^2 <= 1``."""
    n = math.ceil(omega**1.5)
    # guard against omega**1.5 landing a hair above an integer
    return n - 1 if n > 1 and omega**3 / (n - 1) ** 2 <= 1.0 else n


def solve_plane_wave(
    element: Element,
    flow: FlowParams | float,
    omega: float,
    theta: float,
    n: int | None = None,
    method: str = "sparse",
) -> FemResult:
    """Solve the impedance problem whose exact solution is a plane wave and measure the error."""
    flow = FlowParams.coerce(flow)
    element = Element(element)
    n = mesh_size_for(omega) if n is None else n
    t0 = time.perf_counter()
    mesh, wave, system = plane_wave_problem(n, element, flow, omega, theta)
    if method == "banded":
        matrix = linsolve.BandedComplexMatrix.from_sparse(system.matrix)
    elif method == "sparse":
        matrix = system.matrix
    else:
        raise ValueError(f"unknown solver method {method!r}")
    lu = linsolve.factorize(matrix)
    x = linsolve.solve(lu, system.rhs)
    residual = linsolve.relative_residual(system.matrix, x, system.rhs)
    err = energy_norm_error(x, wave, mesh, element, omega, flow)
    return FemResult(
        element=element,
        mach=flow.mach,
        theta=theta,
        omega=float(omega),
        n=n,
        h=mesh.h,
        err_energy=err,
        residual=residual,
        wall_time=time.perf_counter() - t0,
        n_dofs=system.dofmap.n_dofs,
    )
