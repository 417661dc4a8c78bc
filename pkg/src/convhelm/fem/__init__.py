"""Structured-mesh finite elements for the convected Helmholtz equation."""

from convhelm.fem.assembly import (
    AssembledSystem,
    FormBlocks,
    PlaneWave,
    assemble,
    assemble_blocks,
    energy_norm_error,
    interpolate_exact,
    plane_wave_problem,
)
from convhelm.fem.basis import ShapeSet, element_matrices, reference_basis
from convhelm.fem.mesh import DofMap, QuadMesh, build_dofmap, build_mesh
from convhelm.fem.oracle import patch_rows, stencil_oracle
from convhelm.fem.solve import FemResult, mesh_size_for, solve_plane_wave

__all__ = [
    "AssembledSystem",
    "DofMap",
    "FemResult",
    "FormBlocks",
    "PlaneWave",
    "QuadMesh",
    "ShapeSet",
    "assemble",
    "assemble_blocks",
    "build_dofmap",
    "build_mesh",
    "element_matrices",
    "energy_norm_error",
    "interpolate_exact",
    "mesh_size_for",
    "patch_rows",
    "plane_wave_problem",
    "reference_basis",
    "solve_plane_wave",
    "stencil_oracle",
]
