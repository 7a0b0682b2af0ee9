"""Free boundary minimal surfaces in triaxial ellipsoids.

Sweepout construction, equivariant area flow, second-variation spectra,
and voxel isoperimetry for surfaces meeting the ellipsoid boundary
orthogonally, together with a verification harness for the certified
existence statements.
"""

from .ellipsoid import (
    EllipsoidParams,
    apply_group,
    classify_planar_chords,
    compose,
    group_elements,
    planar_disc_area,
    project_to_boundary,
    rotation_matrix,
)
from .mesh import (
    SurfaceMesh,
    TAG_FIXED_ARC,
    TAG_FREE_BOUNDARY,
    TAG_INTERIOR,
    area,
    axis_intersections,
    free_boundary_residuals,
    mean_curvature_residual,
    symmetrize,
    topology,
    volumes_split,
)
from .meshio import read_mesh, write_mesh
from .remesh import RemeshReport, remesh
from .sweepout import (
    AreaProfile,
    NeckParams,
    SweepoutError,
    SweepoutFamily,
    area_profile,
    slice_C,
    slice_annulus,
    slice_S,
    slice_g1b1,
    sweepout_family,
)
from .triangulate import planar_disc_mesh, tube_mesh

__all__ = [
    "apply_group",
    "area",
    "area_profile",
    "AreaProfile",
    "axis_intersections",
    "classify_planar_chords",
    "compose",
    "EllipsoidParams",
    "free_boundary_residuals",
    "group_elements",
    "mean_curvature_residual",
    "NeckParams",
    "planar_disc_area",
    "planar_disc_mesh",
    "project_to_boundary",
    "read_mesh",
    "remesh",
    "RemeshReport",
    "rotation_matrix",
    "slice_annulus",
    "slice_C",
    "slice_g1b1",
    "slice_S",
    "SurfaceMesh",
    "sweepout_family",
    "SweepoutError",
    "SweepoutFamily",
    "symmetrize",
    "TAG_FIXED_ARC",
    "TAG_FREE_BOUNDARY",
    "TAG_INTERIOR",
    "topology",
    "tube_mesh",
    "volumes_split",
    "write_mesh",
]
