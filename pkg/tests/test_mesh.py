import numpy as np
import pytest

import oracles
from fbms.ellipsoid import EllipsoidParams, apply_group, group_elements
from fbms.mesh import (
    MeshGeometryError,
    SurfaceMesh,
    TAG_FREE_BOUNDARY,
    area,
    axis_intersections,
    boundary_edges,
    build_orbit_map,
    cot_laplacian,
    free_boundary_residuals,
    lumped_vertex_areas,
    mean_curvature_residual,
    mean_edge_length,
    self_intersection_count,
    symmetrize,
    topology,
    volumes_split,
)
from fbms.triangulate import planar_disc_mesh


def test_disc_area_matches_section(disc_tall, tall):
    exact = np.pi * tall.a1 * tall.a2
    assert area(disc_tall) == pytest.approx(exact, rel=1e-3)


def test_disc_topology(disc_tall):
    rep = topology(disc_tall)
    assert rep.euler == 1
    assert rep.boundary_components == 1
    assert rep.genus == 0
    assert rep.is_manifold


def test_disc_boundary_contact(disc_tall):
    res = free_boundary_residuals(disc_tall)
    assert res.max_distance < 1e-9
    assert res.max_angle < 1e-9


def test_disc_axis_reports(disc_tall):
    for iota in (1, 2):
        rep = axis_intersections(disc_tall, iota)
        assert rep.contains_arc
        assert rep.chain_coverage == pytest.approx(1.0, abs=1e-6)
        assert rep.count == 0
    rep = axis_intersections(disc_tall, 3)
    assert not rep.contains_arc
    assert rep.count == 1
    assert rep.crossings[0].angle == pytest.approx(np.pi / 2, abs=1e-12)


def test_tube_axis_reports(tube_ball):
    assert axis_intersections(tube_ball, 3).count == 0
    for iota in (1, 2):
        rep = axis_intersections(tube_ball, iota)
        assert rep.count == 2
        for c in rep.crossings:
            assert c.angle == pytest.approx(np.pi / 2, abs=1e-12)


def test_flat_disc_is_discretely_minimal(disc_tall):
    assert mean_curvature_residual(disc_tall) < 1e-10


def test_cot_laplacian_basics(disc_tall):
    L = cot_laplacian(disc_tall.verts, disc_tall.faces)
    rows = np.asarray(L.sum(axis=1)).ravel()
    assert np.abs(rows).max() < 1e-12
    x = disc_tall.verts[:, 0]
    assert x @ (L @ x) >= -1e-10
    va = lumped_vertex_areas(disc_tall.verts, disc_tall.faces)
    assert va.sum() == pytest.approx(area(disc_tall))


def test_symmetrize_restores_exactness(disc_tall, rng):
    m = disc_tall.copy()
    m.verts = m.verts + 1e-4 * rng.standard_normal(m.verts.shape)
    with pytest.raises(ValueError):
        m.validate()
    symmetrize(m)
    m.validate()
    # vertices with nontrivial stabilizer (on seams) stay pinned to them
    labels = group_elements(m.group)
    for gi, g in enumerate(labels):
        assert np.array_equal(m.verts[m.orbits[gi]], apply_group(g, m.verts))


def test_symmetrize_handles_fixed_points(ball, rng):
    m = planar_disc_mesh(ball, 3, h=0.25)
    m.verts = m.verts + 1e-5 * rng.standard_normal(m.verts.shape)
    symmetrize(m)
    m.validate()
    # the origin is fixed by the whole group and must return to it exactly
    at_origin = np.flatnonzero(np.all(m.verts == 0.0, axis=1))
    assert len(at_origin) == 1


def test_build_orbit_map_rejects_asymmetric(ball, rng):
    m = planar_disc_mesh(ball, 3, h=0.25)
    m.orbits = None
    m.verts = m.verts + 1e-2 * rng.standard_normal(m.verts.shape)
    with pytest.raises(MeshGeometryError):
        build_orbit_map(m, "D2")


def test_volumes_split_equator(disc_ball):
    v1, v2 = volumes_split(disc_ball, n=96)
    half = oracles.ball_volume(1.0) / 2.0
    assert v1 == pytest.approx(half, rel=0.01)
    assert v2 == pytest.approx(half, rel=0.01)


def test_volumes_split_offset_cap(ball):
    r = np.sqrt(3.0) / 2.0
    flat = planar_disc_mesh(EllipsoidParams(r, r, 1.0), 3, h=0.03)
    m = SurfaceMesh(
        flat.verts + [0.0, 0.0, 0.5],
        flat.faces,
        flat.tags,
        None,
        ball,
        None,
        None,
    )
    v1, v2 = volumes_split(m, n=96)
    cap = oracles.ball_cap_volume(1.0, 0.5)
    rest = oracles.ball_volume(1.0) - cap
    assert v2 == pytest.approx(cap, rel=0.02)
    assert v1 == pytest.approx(rest, rel=0.02)


def test_volumes_split_tube(tube_ball):
    v1, v2 = volumes_split(tube_ball, n=96)
    core = oracles.cylinder_core_volume(0.7)
    shell = oracles.ball_volume(1.0) - core
    assert sorted([v1, v2]) == pytest.approx(sorted([core, shell]), rel=0.02)


def test_volumes_split_requires_separation(ball):
    # a small patch nowhere near closing off a region
    m = planar_disc_mesh(EllipsoidParams(0.3, 0.3, 1.0), 3, h=0.05)
    patch = SurfaceMesh(m.verts, m.faces, None, None, ball, None, None)
    with pytest.raises(MeshGeometryError):
        volumes_split(patch, n=64)


def test_no_self_intersections(disc_tall, tube_ball):
    assert self_intersection_count(disc_tall) == 0
    assert self_intersection_count(tube_ball) == 0


def test_boundary_edges_form_rim(disc_tall):
    be = boundary_edges(disc_tall.faces)
    rim = np.unique(be)
    assert (disc_tall.tags[rim] == TAG_FREE_BOUNDARY).all()
    h = mean_edge_length(disc_tall)
    assert 0 < h < 0.2
