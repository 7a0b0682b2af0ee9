"""Sweepout slice geometry, invariants along the sweep, and area profiles."""

import numpy as np
import pytest

from fbms.mesh import (
    area,
    axis_intersections,
    self_intersection_count,
    symmetrize,
    topology,
)
from fbms.sweepout import (
    NeckParams,
    SweepoutError,
    area_profile,
    slice_annulus,
    slice_C,
    sweepout_family,
)

ALPHA_TALL = (3.0, 2.0, 6.0)
ALPHA_WIDE = (2.0, 4.0, 5.0)
H_TALL = 0.3
H_WIDE = 0.25


@pytest.fixture(scope="module")
def fam_c():
    return sweepout_family("C", ALPHA_TALL, h=H_TALL)


@pytest.fixture(scope="module")
def fam_s():
    return sweepout_family("S", ALPHA_TALL, h=H_TALL)


@pytest.fixture(scope="module")
def fam_g():
    return sweepout_family("G1B1", ALPHA_WIDE, h=H_WIDE)


@pytest.fixture(scope="module", params=[1, 2, 3])
def fam_a(request):
    return sweepout_family(f"A{request.param}", ALPHA_WIDE, h=H_WIDE), request.param


def _assert_equivariant_fixed_point(mesh):
    before = mesh.verts.copy()
    symmetrize(mesh, project=False)
    assert np.array_equal(before, mesh.verts)
    symmetrize(mesh)
    assert np.abs(before - mesh.verts).max() < 1e-12 * max(mesh.alpha.alpha)


def test_family_defaults(fam_c, fam_s):
    assert fam_c.group == "D1" and fam_s.group == "D1"
    assert fam_c.neck.t0 == 0.2
    assert fam_c.neck.eps0 > 0
    disc = np.pi * 3.0 * 2.0
    assert fam_c.bound() == pytest.approx(2 * disc)
    assert fam_s.bound() == pytest.approx(3 * disc)
    assert fam_c.endpoint_areas == (0.0, 0.0)
    assert fam_s.endpoint_areas == (pytest.approx(disc), pytest.approx(disc))
    # neck width: maximal at onset, linear to zero at both ends
    assert fam_c.width(0.2) == pytest.approx(fam_c.neck.eps0)
    assert fam_c.width(1.0) == 0.0
    assert fam_c.width(0.0) == 0.0
    w = [fam_c.width(t) for t in np.linspace(0.2, 1.0, 9)]
    assert all(w[i] > w[i + 1] for i in range(len(w) - 1))


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        sweepout_family("Q", ALPHA_TALL)
    with pytest.raises(ValueError):
        slice_annulus(ALPHA_WIDE, 4, 0.5)
    with pytest.raises(ValueError):
        slice_C(ALPHA_TALL, 1.2, neck=NeckParams(0.2, 0.05, 1.0))


def test_slice_c_midsweep(fam_c):
    m = fam_c.slice(0.5)
    topo = topology(m)
    assert topo.is_manifold
    assert topo.euler == 1 and topo.boundary_components == 1
    disc = np.pi * 3.0 * 2.0
    assert disc < area(m) < fam_c.bound()

    r1 = axis_intersections(m, 1)
    assert len(r1.crossings) == 1
    assert abs(r1.crossings[0].angle - 0.5 * np.pi) < 1e-6
    eps = m.slice_params["neck_width"]
    assert abs(r1.crossings[0].point[0] - (3.0 - eps)) < 1e-9 * 3.0
    assert not r1.contains_arc
    assert len(axis_intersections(m, 2).crossings) == 0
    assert len(axis_intersections(m, 3).crossings) == 2

    _assert_equivariant_fixed_point(m)


def test_slice_c_topology_constant(fam_c):
    for t in (0.0, 0.05, 0.15, 0.35, 0.8, 1.0):
        m = fam_c.slice(t)
        topo = topology(m)
        assert (topo.euler, topo.boundary_components) == (1, 1), f"t={t}"
        assert len(axis_intersections(m, 1).crossings) == 1, f"t={t}"
        assert len(axis_intersections(m, 2).crossings) == 0, f"t={t}"


def test_slice_c_wall_certificate(fam_c):
    # measured wall area stays under the calibrated linear envelope
    neck = fam_c.neck
    for t in (0.3, 0.6, 0.9):
        m = fam_c.slice(t)
        assert m.part_areas["walls"] <= neck.c_alpha * neck.eps0 * t


def test_slice_c_endpoints(fam_c):
    disc = np.pi * 3.0 * 2.0
    assert area(fam_c.slice(0.0)) < 0.05 * disc
    assert area(fam_c.slice(1.0)) < 0.05 * disc


def test_slice_c_deterministic(fam_c):
    m1 = fam_c.slice(0.37)
    m2 = fam_c.slice(0.37)
    assert np.array_equal(m1.verts, m2.verts)
    assert np.array_equal(m1.faces, m2.faces)


def test_slice_c_embedded(fam_c):
    assert self_intersection_count(fam_c.slice(0.5)) == 0


def test_annulus_invariants(fam_a):
    fam, iota = fam_a
    others = [k for k in (1, 2, 3) if k != iota]
    disc = np.pi * 2.0 * 4.0
    for t in (0.08, 0.5, 0.9):
        m = fam.slice(t)
        topo = topology(m)
        assert topo.is_manifold
        assert (topo.euler, topo.boundary_components) == (0, 2), f"t={t}"
        assert area(m) < fam.bound()
        avoided = axis_intersections(m, iota)
        assert len(avoided.crossings) == 0 and not avoided.contains_arc
        for k in others:
            rep = axis_intersections(m, k)
            assert len(rep.crossings) == 2, f"t={t} axis {k}"
            for c in rep.crossings:
                assert abs(c.angle - 0.5 * np.pi) < 1e-6
    _assert_equivariant_fixed_point(fam.slice(0.5))


def test_annulus_endpoints(fam_a):
    fam, _ = fam_a
    disc = np.pi * 2.0 * 4.0
    assert area(fam.slice(0.0)) < 0.05 * disc
    assert area(fam.slice(1.0)) < 0.05 * disc


def test_slice_s_contains_chord(fam_s):
    disc = np.pi * 3.0 * 2.0
    for t in (0.1, 0.5, 0.85):
        m = fam_s.slice(t)
        topo = topology(m)
        assert (topo.euler, topo.boundary_components) == (1, 1), f"t={t}"
        rep = axis_intersections(m, 1)
        assert rep.contains_arc, f"t={t}"
        assert area(m) < fam_s.bound()
    m = fam_s.slice(0.5)
    assert 2.0 * disc < area(m) < 3.0 * disc
    _assert_equivariant_fixed_point(m)


def test_slice_s_heals_into_disc(fam_s):
    disc = np.pi * 3.0 * 2.0
    assert abs(area(fam_s.slice(0.0)) - disc) < 0.05 * disc
    assert abs(area(fam_s.slice(1.0)) - disc) < 0.05 * disc


def test_slice_g1b1_shape(fam_g):
    disc = np.pi * 2.0 * 4.0
    m = fam_g.slice(0.4)
    topo = topology(m)
    assert topo.is_manifold
    assert topo.euler == -1
    assert topo.boundary_components == 1
    assert topo.genus == 1
    assert axis_intersections(m, 1).contains_arc
    assert axis_intersections(m, 2).contains_arc
    assert area(m) < fam_g.bound()
    _assert_equivariant_fixed_point(m)
    assert abs(area(fam_g.slice(0.0)) - disc) < 0.05 * disc
    assert abs(area(fam_g.slice(1.0)) - disc) < 0.05 * disc


def test_area_profile_c(fam_c):
    prof = area_profile(fam_c, samples=17)
    assert len(prof.rows) == 17
    assert prof.rows[0].t == 0.0 and prof.rows[-1].t == 1.0
    assert prof.endpoints_ok
    assert prof.exceeds_disc
    assert prof.margin > 0
    disc = np.pi * 3.0 * 2.0
    assert disc < prof.max_area < 2 * disc
    assert all(r.euler == 1 and r.boundary_components == 1 for r in prof.rows)
    areas = np.array([r.area for r in prof.rows])
    assert int(np.argmax(areas)) == prof.argmax


def test_area_profile_s(fam_s):
    prof = area_profile(fam_s, samples=13)
    assert prof.endpoints_ok
    assert prof.exceeds_disc
    assert prof.margin > 0
    assert all(r.euler == 1 for r in prof.rows)


def test_area_profile_rejects_tiny_sampling(fam_c):
    with pytest.raises(ValueError):
        area_profile(fam_c, samples=1)


def test_oversized_neck_violates_bound(fam_c):
    big = NeckParams(t0=0.2, eps0=8 * fam_c.neck.eps0, c_alpha=fam_c.neck.c_alpha)
    with pytest.raises(SweepoutError):
        slice_C(ALPHA_TALL, 0.2, neck=big, h=H_TALL)
