import numpy as np
import pytest

from fbms.ellipsoid import EllipsoidParams, apply_group, group_elements
from fbms.mesh import area, boundary_edges, edges_of, topology
from fbms.triangulate import (
    Mesh2D,
    TriangulationError,
    mirror2,
    orient_consistently,
    planar_disc_mesh,
    sample_curve,
    triangulate_region,
    tube_mesh,
)


def _unit_square_loop(n=6):
    t = np.linspace(0.0, 1.0, n + 1)
    zeros = np.zeros_like(t)
    bottom = np.column_stack([t, zeros])
    right = np.column_stack([np.ones_like(t), t])
    top = np.column_stack([t[::-1], np.ones_like(t)])
    left = np.column_stack([zeros, t[::-1]])
    return [[(bottom, "b"), (right, "r"), (top, "t"), (left, "l")]]


def test_square_triangulation_recovers_boundary():
    loops = _unit_square_loop()

    def inside(p):
        p = np.atleast_2d(p)
        return (p[:, 0] > 0) & (p[:, 0] < 1) & (p[:, 1] > 0) & (p[:, 1] < 1)

    m = triangulate_region(loops, inside, h=0.15)
    u = m.verts[m.tris[:, 1]] - m.verts[m.tris[:, 0]]
    w = m.verts[m.tris[:, 2]] - m.verts[m.tris[:, 0]]
    areas = 0.5 * (u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0])
    assert (areas > 0).all()  # CCW
    assert areas.sum() == pytest.approx(1.0, abs=1e-12)
    # each tagged chain is a path of mesh edges
    edges = {tuple(sorted(e)) for tri in m.tris for e in
             [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])]}
    for tag in "brtl":
        (chain,) = m.chains[tag]
        for u, v in zip(chain[:-1], chain[1:]):
            assert tuple(sorted((int(u), int(v)))) in edges


def test_triangulation_rejects_tiny_region():
    pts = np.array([[0.0, 0.0], [1e-12, 0.0], [0.0, 1e-12]])
    with pytest.raises(TriangulationError):
        triangulate_region(
            [[(pts, "a")]],
            lambda p: np.zeros(len(np.atleast_2d(p)), dtype=bool),
            h=1.0,
        )


def test_sample_curve_spacing():
    fn = lambda t: np.column_stack([np.cos(t), np.sin(t)])
    pts = sample_curve(fn, 0.0, np.pi, h=0.05)
    d = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    assert d.max() < 0.06
    assert d.min() > 0.03
    assert np.allclose(pts[0], [1, 0], atol=1e-12)
    assert np.allclose(pts[-1], [-1, 0], atol=1e-12)


def test_mirror2_welds_seams():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.7, 0.7]])
    tris = np.array([[0, 1, 3], [0, 3, 2]])
    fund = Mesh2D(verts=verts, tris=tris, chains={})
    v, t, copies = mirror2(fund, [(1, 1), (1, -1), (-1, 1), (-1, -1)])
    # seam vertices shared: 4 copies of 4 verts minus welds
    # origin x1, axis points x2 each, interior x4
    assert len(v) == 1 + 2 + 2 + 4
    assert len(t) == 8
    e1 = v[t[:, 1]] - v[t[:, 0]]
    e2 = v[t[:, 2]] - v[t[:, 0]]
    a2 = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    assert (a2 > 0).all()


def test_disc_mesh_group_action_is_exact(tall):
    m = planar_disc_mesh(tall, 3, h=0.2)
    m.validate()
    for gi, g in enumerate(group_elements("D2")):
        assert np.array_equal(m.verts[m.orbits[gi]], apply_group(g, m.verts))


def test_disc_mesh_d1_variant(tall):
    m = planar_disc_mesh(tall, 3, h=0.3, group="D1")
    assert m.group == "D1"
    assert m.orbits.shape[0] == 2
    m.validate()


def test_disc_mesh_fixed_arcs(tall):
    m = planar_disc_mesh(tall, 3, h=0.2, arc_axes=(1, 2))
    m.validate()
    from fbms.mesh import TAG_FIXED_ARC

    on1 = (m.arc_axis == 1).sum()
    on2 = (m.arc_axis == 2).sum()
    assert on1 > 5 and on2 > 5
    assert ((m.tags == TAG_FIXED_ARC) == (m.arc_axis > 0)).all()


def test_disc_mesh_other_planes(tall):
    for iota in (1, 2):
        m = planar_disc_mesh(tall, iota, h=0.2)
        m.validate()
        assert (m.verts[:, iota - 1] == 0).all()
        rep = topology(m)
        assert rep.euler == 1 and rep.boundary_components == 1


def test_tube_topology_and_symmetry(tube_ball):
    tube_ball.validate()
    rep = topology(tube_ball)
    assert rep.euler == 0
    assert rep.boundary_components == 2
    assert rep.genus == 0
    # area close to the true cylinder piece
    r, z = 0.7, np.sqrt(1 - 0.49)
    assert area(tube_ball) == pytest.approx(2 * np.pi * r * 2 * z, rel=5e-3)


def test_orient_consistently_repairs_flips(disc_tall, rng):
    faces = disc_tall.faces.copy()
    flip = rng.random(len(faces)) < 0.3
    faces[flip] = faces[flip][:, [0, 2, 1]]
    fixed = orient_consistently(faces)
    uniq, face_edges = edges_of(fixed)
    counts = np.bincount(face_edges.ravel(), minlength=len(uniq))
    dirs = {}
    for f in fixed:
        for i in range(3):
            e = (int(f[i]), int(f[(i + 1) % 3]))
            dirs[e] = dirs.get(e, 0) + 1
    # a consistently oriented manifold mesh never repeats a directed edge
    assert max(dirs.values()) == 1
