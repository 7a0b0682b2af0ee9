import numpy as np
import pytest

import oracles
from fbms.ellipsoid import (
    EllipsoidParams,
    apply_group,
    axis_segment,
    boundary_normal,
    boundary_residual,
    boundary_second_fundamental_form,
    classify_planar_chords,
    compose,
    group_elements,
    other_axes,
    planar_disc_area,
    project_to_boundary,
    rotation_matrix,
)


def test_group_composition_closed():
    labels = group_elements("D2")
    for g in labels:
        for h in labels:
            gh = compose(g, h)
            assert gh in labels
            lhs = rotation_matrix(g) @ rotation_matrix(h)
            assert np.array_equal(lhs, rotation_matrix(gh))
    assert compose("R1", "R1") == "id"
    assert compose("R1", "R2") == "R3"


def test_apply_group_is_exact_involution(rng):
    pts = rng.standard_normal((100, 3))
    for g in group_elements("D2"):
        back = apply_group(g, apply_group(g, pts))
        assert np.array_equal(back, pts)


def test_group_d1_is_subgroup():
    assert group_elements("D1") == ("id", "R1")
    with pytest.raises(ValueError):
        group_elements("D7")


def test_regime_predicates():
    assert EllipsoidParams(3, 2, 6).crossing_disc_regime()
    assert not EllipsoidParams(3, 2, 5.9).crossing_disc_regime()
    assert EllipsoidParams(1, 1, 3).spanning_disc_regime()
    assert not EllipsoidParams(1, 1, 2.9).spanning_disc_regime()
    assert EllipsoidParams(6, 4, 2).axes_disc_regime()
    assert not EllipsoidParams(6, 4, 2.5).axes_disc_regime()
    assert EllipsoidParams(1, 1, 1).is_round()


def test_planar_disc_area_and_axis_segment():
    alpha = EllipsoidParams(3.0, 2.0, 6.0)
    assert planar_disc_area(alpha, 3) == pytest.approx(np.pi * 6.0)
    assert planar_disc_area(alpha, 1) == pytest.approx(np.pi * 12.0)
    seg = axis_segment(alpha, 2)
    assert np.array_equal(seg, [[0, -2, 0], [0, 2, 0]])
    assert other_axes(2) == (1, 3)


def test_projection_residual_and_idempotence(rng):
    alpha = EllipsoidParams(3.0, 2.0, 6.0)
    pts = rng.standard_normal((200, 3)) * [2.0, 1.5, 4.0]
    q = project_to_boundary(alpha, pts)
    assert np.abs(boundary_residual(alpha, q)).max() < 1e-10
    q2 = project_to_boundary(alpha, q)
    assert np.linalg.norm(q2 - q, axis=1).max() < 1e-9


def test_projection_is_nearest_point(rng):
    a = np.array([3.0, 2.0, 6.0])
    alpha = EllipsoidParams(*a)
    for p in [
        np.array([0.4, -0.3, 1.1]),
        np.array([2.0, 1.0, -3.0]),
        np.array([-3.5, 0.1, 7.0]),
    ]:
        q = project_to_boundary(alpha, p[None])[0]
        ref = oracles.ellipsoid_nearest_point(a, p)
        assert np.linalg.norm(p - q) <= np.linalg.norm(p - ref) + 1e-6
        assert np.linalg.norm(q - ref) < 1e-4


def test_projection_rejects_center():
    with pytest.raises(ValueError):
        project_to_boundary(EllipsoidParams(1, 1, 1), np.zeros((1, 3)))


def test_boundary_normal_is_unit_outward():
    alpha = EllipsoidParams(3.0, 2.0, 6.0)
    p = project_to_boundary(alpha, np.array([[1.0, 1.0, 1.0]]))
    n = boundary_normal(alpha, p)
    assert np.linalg.norm(n, axis=1) == pytest.approx(1.0)
    assert (boundary_residual(alpha, p + 1e-6 * n) > 0).all()


def test_second_fundamental_form_unit_sphere():
    alpha = EllipsoidParams(1.0, 1.0, 1.0)
    p = np.array([1.0, 0.0, 0.0])
    v = np.array([0.0, 1.0, 0.0])
    assert boundary_second_fundamental_form(alpha, p, v) == pytest.approx(1.0)


def test_second_fundamental_form_matches_curve(rng):
    a = np.array([3.0, 2.0, 6.0])
    alpha = EllipsoidParams(*a)
    for _ in range(5):
        p = project_to_boundary(alpha, rng.standard_normal(3)[None] * a)[0]
        n = boundary_normal(alpha, p[None])[0]
        v = rng.standard_normal(3)
        v -= np.dot(v, n) * n
        v /= np.linalg.norm(v)
        ours = boundary_second_fundamental_form(alpha, p, v)
        ref = oracles.boundary_curvature_fd(a, p, v)
        assert ours == pytest.approx(ref, rel=1e-4)


def test_chord_census_generic():
    census = classify_planar_chords((1.0, 2.0, 3.0), 1)
    assert not census.degenerate
    lengths = sorted(c.length for c in census.chords)
    ref = oracles.ellipse_double_normal_chords(2.0, 3.0, n=4000)
    assert len(lengths) == len(ref) == 2
    assert lengths == pytest.approx(ref, abs=1e-6)
    kinds = sorted(c.kind for c in census.chords)
    assert kinds == ["major", "minor"]


def test_chord_census_tall_section():
    census = classify_planar_chords((3.0, 2.0, 6.0), 3)
    lengths = sorted(c.length for c in census.chords)
    assert lengths == pytest.approx([4.0, 6.0], abs=1e-8)


def test_chord_census_degenerate_circle():
    census = classify_planar_chords((1.0, 2.0, 2.0), 1)
    assert census.degenerate
    assert census.chords == []
