import pathlib

import numpy as np
import pytest

from fbms.meshio import read_mesh, sidecar_path, write_mesh
from fbms.triangulate import planar_disc_mesh


@pytest.mark.parametrize("ext", ["off", "obj"])
def test_roundtrip_exact(tmp_path, tall, ext):
    m = planar_disc_mesh(tall, 3, h=0.3)
    p = tmp_path / f"disc.{ext}"
    write_mesh(m, p)
    m2 = read_mesh(p)
    assert np.array_equal(m.verts, m2.verts)
    assert np.array_equal(m.faces, m2.faces)
    assert np.array_equal(m.tags, m2.tags)
    assert np.array_equal(m.arc_axis, m2.arc_axis)
    assert np.array_equal(m.orbits, m2.orbits)
    assert m2.group == m.group
    assert m2.alpha == m.alpha
    m2.validate()


def test_read_without_sidecar(tmp_path, tall):
    m = planar_disc_mesh(tall, 3, h=0.3)
    p = tmp_path / "disc.off"
    write_mesh(m, p)
    pathlib.Path(sidecar_path(p)).unlink()
    m2 = read_mesh(p)
    assert np.array_equal(m.verts, m2.verts)
    assert m2.alpha is None
    assert m2.orbits is None


def test_unknown_extension(tmp_path, tall):
    m = planar_disc_mesh(tall, 3, h=0.4)
    with pytest.raises(ValueError):
        write_mesh(m, tmp_path / "disc.stl")
