import numpy as np
import pytest

from fbms import EllipsoidParams
from fbms.triangulate import planar_disc_mesh, tube_mesh


@pytest.fixture(scope="session")
def ball():
    return EllipsoidParams(1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def tall():
    return EllipsoidParams(3.0, 2.0, 6.0)


@pytest.fixture(scope="session")
def disc_tall(tall):
    return planar_disc_mesh(tall, 3, h=0.12)


@pytest.fixture(scope="session")
def disc_ball(ball):
    return planar_disc_mesh(ball, 3, h=0.03)


@pytest.fixture(scope="session")
def tube_ball(ball):
    return tube_mesh(ball, radius=0.7, h=0.05)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260821)
