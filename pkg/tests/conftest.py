import numpy as np
import pytest

from eitls.entities.eit_entities import NodalField
from eitls.inverse.fem.assembly import assemble_mass
from eitls.inverse.levelset.shapes import parse_shape
from eitls.inverse.mesh.generators import boundary_param, generate_disk_mesh, generate_disk_mesh_with_shape
from eitls.utils.constants import DEFAULT_SHAPES


@pytest.fixture(scope="session")
def coarse_mesh():
    return generate_disk_mesh(0.2)


@pytest.fixture(scope="session")
def disk_mesh():
    return generate_disk_mesh(0.1)


@pytest.fixture(scope="session")
def disk_bparam(disk_mesh):
    return boundary_param(disk_mesh)


@pytest.fixture(scope="session")
def ellipse():
    return parse_shape(DEFAULT_SHAPES["ELLIPSE"])


@pytest.fixture(scope="session")
def circles():
    return parse_shape(DEFAULT_SHAPES["CIRCLES"])


@pytest.fixture(scope="session")
def ellipse_mesh(ellipse):
    return generate_disk_mesh_with_shape(0.1, ellipse)


@pytest.fixture(scope="session")
def circles_mesh(circles):
    return generate_disk_mesh_with_shape(0.1, circles)


def nodal(mesh, function, name="field"):
    """Nodal interpolant of ``function(x, y)``."""
    return NodalField(mesh, function(mesh.vertices[:, 0], mesh.vertices[:, 1]), name)


def l2_norm(mesh, values):
    return float(np.sqrt(values @ (assemble_mass(mesh) @ values)))
