import numpy as np
import pytest

from repscan.models import CatStateParams, GridSpec
from repscan.services import states


@pytest.fixture(scope='session')
def spec():
    return GridSpec.uniform(-12.0, 12.0, 2048)


@pytest.fixture(scope='session')
def fine_spec():
    """801 points on [-8, 8]; x = 0.5 and x = 1 are grid points."""
    return GridSpec.uniform(-8.0, 8.0, 801)


@pytest.fixture(scope='session')
def ucs_spec():
    return GridSpec.uniform(-8.0, 24.0, 2048)


@pytest.fixture(scope='session')
def gauss(spec):
    return states.gaussian_density(spec, [0.0], [[1.0]])


@pytest.fixture(scope='session')
def gauss2(spec):
    return states.gaussian_density(spec, [0.0], [[2.0]])


@pytest.fixture(scope='session')
def unit_box():
    """Uniform density whose grid is exactly the unit box."""
    box_spec = GridSpec.uniform(0.0, 1.0, 1001)
    return states.uniform_density(box_spec, [(0.0, 1.0)])


@pytest.fixture(scope='session')
def half_box():
    box_spec = GridSpec.uniform(0.0, 2.0, 1001)
    return states.uniform_density(box_spec, [(0.0, 2.0)])


@pytest.fixture(scope='session')
def embedded_box(spec):
    """Unit box inside the default grid, for checks that need sharp edges."""
    return states.uniform_density(spec, [(0.0, 1.0)])


@pytest.fixture(scope='session')
def mixture(spec):
    return states.mixture_density(spec, [(0.6, [-1.5], [[0.8]]), (0.4, [2.0], [[1.5]])])


@pytest.fixture(scope='session')
def bcs_params():
    return CatStateParams(nu=1.0, alpha=5.0)


@pytest.fixture(scope='session')
def ucs_params():
    return CatStateParams(nu=0.97, alpha=10.0)


@pytest.fixture(scope='session')
def bcs(spec, bcs_params):
    return states.cat_quadrature_density(bcs_params, spec)


@pytest.fixture(scope='session')
def ucs(ucs_spec, ucs_params):
    return states.cat_quadrature_density(ucs_params, ucs_spec)


@pytest.fixture(scope='session')
def gauss_packet(spec):
    return states.gaussian_wavefunction(spec, 0.0, 1.0)


@pytest.fixture(scope='session')
def cat_packet(spec, bcs_params):
    return states.cat_wavefunction(bcs_params, spec)


@pytest.fixture
def nearest():
    def index(spec, x):
        return int(np.argmin(np.abs(spec.coordinates()[0] - x)))
    return index
