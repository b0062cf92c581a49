import numpy as np
import pytest

from repscan.errors import EmptyBox, InvalidParameter, SupportExceedsGrid
from repscan.models import CatStateParams, GridSpec
from repscan.services import grid, states


def _local_maxima(values):
    inner = (values[1:-1] > values[:-2]) & (values[1:-1] >= values[2:])
    return np.flatnonzero(inner) + 1


def test_gaussian_density_moments(fine_spec):
    d = states.gaussian_density(fine_spec, [0.0], [[1.0]])
    assert grid.integrate(d) == pytest.approx(1.0, abs=1e-12)
    assert grid.integrate(d, lambda x: x ** 2) == pytest.approx(1.0, abs=1e-6)


def test_gaussian_density_2d():
    spec = GridSpec.uniform(-14.0, 14.0, 257, dim=2)
    d = states.gaussian_density(spec, [0.0, 0.0], [[1.0, 0.0], [0.0, 4.0]])
    np.testing.assert_allclose(grid.covariance(d), [[1.0, 0.0], [0.0, 4.0]], atol=1e-5)


def test_gaussian_density_rejects_bad_parameters(spec):
    with pytest.raises(SupportExceedsGrid):
        states.gaussian_density(spec, [10.0], [[1.0]])
    with pytest.raises(InvalidParameter):
        states.gaussian_density(spec, [0.0], [[-1.0]])
    with pytest.raises(InvalidParameter):
        states.gaussian_density(spec, [0.0, 0.0], [[1.0]])


def test_mixture_density(spec, mixture):
    assert grid.integrate(mixture) == pytest.approx(1.0, abs=1e-12)
    assert grid.mean(mixture)[0] == pytest.approx(0.6 * -1.5 + 0.4 * 2.0, abs=1e-8)


def test_uniform_density_heights(unit_box, half_box):
    np.testing.assert_allclose(unit_box.values, 1.0, rtol=1e-12)
    np.testing.assert_allclose(half_box.values, 0.5, rtol=1e-12)


def test_uniform_density_rejects_empty_box(spec):
    with pytest.raises(EmptyBox):
        states.uniform_density(spec, [(1.0, 1.0)])
    with pytest.raises(SupportExceedsGrid):
        states.uniform_density(spec, [(0.0, 20.0)])


def test_cat_density_is_normalized(bcs, ucs):
    assert grid.integrate(bcs) == pytest.approx(1.0, abs=1e-12)
    assert grid.integrate(ucs) == pytest.approx(1.0, abs=1e-12)


def test_cat_with_vanishing_coherent_part_is_vacuum(spec):
    d = states.cat_quadrature_density(CatStateParams(nu=1e-8, alpha=5.0), spec)
    vacuum = states.gaussian_density(spec, [0.0], [[0.5]])
    assert grid.l1_distance(d, vacuum) <= 1e-6


def test_cat_with_zero_displacement_is_single_gaussian(spec):
    d = states.cat_quadrature_density(CatStateParams(nu=1.0, alpha=0.0), spec)
    vacuum = states.gaussian_density(spec, [0.0], [[0.5]])
    assert grid.l1_distance(d, vacuum) <= 1e-8


def test_unbalanced_cat_has_unequal_peaks(ucs, ucs_spec):
    peaks = _local_maxima(ucs.values)
    heights = sorted(ucs.values[peaks], reverse=True)[:2]
    x = ucs_spec.coordinates()[0][peaks]
    assert np.any(np.abs(x) < 0.1)
    assert np.any(np.abs(x - np.sqrt(2.0) * 10.0 / 0.97) < 0.1)
    assert heights[1] / heights[0] == pytest.approx(0.97 ** 2, rel=1e-2)


def test_cat_phase_is_periodic(spec):
    d1 = states.cat_quadrature_density(CatStateParams(1.0, 5.0, 0.3), spec)
    d2 = states.cat_quadrature_density(CatStateParams(1.0, 5.0, 0.3 + 2.0 * np.pi), spec)
    np.testing.assert_allclose(d1.values, d2.values, atol=1e-12)


def test_cat_wavefunction_matches_density(spec, bcs, cat_packet):
    np.testing.assert_allclose(np.abs(cat_packet.values) ** 2, bcs.values, atol=1e-10)


def test_cat_far_peak_must_fit(spec):
    with pytest.raises(SupportExceedsGrid):
        states.cat_quadrature_density(CatStateParams(0.97, 10.0), spec)


def test_gaussian_wavefunction_density(spec, gauss, gauss_packet):
    assert grid.l1_distance(grid.density_of(gauss_packet), gauss) <= 1e-10


def test_quarter_turn_matches_the_conjugate_of_the_cat(cat_packet, bcs_params):
    conjugate = grid.fourier_conjugate(grid.pad_wavefunction(cat_packet, 4))
    momentum = grid.density_of(conjugate)
    turned = CatStateParams(bcs_params.nu, bcs_params.alpha, np.pi / 2)
    assert grid.l1_distance(momentum, states.cat_quadrature_density(turned, conjugate.spec)) <= 1e-4
