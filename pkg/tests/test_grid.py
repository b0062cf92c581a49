import numpy as np
import pytest

from repscan.errors import AllZeroDensity, InvalidGrid, KernelWiderThanGrid, NotNormalized
from repscan.models import GridSpec, GriddedDensity, WaveFunction
from repscan.services import grid, states


def test_grid_spec_rejects_bad_axes():
    with pytest.raises(InvalidGrid):
        GridSpec.uniform(0.0, 1.0, 4)
    with pytest.raises(InvalidGrid):
        GridSpec.uniform(1.0, 0.0, 64)
    with pytest.raises(InvalidGrid):
        GridSpec.uniform(0.0, 1.0, 16, dim=4)


def test_normalize_constant():
    spec = GridSpec.uniform(0.0, 1.0, 101)
    d = grid.normalize(GriddedDensity.unnormalized(spec, np.full(101, 2.0)))
    np.testing.assert_allclose(d.values, 1.0, rtol=1e-12)


def test_normalize_unnormalized_gaussian():
    spec = GridSpec.uniform(-8.0, 8.0, 801)
    x = spec.coordinates()[0]
    d = grid.normalize(GriddedDensity.unnormalized(spec, np.exp(-x ** 2)))
    assert grid.integrate(d) == pytest.approx(1.0, abs=1e-12)


def test_normalize_rejects_zero_and_negative():
    spec = GridSpec.uniform(0.0, 1.0, 101)
    with pytest.raises(AllZeroDensity):
        grid.normalize(GriddedDensity.unnormalized(spec, np.zeros(101)))
    values = np.ones(101)
    values[3] = -1e-6
    with pytest.raises(AllZeroDensity):
        grid.normalize(GriddedDensity.unnormalized(spec, values))


def test_normalize_clamps_tiny_negatives():
    spec = GridSpec.uniform(0.0, 1.0, 101)
    values = np.ones(101)
    values[3] = -1e-16
    d = grid.normalize(GriddedDensity.unnormalized(spec, values))
    assert d.values.min() >= 0.0


def test_density_must_be_normalized():
    spec = GridSpec.uniform(0.0, 1.0, 101)
    with pytest.raises(NotNormalized):
        GriddedDensity(spec, np.full(101, 2.0))
    d = grid.normalize(GriddedDensity.unnormalized(spec, np.full(101, 2.0)))
    assert d.norm_tol == pytest.approx(1e-8)
    with pytest.raises(NotNormalized):
        d.with_values(3.0 * d.values)


def test_density_must_be_nonnegative():
    spec = GridSpec.uniform(0.0, 1.0, 101)
    values = np.ones(101)
    values[3] = -1e-6
    with pytest.raises(InvalidGrid):
        GriddedDensity(spec, values)
    values[3] = np.nan
    with pytest.raises(InvalidGrid):
        GriddedDensity(spec, values)


def test_integrate_weights(fine_spec, unit_box):
    d = states.gaussian_density(fine_spec, [0.0], [[1.0]])
    assert grid.integrate(d) == pytest.approx(1.0, abs=1e-8)
    assert grid.integrate(d, lambda x: x ** 2) == pytest.approx(1.0, abs=1e-6)
    assert grid.integrate(unit_box, lambda x: x) == pytest.approx(0.5, abs=1e-9)


def test_integrate_is_linear():
    spec = GridSpec.uniform(0.0, 2.0, 201)
    x = spec.coordinates()[0]
    d1 = GriddedDensity.unnormalized(spec, 1.0 + x)
    d2 = GriddedDensity.unnormalized(spec, x ** 2)
    combined = GriddedDensity.unnormalized(spec, 2.0 * d1.values + 3.0 * d2.values)
    assert grid.integrate(combined) == pytest.approx(2.0 * grid.integrate(d1) + 3.0 * grid.integrate(d2), rel=1e-14)


def test_gradient_of_ramp_and_constant():
    spec = GridSpec.uniform(0.0, 1.0, 51)
    x = spec.coordinates()[0]
    ramp = GriddedDensity.unnormalized(spec, 0.5 + 2.0 * x)
    np.testing.assert_allclose(grid.gradient(ramp)[0], 2.0, atol=1e-12)
    flat = GriddedDensity.unnormalized(spec, np.ones(51))
    np.testing.assert_allclose(grid.gradient(flat)[0], 0.0, atol=1e-12)


def test_gradient_of_gaussian(fine_spec, nearest):
    d = states.gaussian_density(fine_spec, [0.0], [[1.0]])
    i = nearest(fine_spec, 1.0)
    x = fine_spec.coordinates()[0][i]
    assert grid.gradient(d)[0][i] == pytest.approx(-x * d.values[i], abs=1e-4)


def test_gradient_of_symmetric_density_is_antisymmetric(fine_spec):
    d = states.gaussian_density(fine_spec, [0.0], [[1.0]])
    g = grid.gradient(d)[0]
    np.testing.assert_allclose(g, -g[::-1], atol=1e-10)


def test_convolve_gaussian_closed_form(gauss, spec):
    smoothed = grid.convolve_gaussian(gauss, [[1.0]], 0.5)
    target = states.gaussian_density(spec, [0.0], [[1.5]])
    assert grid.l1_distance(smoothed, target) <= 1e-6


def test_convolve_gaussian_semigroup(spec):
    d = states.gaussian_density(spec, [0.0], [[0.5]])
    twice = grid.convolve_gaussian(grid.convolve_gaussian(d, [[1.0]], 0.25), [[1.0]], 0.25)
    direct = states.gaussian_density(spec, [0.0], [[1.0]])
    assert grid.l1_distance(twice, direct) <= 1e-6


def test_convolve_zero_noise_is_identity(gauss):
    assert grid.convolve_gaussian(gauss, [[1.0]], 0.0) is gauss


def test_convolve_uniform_keeps_mass(embedded_box):
    smoothed = grid.convolve_gaussian(embedded_box, [[1.0]], 0.01)
    assert grid.integrate(smoothed) == pytest.approx(1.0, abs=1e-8)
    assert smoothed.values.max() < embedded_box.values.max()


def test_uniform_noise_matches_variance(gauss):
    smoothed = grid.convolve_noise(gauss, [[1.0]], 0.5, kind='uniform')
    assert grid.covariance(smoothed)[0, 0] == pytest.approx(1.5, rel=1e-5)


def test_kernel_wider_than_grid(gauss):
    with pytest.raises(KernelWiderThanGrid):
        grid.convolve_gaussian(gauss, [[1.0]], 10.0)


def test_convolve_two_densities(spec):
    d1 = states.gaussian_density(spec, [0.0], [[1.0]])
    d2 = states.gaussian_density(spec, [1.0], [[0.5]])
    total = grid.convolve(d1, d2)
    assert total.spec.axes[0].min == pytest.approx(-24.0)
    assert grid.mean(total)[0] == pytest.approx(1.0, abs=1e-8)
    assert grid.covariance(total)[0, 0] == pytest.approx(1.5, rel=1e-8)


def test_rescale_moves_moments(gauss):
    scaled = grid.rescale(gauss, -2.0)
    assert grid.integrate(scaled) == pytest.approx(1.0, abs=1e-12)
    assert grid.covariance(scaled)[0, 0] == pytest.approx(4.0, rel=1e-8)


def test_fourier_conjugate_of_gaussian(gauss_packet):
    conjugate = grid.fourier_conjugate(gauss_packet)
    assert grid.wavefunction_norm(conjugate) == pytest.approx(1.0, abs=1e-8)
    momentum = grid.density_of(conjugate)
    assert grid.covariance(momentum)[0, 0] == pytest.approx(0.25, abs=1e-6)
    assert np.abs(conjugate.values.imag).max() <= 1e-10


def test_fourier_conjugate_round_trip(cat_packet):
    conjugate = grid.fourier_conjugate(cat_packet)
    back = grid.inverse_fourier_conjugate(conjugate, [cat_packet.spec.axes[0].min])
    np.testing.assert_allclose(back.spec.coordinates()[0], cat_packet.spec.coordinates()[0], atol=1e-9)
    np.testing.assert_allclose(back.values, cat_packet.values, atol=1e-10)


def test_fourier_conjugate_requires_normalization(spec):
    w = WaveFunction(spec, 2.0 * np.exp(-spec.coordinates()[0] ** 2))
    with pytest.raises(NotNormalized):
        grid.fourier_conjugate(w)


def test_padding_refines_momentum_grid(gauss_packet):
    coarse = grid.fourier_conjugate(gauss_packet)
    fine = grid.fourier_conjugate(grid.pad_wavefunction(gauss_packet, 4))
    assert fine.spec.axes[0].spacing == pytest.approx(coarse.spec.axes[0].spacing / 4, rel=1e-9)
