# repscan/services/states.py
import logging

import numpy as np
from scipy import stats

from repscan.config import Config
from repscan.errors import EmptyBox, InvalidGrid, InvalidParameter, SupportExceedsGrid
from repscan.models import GriddedDensity, WaveFunction
from repscan.services import grid

logger = logging.getLogger(__name__)

# Components lighter than this do not need to fit inside the grid.
NEGLIGIBLE_WEIGHT = 1e-12


def _check_support(spec, centers, widths, what):
    for axis, ax in enumerate(spec.axes):
        lo = centers[axis] - Config.SUPPORT_SIGMAS * widths[axis]
        hi = centers[axis] + Config.SUPPORT_SIGMAS * widths[axis]
        if lo < ax.min or hi > ax.max:
            raise SupportExceedsGrid(
                f"{what} needs [{lo:.4g}, {hi:.4g}] on axis {axis}, grid is [{ax.min:.4g}, {ax.max:.4g}]"
            )


def _covariance(cov, dim):
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if cov.shape == (1, dim) and dim > 1:
        cov = np.diag(cov[0])
    if cov.shape != (dim, dim):
        raise InvalidParameter(f"Covariance must be {dim}x{dim}, got {cov.shape}")
    if not np.allclose(cov, cov.T) or np.linalg.eigvalsh(cov).min() <= 0:
        raise InvalidParameter('Covariance must be symmetric positive definite')
    return cov


def _stacked_points(spec):
    return np.stack([m.ravel() for m in spec.mesh()], axis=-1)


def gaussian_density(spec, mean, cov):
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    if mean.size != spec.dim:
        raise InvalidParameter(f"Mean needs {spec.dim} coordinates, got {mean.size}")
    cov = _covariance(cov, spec.dim)
    _check_support(spec, mean, np.sqrt(np.diag(cov)), 'Gaussian')
    values = stats.multivariate_normal(mean=mean, cov=cov).pdf(_stacked_points(spec))
    return grid.normalize(GriddedDensity.unnormalized(spec, np.reshape(values, spec.shape)))


def mixture_density(spec, components):
    """Weighted sum of Gaussians; components are (weight, mean, cov) triples."""
    total = np.zeros(spec.shape)
    weights = np.array([c[0] for c in components], dtype=float)
    if np.any(weights < 0) or weights.sum() <= 0:
        raise InvalidParameter('Mixture weights must be non-negative with a positive sum')
    for weight, mean, cov in components:
        total += weight * gaussian_density(spec, mean, cov).values
    return grid.normalize(GriddedDensity.unnormalized(spec, total))


def uniform_density(spec, box):
    box = np.atleast_2d(np.asarray(box, dtype=float))
    if box.shape != (spec.dim, 2):
        raise InvalidParameter(f"Box needs one (lo, hi) interval per axis, got shape {box.shape}")
    inside = np.ones(spec.shape, dtype=bool)
    for axis, (mesh, (lo, hi)) in enumerate(zip(spec.mesh(), box)):
        ax = spec.axes[axis]
        if hi <= lo:
            raise EmptyBox(f"Box interval on axis {axis} is empty: [{lo}, {hi}]")
        if lo < ax.min - 1e-12 * ax.extent or hi > ax.max + 1e-12 * ax.extent:
            raise SupportExceedsGrid(f"Box [{lo}, {hi}] leaves the grid on axis {axis}")
        slack = 1e-9 * ax.spacing
        inside &= (mesh >= lo - slack) & (mesh <= hi + slack)
    if not inside.any():
        raise EmptyBox('No grid point lies inside the box')
    return grid.normalize(GriddedDensity.unnormalized(spec, inside.astype(float)))


def _require_1d(spec):
    if spec.dim != 1:
        raise InvalidGrid(f"Cat states are one-dimensional, grid has dimension {spec.dim}")


def _cat_amplitude(p, y):
    """Unnormalized quadrature amplitude exp(-y^2/2) (1 + nu exp(z)) on dimensionless y.

    The coherent part is evaluated as exp(z - y^2/2), whose real part is
    -(y - sqrt(2) cos(theta) alpha/nu)^2 / 2 and never overflows.
    """
    vacuum = np.exp(-0.5 * y ** 2)
    if p.is_vacuum:
        return vacuum.astype(complex)
    phase = np.exp(1j * p.theta)
    ratio = p.alpha / p.nu
    z = -(ratio ** 2 / 2.0) * (1.0 + phase ** 2) + np.sqrt(2.0) * phase * ratio * y
    return vacuum + p.nu * np.exp(z - 0.5 * y ** 2)


def _cat_centers(p):
    centers = [0.0]
    if not p.is_vacuum and p.nu ** 2 >= NEGLIGIBLE_WEIGHT:
        centers.append(np.sqrt(2.0) * np.cos(p.theta) * p.alpha / p.nu)
    return centers


def _check_cat_support(p, spec, scale=1.0):
    # each component of |psi|^2 is a Gaussian of variance 1/2 in dimensionless units
    width = scale / np.sqrt(2.0)
    for center in _cat_centers(p):
        _check_support(spec, [scale * center], [width], f"Cat component at {scale * center:.4g}")


def cat_quadrature_density(p, spec):
    _require_1d(spec)
    _check_cat_support(p, spec)
    y = spec.coordinates()[0]
    prefactor = p.normalization ** 2 / np.sqrt(np.pi)
    values = prefactor * np.abs(_cat_amplitude(p, y)) ** 2
    logger.debug(f"Cat quadrature density nu={p.nu} alpha={p.alpha} theta={p.theta}")
    return grid.normalize(GriddedDensity.unnormalized(spec, values))


def cat_wavefunction(p, spec, hbar=1.0):
    """Quadrature amplitude of the cat state; x = sqrt(hbar) y carries the physical units."""
    _require_1d(spec)
    if hbar <= 0:
        raise InvalidParameter(f"hbar must be positive, got {hbar}")
    _check_cat_support(p, spec, scale=np.sqrt(hbar))
    x = spec.coordinates()[0]
    y = x / np.sqrt(hbar)
    values = p.normalization * np.pi ** -0.25 * hbar ** -0.25 * _cat_amplitude(p, y)
    return grid.normalize_wavefunction(WaveFunction(spec, values, hbar))


def gaussian_wavefunction(spec, mean, sigma2, hbar=1.0):
    """Minimum-uncertainty packet whose position density has per-axis variances sigma2."""
    mean = np.broadcast_to(np.asarray(mean, dtype=float), (spec.dim,))
    sigma2 = np.broadcast_to(np.asarray(sigma2, dtype=float), (spec.dim,))
    if np.any(sigma2 <= 0):
        raise InvalidParameter('Packet variances must be positive')
    _check_support(spec, mean, np.sqrt(sigma2), 'Gaussian packet')
    values = np.ones(spec.shape, dtype=complex)
    for x, m, s2 in zip(spec.mesh(), mean, sigma2):
        values = values * (2.0 * np.pi * s2) ** -0.25 * np.exp(-(x - m) ** 2 / (4.0 * s2))
    return grid.normalize_wavefunction(WaveFunction(spec, values, hbar))
