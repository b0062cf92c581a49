# repscan/services/grid.py
import logging

import numpy as np
from scipy import fft as sfft
from scipy import integrate as sp_integrate
from scipy import signal

from repscan.config import Config
from repscan.errors import (
    AllZeroDensity,
    GridTooCoarse,
    InvalidGrid,
    InvalidParameter,
    KernelWiderThanGrid,
    NotNormalized
)
from repscan.models import Axis, GridSpec, GriddedDensity, VectorField, WaveFunction

logger = logging.getLogger(__name__)


def trapezoid(values, spec):
    """Trapezoid rule over every axis of a uniform grid."""
    out = np.asarray(values)
    for axis in reversed(range(spec.dim)):
        out = sp_integrate.trapezoid(out, dx=spec.spacings[axis], axis=axis)
    return float(out)


def quadrature_weights(spec):
    """Per-point trapezoid weights; sum(weights * f) equals trapezoid(f)."""
    weights = np.ones(spec.shape)
    for axis, ax in enumerate(spec.axes):
        w = np.full(ax.count, ax.spacing)
        w[0] = w[-1] = ax.spacing / 2.0
        shape = [1] * spec.dim
        shape[axis] = ax.count
        weights = weights * w.reshape(shape)
    return weights


def _weight_values(spec, weight):
    if weight is None:
        return 1.0
    if callable(weight):
        return np.asarray(weight(*spec.mesh()), dtype=float)
    return np.asarray(weight, dtype=float).reshape(spec.shape)


def integrate(d, weight=None):
    return trapezoid(_weight_values(d.spec, weight) * d.values, d.spec)


def normalize(d, clamp=Config.NEGATIVE_CLAMP, floor=Config.TAIL_FLOOR):
    values = np.array(d.values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise AllZeroDensity('Density contains non-finite values')
    if values.min(initial=0.0) < -clamp:
        raise AllZeroDensity(f"Density has negative values down to {values.min():.3e}")
    values[values < floor] = 0.0
    mass = trapezoid(values, d.spec)
    if not mass > 0.0 or not np.isfinite(mass):
        raise AllZeroDensity(f"Density quadrature is {mass}")
    return GriddedDensity(d.spec, values / mass, Config.NORM_TOL if d.norm_tol is None else d.norm_tol)


def mean(d):
    return np.array([trapezoid(x * d.values, d.spec) for x in d.spec.mesh()])


def covariance(d):
    mesh = d.spec.mesh()
    mu = mean(d)
    dim = d.dim
    cov = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            cov[i, j] = cov[j, i] = trapezoid((mesh[i] - mu[i]) * (mesh[j] - mu[j]) * d.values, d.spec)
    return cov


def gradient(d):
    if min(d.spec.shape) < 3:
        raise GridTooCoarse(f"Gradient needs 3 points per axis, grid shape is {d.spec.shape}")
    grads = np.gradient(d.values, *d.spec.spacings, edge_order=2)
    if d.dim == 1:
        grads = [grads]
    return VectorField(d.spec, tuple(grads))


def _angular_frequencies(spec, shape):
    """Broadcastable angular frequency arrays for a zero-padded transform of the given shape."""
    freqs = []
    for axis, (ax, n) in enumerate(zip(spec.axes, shape)):
        k = 2.0 * np.pi * sfft.fftfreq(n, d=ax.spacing)
        view = [1] * spec.dim
        view[axis] = n
        freqs.append(k.reshape(view))
    return freqs


def as_noise_covariance(sigma, dim):
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    if sigma.shape == (1, 1) and dim > 1:
        sigma = sigma[0, 0] * np.eye(dim)
    if sigma.shape != (dim, dim):
        raise InvalidParameter(f"Noise covariance must be {dim}x{dim}, got {sigma.shape}")
    if not np.allclose(sigma, sigma.T, atol=1e-12):
        raise InvalidParameter('Noise covariance must be symmetric')
    eig = np.linalg.eigvalsh(sigma)
    if eig.min() < -1e-12 * max(1.0, eig.max()):
        raise InvalidParameter('Noise covariance must be positive semi-definite')
    return sigma


def convolve_noise(d, sigma, eps, kind='gaussian'):
    """Density of X + sqrt(eps) Z for zero-mean noise Z with covariance sigma.

    kind='gaussian' uses a Gaussian kernel, kind='uniform' a symmetric box kernel
    C^(1/2) U with U uniform on [-sqrt(3), sqrt(3)]^D, which has the same covariance.
    """
    if eps < 0:
        raise InvalidParameter(f"Noise scale must be >= 0, got {eps}")
    sigma = as_noise_covariance(sigma, d.dim)
    if eps == 0 or not np.any(sigma):
        return d
    lam_max = float(np.linalg.eigvalsh(sigma).max())
    half_extent = min(ax.extent for ax in d.spec.axes) / 2.0
    if 6.0 * np.sqrt(eps * lam_max) > half_extent:
        raise KernelWiderThanGrid(
            f"Kernel width 6*sqrt(eps*lambda_max)={6.0 * np.sqrt(eps * lam_max):.4g} exceeds half the grid extent {half_extent:.4g}"
        )

    shape = tuple(int(2 ** np.ceil(np.log2(2 * n))) for n in d.spec.shape)
    k = _angular_frequencies(d.spec, shape)
    if kind == 'gaussian':
        quad = sum(sigma[i, j] * k[i] * k[j] for i in range(d.dim) for j in range(d.dim))
        transfer = np.exp(-0.5 * eps * quad)
    elif kind == 'uniform':
        root = _psd_sqrt(sigma)
        transfer = np.ones(shape)
        half_width = np.sqrt(3.0 * eps)
        for i in range(d.dim):
            projected = sum(root[j, i] * k[j] for j in range(d.dim))
            transfer = transfer * np.sinc(half_width * projected / np.pi)
    else:
        raise InvalidParameter(f"Unknown noise kind '{kind}'")

    spectrum = sfft.fftn(d.values, s=shape)
    smoothed = sfft.ifftn(spectrum * transfer).real
    smoothed = smoothed[tuple(slice(0, n) for n in d.spec.shape)]
    smoothed[smoothed < 0.0] = 0.0
    logger.debug(f"Convolved {kind} noise eps={eps:.3e} on padded shape {shape}")
    return normalize(GriddedDensity.unnormalized(d.spec, smoothed))


def convolve_gaussian(d, sigma, eps):
    return convolve_noise(d, sigma, eps, kind='gaussian')


def _psd_sqrt(sigma):
    eig, vec = np.linalg.eigh(sigma)
    return (vec * np.sqrt(np.clip(eig, 0.0, None))) @ vec.T


def convolve(d1, d2):
    """Density of X1 + X2 for independent X1 ~ d1 and X2 ~ d2 sharing the grid spacing."""
    if d1.dim != d2.dim:
        raise InvalidGrid('Densities must share the dimension')
    axes = []
    for a1, a2 in zip(d1.spec.axes, d2.spec.axes):
        if not np.isclose(a1.spacing, a2.spacing, rtol=1e-9):
            raise InvalidGrid(f"Grid spacings differ ({a1.spacing} vs {a2.spacing})")
        count = a1.count + a2.count - 1
        axes.append(Axis(a1.min + a2.min, a1.min + a2.min + (count - 1) * a1.spacing, count))
    values = signal.fftconvolve(d1.values, d2.values, mode='full') * d1.spec.cell_volume
    values[values < 0.0] = 0.0
    return normalize(GriddedDensity.unnormalized(GridSpec(tuple(axes)), values))


def rescale(d, factor):
    """Density of factor * X."""
    if factor == 0:
        raise InvalidParameter('Scale factor must be non-zero')
    values = d.values / abs(factor) ** d.dim
    if factor > 0:
        axes = tuple(Axis(a.min * factor, a.max * factor, a.count) for a in d.spec.axes)
    else:
        axes = tuple(Axis(a.max * factor, a.min * factor, a.count) for a in d.spec.axes)
        values = np.flip(values)
    return GriddedDensity(GridSpec(axes), values, d.norm_tol)


def l1_distance(d1, d2):
    return trapezoid(np.abs(d1.values - d2.values), d1.spec)


# Wavefunctions

def wavefunction_norm(w):
    return trapezoid(np.abs(w.values) ** 2, w.spec)


def normalize_wavefunction(w):
    norm = wavefunction_norm(w)
    if not norm > 0.0:
        raise AllZeroDensity('Wavefunction vanishes on the grid')
    return WaveFunction(w.spec, w.values / np.sqrt(norm), w.hbar)


def density_of(w):
    """Position probability density |psi|^2 of a wavefunction."""
    return normalize(GriddedDensity.unnormalized(w.spec, np.abs(w.values) ** 2))


def pad_wavefunction(w, factor):
    """Extend the grid symmetrically with zeros so each axis holds about factor times the points."""
    if factor <= 1:
        return w
    axes, pads = [], []
    for ax in w.spec.axes:
        extra = int(ax.count * (factor - 1))
        left = extra // 2
        right = extra - left
        h = ax.spacing
        axes.append(Axis(ax.min - left * h, ax.max + right * h, ax.count + extra))
        pads.append((left, right))
    return WaveFunction(GridSpec(tuple(axes)), np.pad(w.values, pads), w.hbar)


def _transform_axis(values, axis, x0, h, y0, dy, hbar, sign):
    """out[m] = h/sqrt(2 pi hbar) sum_j v[j] exp(sign i y_m x_j / hbar) with y_m = y0 + m dy and dy h = 2 pi hbar / N."""
    n = values.shape[axis]
    view = [1] * values.ndim
    view[axis] = n
    idx = np.arange(n).reshape(view)
    pre = values * np.exp(sign * 1j * y0 * idx * h / hbar)
    if sign < 0:
        core = sfft.fft(pre, axis=axis)
    else:
        core = sfft.ifft(pre, axis=axis) * n
    post = core * np.exp(sign * 1j * (y0 + idx * dy) * x0 / hbar)
    return post * h / np.sqrt(2.0 * np.pi * hbar)


def _check_normalized(w, tol=Config.NORM_TOL):
    norm = wavefunction_norm(w)
    if abs(norm - 1.0) > tol:
        raise NotNormalized(f"Wavefunction L2 norm is {norm:.12f}, expected 1")


def fourier_conjugate(w):
    """Momentum-space amplitude on the hbar-scaled frequency grid, centred on zero."""
    _check_normalized(w)
    values = w.values
    axes = []
    for axis, ax in enumerate(w.spec.axes):
        n = ax.count
        dy = 2.0 * np.pi * w.hbar / (n * ax.spacing)
        y0 = -(n // 2) * dy
        values = _transform_axis(values, axis, ax.min, ax.spacing, y0, dy, w.hbar, -1)
        axes.append(Axis(y0, y0 + (n - 1) * dy, n))
    return WaveFunction(GridSpec(tuple(axes)), values, w.hbar)


def inverse_fourier_conjugate(w, origin):
    """Position-space amplitude whose grid starts at origin (one value per axis)."""
    origin = np.atleast_1d(np.asarray(origin, dtype=float))
    if origin.size != w.dim:
        raise InvalidParameter(f"Origin needs {w.dim} coordinates")
    _check_normalized(w)
    values = w.values
    axes = []
    for axis, ax in enumerate(w.spec.axes):
        n = ax.count
        h = 2.0 * np.pi * w.hbar / (n * ax.spacing)
        values = _transform_axis(values, axis, ax.min, ax.spacing, origin[axis], h, w.hbar, +1)
        axes.append(Axis(origin[axis], origin[axis] + (n - 1) * h, n))
    return WaveFunction(GridSpec(tuple(axes)), values, w.hbar)
