# repscan/services/infodist.py
import logging

import numpy as np
from scipy import interpolate

from repscan.config import Config, LOG2E
from repscan.errors import DegenerateSupport, InvalidParameter
from repscan.models import Axis, GridSpec, InequalityReport, InfoDistribution, InformationSample
from repscan.services import entropy, grid

logger = logging.getLogger(__name__)


def _sample(spec, values):
    weights = grid.quadrature_weights(spec) * values
    positive = values > 0
    info = -np.log2(values[positive])
    w = weights[positive]
    order = np.argsort(info, kind='stable')
    return InformationSample(values=info[order], weights=w[order])


def information_values(d):
    """Information i = -log2 F at every grid point with F > 0, weighted by its trapezoid mass."""
    return _sample(d.spec, d.values)


def info_cdf(d, y, sample=None):
    sample = sample or information_values(d)
    cumulative = np.concatenate([[0.0], np.cumsum(sample.weights)])
    idx = np.searchsorted(sample.values, np.asarray(y, dtype=float), side='right')
    result = cumulative[idx] / cumulative[-1]
    return float(result) if np.ndim(result) == 0 else result


def refined_sample(d, refine):
    """Information sample of d linearly interpolated onto a grid refine times finer per axis."""
    if refine is None or refine <= 1:
        return information_values(d)
    axes = tuple(Axis(a.min, a.max, (a.count - 1) * int(refine) + 1) for a in d.spec.axes)
    fine = GridSpec(axes)
    if d.dim == 1:
        values = np.interp(fine.coordinates()[0], d.spec.coordinates()[0], d.values)
    else:
        interpolator = interpolate.RegularGridInterpolator(d.spec.coordinates(), d.values, method='linear')
        points = np.stack([m.ravel() for m in fine.mesh()], axis=-1)
        values = interpolator(points).reshape(fine.shape)
    sample = _sample(fine, values)
    return InformationSample(sample.values, sample.weights / sample.total_weight)


def info_pdf_histogram(d, n_bins=Config.HIST_BINS, window=None, refine=Config.HIST_REFINE,
                       allow_pointmass=False, edges=None):
    """Weighted histogram of the information values.

    window restricts the binned range; edges overrides both n_bins and window.
    """
    sample = refined_sample(d, refine)
    if edges is None:
        if n_bins < 16:
            raise InvalidParameter(f"Histogram needs at least 16 bins, got {n_bins}")
        lo, hi = window if window is not None else (sample.values[0], sample.values[-1])
        if hi - lo < 1e-12:
            if not allow_pointmass:
                raise DegenerateSupport(f"Information values span {hi - lo:.3e} bits")
            logger.info(f"Information distribution is a point mass at {lo:.6g} bits")
            return InfoDistribution(
                kind='histogram', support=(float(lo), float(hi)), centers=np.array([lo]),
                masses=np.array([sample.total_weight]), total_mass=sample.total_weight
            )
        edges = np.linspace(lo, hi, n_bins + 1)
    masses, edges = np.histogram(sample.values, bins=edges, weights=sample.weights)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return InfoDistribution(
        kind='histogram', support=(float(edges[0]), float(edges[-1])), centers=centers,
        masses=masses, total_mass=float(masses.sum())
    )


def histogram_l1(h1, h2):
    """L1 distance between two histograms sharing their bins (sum of mass differences)."""
    if len(h1.masses) != len(h2.masses) or not np.allclose(h1.centers, h2.centers):
        raise InvalidParameter('Histograms must share their bins')
    return float(np.abs(h1.masses - h2.masses).sum())


def moment_identity_check(d, p, tol=Config.MOMENT_TOL, saturation_tol=Config.SATURATION_TOL):
    """Integral of F^p against the weighted sum of 2^((1-p) i) over the information values."""
    lhs = entropy.power_integral(d, p)
    sample = information_values(d)
    rhs = float(np.dot(sample.weights, np.exp2((1.0 - p) * sample.values)))
    slack = -abs(lhs - rhs) / lhs
    return InequalityReport.from_values(
        f"moment_identity(p={p:g})", lhs, rhs, slack, check_tol=tol, saturation_tol=saturation_tol
    )


def varentropy(d):
    """Variance of the information random variable in bits^2."""
    moments = information_values(d).central_moments(2)
    return float(moments[2])


def shannon_bits(d):
    return entropy.shannon_entropy(d).value * LOG2E
