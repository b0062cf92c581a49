# repscan/services/reconstruct.py
import logging

import numpy as np
from scipy import fft as sfft
from scipy import special

from repscan.config import Config, LOG2E
from repscan.errors import InvalidParameter, ReferenceMismatch
from repscan.models import GammaReference, SeriesReconstruction
from repscan.services import cumulants, entropy, infodist

logger = logging.getLogger(__name__)

METHODS = ('gram_charlier_a', 'edgeworth')

# (exponent of -D, coefficient builder) per Edgeworth group
EDGEWORTH_GROUPS = (
    ((3, lambda c: c[3] / 6.0),),
    ((4, lambda c: c[4] / 24.0), (6, lambda c: c[3] ** 2 / 72.0)),
    ((5, lambda c: c[5] / 120.0), (7, lambda c: c[3] * c[4] / 144.0), (9, lambda c: c[3] ** 3 / 1296.0)),
)


def gamma_reference_for(sigma2, dim=1):
    """Shifted gamma law of the information variable of an isotropic Gaussian with variance sigma2."""
    if not sigma2 > 0:
        raise InvalidParameter(f"Reference variance must be positive, got {sigma2}")
    return GammaReference(a=dim / 2.0 * float(np.log2(2.0 * np.pi * sigma2)), alpha=dim / 2.0, beta=LOG2E)


def gamma_cumulants(ref, k):
    if k < 1:
        raise InvalidParameter(f"Cumulant index must be >= 1, got {k}")
    if k == 1:
        return ref.alpha * ref.beta + ref.a
    return float(special.gamma(k) * ref.alpha * ref.beta ** k)


def laguerre(k, delta, x):
    """Generalized Laguerre polynomial by three-term recurrence; any real delta."""
    x = np.asarray(x, dtype=float)
    if k < 0:
        raise InvalidParameter(f"Laguerre degree must be >= 0, got {k}")
    previous = np.ones_like(x)
    if k == 0:
        return previous if previous.ndim else float(previous)
    current = 1.0 + delta - x
    for j in range(2, k + 1):
        previous, current = current, ((2 * j - 1 + delta - x) * current - (j - 1 + delta) * previous) / j
    return current if np.ndim(current) else float(current)


def complete_bell(x):
    """Complete Bell polynomials B_0..B_n of x_1..x_n."""
    x = list(x)
    bell = [1.0]
    for n in range(len(x)):
        bell.append(sum(special.comb(n, i, exact=True) * bell[n - i] * x[i] for i in range(n + 1)))
    return bell


def _differences(kappa, ref, order):
    """c_n = kappa_n - gamma_n indexed from 0..order, with c_0 = c_1 = 0 and insignificant entries zeroed."""
    gap = kappa[1] - gamma_cumulants(ref, 1)
    if abs(gap) > Config.KAPPA1_MATCH_TOL:
        raise ReferenceMismatch(f"kappa_1 - gamma_1 = {gap:.4g} bits, rescale the reference first")
    if order > len(kappa):
        raise InvalidParameter(f"Series order {order} needs {order} cumulants, got {len(kappa)}")
    c = np.zeros(max(order, 5) + 1)
    dropped = []
    for n in range(2, order + 1):
        diff = kappa[n] - gamma_cumulants(ref, n)
        if kappa.uncertainty is not None and abs(diff) <= Config.SIGNIFICANCE * kappa.uncertainty[n - 1]:
            dropped.append(n)
            continue
        c[n] = diff
    warnings = []
    if dropped:
        warnings.append(f"Treated kappa_n - gamma_n as zero for n in {dropped}")
    return c, warnings


def _window(ref, pad_cells=0):
    width = Config.SERIES_WIDTH_BETAS * ref.beta / Config.SERIES_CELLS
    return ref.a + width * np.arange(-pad_cells, Config.SERIES_CELLS + 1)


def _pad_cells(c2, width):
    group = Config.CELLS_PER_BIN
    spread = 6.0 * np.sqrt(max(c2, 0.0)) / width
    return group * max(1, int(np.ceil(spread / group)))


def reference_masses(ref, edges):
    return np.diff(ref.cdf(edges))


def derivative_masses(ref, edges, power):
    """Cell masses of the power-th derivative of the reference density.

    Each mass is the jump of the (power-1)-th derivative across the cell, taken as zero at and
    below a, so the masses are exact for the distributional derivative and sum to zero for power > 0.
    """
    if power == 0:
        return reference_masses(ref, edges)
    j = power - 1
    above = edges > ref.a
    shift = np.where(above, edges - ref.a, 1.0)
    lower = special.factorial(j) * laguerre(j, ref.alpha - 1.0 - j, shift / ref.beta) * ref.pdf(edges) / shift ** j
    return np.diff(np.where(above, lower, 0.0))


def _bin_norm(masses):
    starts = np.arange(0, len(masses), Config.CELLS_PER_BIN)
    return float(np.abs(np.add.reduceat(masses, starts)).sum())


def _truncate(base_norm, groups, keep):
    """Keep groups until one grows in binned L1 norm over the last non-vanishing one; the first keep always stay."""
    kept, last = [], base_norm
    for i, masses in enumerate(groups):
        norm = _bin_norm(masses)
        if i >= keep and norm > last > 0.0:
            break
        kept.append(masses)
        if norm:
            last = norm
    return kept


def _smooth(masses, variance, width):
    """Gaussian smoothing of cell masses by spectral multiplication on a zero-padded window."""
    n = len(masses)
    nfft = sfft.next_fast_len(2 * n)
    k = 2.0 * np.pi * sfft.rfftfreq(nfft, d=width)
    return sfft.irfft(sfft.rfft(masses, nfft) * np.exp(-0.5 * variance * k ** 2), nfft)[:n]


def _assemble(ref, kappa, method, requested, edges, base, groups, warnings, truncate=False, keep=1):
    kept = _truncate(_bin_norm(base), groups, keep) if truncate else groups
    if len(kept) < len(groups):
        warnings.append(f"Series truncated after {len(kept)} of {len(groups)} correction groups")
    masses = base + sum(kept) if kept else base.copy()
    recon = SeriesReconstruction(
        reference=ref, kappa=kappa, method=method, order=requested, edges=edges, masses=masses,
        warnings=tuple(list(kappa.warnings) + warnings)
    )
    if abs(recon.total_mass - 1.0) > 0.05:
        logger.warning(f"{method} reconstruction integrates to {recon.total_mass:.4f} on its window")
    if masses.min() < 0:
        logger.info(f"{method} reconstruction has negative lobes down to {recon.values.min():.3e}")
    return recon


def gram_charlier_a(kappa, ref, order=None, truncate=Config.SERIES_TRUNCATE):
    """Gamma-based Gram-Charlier A series collected by derivative order.

    The k-th term is (-1)^k B_k/k! D^k G, with D^k G = k! L_k^(alpha-1-k)(t) G(x) / (x-a)^k,
    t = (x-a)/beta and B_k the complete Bell polynomial of the cumulant differences.
    With truncate the kappa_2 and kappa_3 terms are always kept.
    """
    order = len(kappa) if order is None else int(order)
    c, warnings = _differences(kappa, ref, order)
    bell = complete_bell(c[1:order + 1])
    edges = _window(ref, _pad_cells(0.0, 1.0))
    base = reference_masses(ref, edges)
    groups = []
    for k in range(2, order + 1):
        if bell[k] == 0.0:
            groups.append(np.zeros_like(base))
            continue
        groups.append((-1) ** k * bell[k] / special.factorial(k) * derivative_masses(ref, edges, k))
    return _assemble(ref, kappa, 'gram_charlier_a', order, edges, base, groups, warnings, truncate, keep=2)


def edgeworth(kappa, ref, order_n_half=Config.EDGEWORTH_ORDER, truncate=Config.SERIES_TRUNCATE):
    """Edgeworth-grouped series on the gamma reference, evaluated on cell masses.

    A positive kappa_2 difference is resummed as Gaussian smoothing of the whole series. A negative
    one has no smoothing kernel and enters as the explicit term c_2/2 D^2 G ahead of the groups.
    """
    if not 1 <= order_n_half <= len(EDGEWORTH_GROUPS):
        raise InvalidParameter(f"Edgeworth order must lie in [1, {len(EDGEWORTH_GROUPS)}], got {order_n_half}")
    needed = min(len(kappa), order_n_half + 2)
    c, warnings = _differences(kappa, ref, needed)
    edges = _window(ref, _pad_cells(c[2], Config.SERIES_WIDTH_BETAS * ref.beta / Config.SERIES_CELLS))
    width = edges[1] - edges[0]
    base = reference_masses(ref, edges)

    groups = []
    for terms in EDGEWORTH_GROUPS[:order_n_half]:
        group = np.zeros_like(base)
        for power, coef in terms:
            value = coef(c)
            if value:
                group += (-1) ** power * value * derivative_masses(ref, edges, power)
        groups.append(group)

    keep = 1
    if c[2] > 0:
        base = _smooth(base, c[2], width)
        groups = [_smooth(group, c[2], width) if np.any(group) else group for group in groups]
    elif c[2] < 0:
        groups.insert(0, 0.5 * c[2] * derivative_masses(ref, edges, 2))
        keep = 2
        warnings.append(f"kappa_2 - gamma_2 = {c[2]:.3e} < 0, applied as an explicit second-derivative term")
    return _assemble(ref, kappa, 'edgeworth', order_n_half, edges, base, groups, warnings, truncate, keep)


def reference_only(kappa, ref, pad_cells=None):
    edges = _window(ref, Config.CELLS_PER_BIN if pad_cells is None else pad_cells)
    return SeriesReconstruction(
        reference=ref, kappa=kappa, method='reference', order=0, edges=edges,
        masses=reference_masses(ref, edges)
    )


def binned_l1(recon, truth):
    """Sum of |mass differences| over the histogram bins (CELLS_PER_BIN cells each)."""
    return float(np.abs(recon.bin_masses(Config.CELLS_PER_BIN) - truth.masses).sum())


def scan(d, delta=Config.DELTA, m=Config.CUMULANT_ORDER, method='edgeworth', order=None, workers=1,
         truncate=Config.SERIES_TRUNCATE):
    """Full information scan: ladder, cumulants, reference, series and its histogram ground truth."""
    if method not in METHODS:
        raise InvalidParameter(f"Unknown series method '{method}' (expected one of {', '.join(METHODS)})")
    curve = entropy.entropy_power_curve(d, delta=delta, m=m, workers=workers)
    kappa = cumulants.cumulants_from_powers(curve, m)
    ref = gamma_reference_for(float(curve.powers[0]), d.dim)
    if method == 'edgeworth':
        recon = edgeworth(kappa, ref, min(order or Config.EDGEWORTH_ORDER, max(m - 2, 1)), truncate)
    else:
        recon = gram_charlier_a(kappa, ref, order or m, truncate)

    edges = recon.edges[::Config.CELLS_PER_BIN]
    truth = infodist.info_pdf_histogram(d, edges=edges)
    bare = reference_only(kappa, ref, pad_cells=int(round((ref.a - edges[0]) / recon.width)))
    report = {
        'method': method,
        'delta': delta,
        'm': m,
        'kappa': kappa.values.tolist(),
        'uncertainty': kappa.uncertainty.tolist(),
        'reference': ref.to_dict(),
        'l1': binned_l1(recon, truth),
        'l1_reference_only': binned_l1(bare, truth),
        'truth_mass': truth.total_mass,
        'warnings': list(recon.warnings)
    }
    logger.info(f"Scan {method} m={m}: L1={report['l1']:.4f} (reference only {report['l1_reference_only']:.4f})")
    return recon, truth, report
