# repscan/services/estimation.py
import logging

import numpy as np
from scipy import ndimage

from repscan.config import Config
from repscan.errors import DerivativeUnstable, GridTooCoarse, InvalidParameter
from repscan.models import FisherMatrix, GriddedDensity, InequalityReport, VectorField
from repscan.services import entropy, grid

logger = logging.getLogger(__name__)


def escort(d, q):
    """Escort density F^q / integral of F^q."""
    entropy.power_integral(d, q)
    if q == 1:
        return grid.normalize(d)
    scaled = d.values / d.values.max()
    powered = np.where(scaled > 0, scaled ** q, 0.0)
    return grid.normalize(GriddedDensity.unnormalized(d.spec, powered))


def _valid_log_stencil(mask, axis):
    # np.gradient with edge_order=2 reads up to two neighbours at the boundary
    return ndimage.minimum_filter1d(mask.astype(np.uint8), size=5, axis=axis, mode='nearest').astype(bool)


def score_vector(d, q=1.0, floor=Config.SCORE_FLOOR):
    """Order-q score q grad(F)/F; zero where F is below floor * max F."""
    if min(d.spec.shape) < 3:
        raise GridTooCoarse(f"Score needs 3 points per axis, grid shape is {d.spec.shape}")
    values = d.values
    mask = values > floor * values.max()
    if not mask.any():
        raise GridTooCoarse('Density has no points above the score floor')
    log_values = np.log(np.where(mask, values, 1.0))
    log_grads = np.gradient(log_values, *d.spec.spacings, edge_order=2)
    if d.dim == 1:
        log_grads = [log_grads]
    raw_grads = grid.gradient(d).components
    safe = np.where(mask, values, 1.0)
    components = []
    for axis in range(d.dim):
        stencil_ok = _valid_log_stencil(mask, axis)
        component = np.where(stencil_ok, log_grads[axis], raw_grads[axis] / safe)
        components.append(q * np.where(mask, component, 0.0))
    return VectorField(d.spec, tuple(components))


def fisher_matrix(d, q=1.0):
    rho = escort(d, q)
    score = score_vector(d, q)
    dim = d.dim
    expect = np.array([grid.trapezoid(rho.values * score[i], d.spec) for i in range(dim)])
    entries = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            second = grid.trapezoid(rho.values * score[i] * score[j], d.spec)
            entries[i, j] = entries[j, i] = second - expect[i] * expect[j]
    return FisherMatrix(order=q, entries=entries)


# De Bruijn identities

def default_eps_step(d):
    """1e-3 times the smaller of the average per-axis variance and the inverse average Fisher information."""
    fisher = fisher_matrix(d, 1.0)
    scale = float(np.trace(grid.covariance(d))) / d.dim
    if fisher.trace > 0:
        scale = min(scale, d.dim / fisher.trace)
    return Config.DEBRUIJN_STEP * scale


def presmoothing_scale(d, sigma):
    """Noise scale t0 that spreads sigma over DEBRUIJN_PRESMOOTH_CELLS grid cells along its narrowest direction."""
    eigenvalues = np.linalg.eigvalsh(sigma)
    smallest = float(eigenvalues[eigenvalues > 0].min())
    return (Config.DEBRUIJN_PRESMOOTH_CELLS * max(d.spec.spacings)) ** 2 / smallest


def entropy_slope(d, sigma, q, eps_ladder=None, kind='gaussian', tol=Config.DEBRUIJN_TOL):
    """Right derivative at 0 of eps -> I_q(X + sqrt(eps) Z) by two Richardson passes.

    eps_ladder is (h, 2h, 4h); forward quotients D(e) carry O(e) and O(e^2) errors.
    """
    if eps_ladder is None:
        h = default_eps_step(d)
        eps_ladder = (h, 2 * h, 4 * h)
    h1, h2, h4 = sorted(eps_ladder)
    if not (np.isclose(h2, 2 * h1) and np.isclose(h4, 4 * h1)):
        raise InvalidParameter(f"eps ladder must be (h, 2h, 4h), got {eps_ladder}")
    base = entropy.renyi_entropy(d, q).value
    quotients = [
        (entropy.renyi_entropy(grid.convolve_noise(d, sigma, eps, kind), q).value - base) / eps
        for eps in (h1, h2, h4)
    ]
    first = 2 * quotients[0] - quotients[1]
    second = 2 * quotients[1] - quotients[2]
    slope = (4 * first - second) / 3
    residual = abs(first - slope)
    scale = max(abs(slope), 1e-12)
    logger.debug(f"De Bruijn quotients {quotients}, extrapolated {slope:.10g}, residual {residual:.3e}")
    if residual > 10 * tol * scale:
        raise DerivativeUnstable(f"Richardson residual {residual:.3e} exceeds {10 * tol:g} relative")
    return slope


def de_bruijn_check(d, sigma, q=1.0, eps_ladder=None, kind='gaussian', tol=Config.DEBRUIJN_TOL,
                    saturation_tol=Config.SATURATION_TOL, presmooth=True):
    """d/deps I_q(X + sqrt(eps) Z) at 0 against tr(J_q sigma) / 2q.

    Where the slope at eps = 0 is not resolvable (sharp edges), the identity is checked at
    X + sqrt(t0) Z instead; t0 is reported in the details.
    """
    sigma = grid.as_noise_covariance(sigma, d.dim)
    name = f"de_bruijn(q={q:g}, noise={kind})"
    if not np.any(sigma):
        return InequalityReport.from_values(name, 0.0, 0.0, 0.0, check_tol=tol, saturation_tol=saturation_tol)
    details = {}
    try:
        lhs = entropy_slope(d, sigma, q, eps_ladder, kind, tol)
    except DerivativeUnstable as e:
        if not presmooth:
            raise
        t0 = presmoothing_scale(d, sigma)
        logger.info(f"{name}: {e}; checking at noise scale t0={t0:.4g} instead")
        d = grid.convolve_noise(d, sigma, t0)
        details['presmooth'] = t0
        lhs = entropy_slope(d, sigma, q, eps_ladder, kind, tol)
    rhs = float(np.trace(fisher_matrix(d, q).entries @ sigma)) / (2.0 * q)
    slack = -abs(lhs - rhs) / max(abs(rhs), 1e-300)
    return InequalityReport.from_values(name, lhs, rhs, slack, check_tol=tol, saturation_tol=saturation_tol,
                                        **details)


def de_bruijn_matrix_check(d, q=1.0, eps_ladder=None, tol=Config.DEBRUIJN_TOL,
                           saturation_tol=Config.SATURATION_TOL):
    """Entrywise derivative of I_q in the noise covariance against J_q / 2q.

    Off-diagonal entries come from the direction (e_i + e_j)(e_i + e_j)^T.
    """
    dim = d.dim
    unit = np.eye(dim)
    derivative = np.empty((dim, dim))
    for i in range(dim):
        derivative[i, i] = entropy_slope(d, np.outer(unit[i], unit[i]), q, eps_ladder, tol=tol)
    for i in range(dim):
        for j in range(i + 1, dim):
            u = unit[i] + unit[j]
            along = entropy_slope(d, np.outer(u, u), q, eps_ladder, tol=tol)
            derivative[i, j] = derivative[j, i] = (along - derivative[i, i] - derivative[j, j]) / 2.0
    target = fisher_matrix(d, q).entries / (2.0 * q)
    dominant = max(np.abs(target).max(), 1e-300)
    slack = -np.abs(derivative - target).max() / dominant
    return InequalityReport.from_values(
        f"de_bruijn_matrix(q={q:g})", np.linalg.norm(derivative), np.linalg.norm(target), slack,
        check_tol=tol, saturation_tol=saturation_tol, derivative=derivative.tolist(), target=target.tolist()
    )


# Inequality tower

def isoperimetric_check(d, q=1.0, form='det', check_tol=Config.CHECK_TOL, saturation_tol=Config.SATURATION_TOL):
    if q < 1:
        raise InvalidParameter(f"Isoperimetric inequality needs q >= 1, got {q}")
    n_q = entropy.renyi_entropy_power(d, q)
    fisher = fisher_matrix(d, q)
    det_product = n_q * max(fisher.det, 0.0) ** (1.0 / d.dim)
    trace_product = n_q * fisher.trace / d.dim
    if form == 'det':
        lhs = det_product
    elif form == 'trace':
        lhs = trace_product
    else:
        raise InvalidParameter(f"Unknown isoperimetric form '{form}'")
    return InequalityReport.from_values(
        f"isoperimetric(q={q:g}, form={form})", lhs, 1.0, lhs - 1.0,
        check_tol=check_tol, saturation_tol=saturation_tol,
        det_product=det_product, trace_product=trace_product
    )


def _cr_factor(q):
    """q^(1/(q-1)) / e, which tends to 1 as q -> 1."""
    if abs(q - 1.0) < Config.Q_ONE_TOL:
        return 1.0
    return q ** (1.0 / (q - 1.0)) / np.e


def cramer_rao_check(d, q=1.0, form='trace', check_tol=Config.CHECK_TOL, saturation_tol=Config.SATURATION_TOL):
    if q < 1:
        raise InvalidParameter(f"Cramer-Rao chain needs q >= 1, got {q}")
    dim = d.dim
    cov = grid.covariance(d)
    fisher = fisher_matrix(d, q)
    if form == 'trace':
        lhs = float(np.trace(cov)) / dim
        rhs = dim * _cr_factor(q) / fisher.trace
        weaker = dim / (np.e * fisher.trace)
    elif form == 'det':
        lhs = float(np.linalg.det(cov))
        rhs = _cr_factor(q) ** dim / fisher.det
        weaker = 1.0 / (np.e ** dim * fisher.det)
    else:
        raise InvalidParameter(f"Unknown Cramer-Rao form '{form}'")
    return InequalityReport.from_values(
        f"cramer_rao(q={q:g}, form={form})", lhs, rhs, lhs / rhs - 1.0,
        check_tol=check_tol, saturation_tol=saturation_tol, weaker_bound=weaker
    )


def epi_orders(lam, r):
    q = r / ((1.0 - lam) + lam * r)
    p = r / (lam + (1.0 - lam) * r)
    return q, p


def epi_check(d1, d2, lam=0.5, r=2.0, check_tol=Config.CHECK_TOL, saturation_tol=Config.SATURATION_TOL):
    if not 0 < lam < 1:
        raise InvalidParameter(f"lambda must lie in (0, 1), got {lam}")
    if not r > 1:
        raise InvalidParameter(f"EPI order r must exceed 1, got {r}")
    q, p = epi_orders(lam, r)
    total = grid.convolve(d1, d2)
    lhs = entropy.renyi_entropy_power(total, r)
    rhs = ((entropy.renyi_entropy_power(d1, q) / (1.0 - lam)) ** (1.0 - lam)
           * (entropy.renyi_entropy_power(d2, p) / lam) ** lam)
    return InequalityReport.from_values(
        f"epi(lambda={lam:g}, r={r:g})", lhs, rhs, lhs / rhs - 1.0,
        check_tol=check_tol, saturation_tol=saturation_tol, q=q, p=p
    )


def conjugate_densities(w, pad=Config.CONJUGATE_PAD):
    """Position and momentum densities of w in hbar units."""
    conjugate = grid.fourier_conjugate(grid.pad_wavefunction(w, pad))
    return grid.density_of(w), grid.density_of(conjugate)


def unit_frequency_pair(w, pad=Config.CONJUGATE_PAD):
    """Conjugate densities rescaled to the exp(2 pi i x.y) convention: x -> x / sqrt(2 pi hbar)."""
    position, momentum = conjugate_densities(w, pad)
    factor = 1.0 / np.sqrt(2.0 * np.pi * w.hbar)
    return grid.rescale(position, factor), grid.rescale(momentum, factor)


def stam_check(w, r=1.0, check_tol=Config.CHECK_TOL, saturation_tol=Config.SATURATION_TOL):
    """det(J_r(X))^(1/D) >= 16 pi^2 N_q(Y) with 1/r + 1/q = 2, in the unit-frequency convention.

    The Fisher side is the larger one: position Fisher information bounds the momentum
    entropy power from above, lhs = det(J_r(X))^(1/D) and rhs = 16 pi^2 N_q(Y).
    The position Fisher matrix only sees |psi|^2, so the bound holds for amplitudes
    with constant phase; chirped states can violate it.
    """
    if r < 1:
        raise InvalidParameter(f"Stam order r must be >= 1, got {r}")
    q = r / (2.0 * r - 1.0)
    x_density, y_density = unit_frequency_pair(w)
    lhs = max(fisher_matrix(x_density, r).det, 0.0) ** (1.0 / w.dim)
    rhs = 16.0 * np.pi ** 2 * entropy.renyi_entropy_power(y_density, q)
    return InequalityReport.from_values(
        f"stam(r={r:g}, q={q:g})", lhs, rhs, lhs / rhs - 1.0,
        check_tol=check_tol, saturation_tol=saturation_tol, q=q
    )


def repur_orders(p):
    if p < 2:
        raise InvalidParameter(f"REPUR order p must be >= 2, got {p}")
    return p / 2.0, p / (2.0 * (p - 1.0))


def repur_check(w, p=2.0, swap=False, tsallis=False, check_tol=Config.CHECK_TOL,
                saturation_tol=Config.SATURATION_TOL):
    """N_{p/2}(|psi|^2) N_{q/2}(|psi_hat|^2) >= hbar^2/4 with 1/p + 1/q = 1.

    The Tsallis form is evaluated in the unit-frequency convention against 1/(16 pi^2).
    """
    x_order, y_order = repur_orders(p)
    if swap:
        x_order, y_order = y_order, x_order
    if tsallis:
        x_density, y_density = unit_frequency_pair(w)
        lhs = entropy.tsallis_entropy_power(x_density, x_order) * entropy.tsallis_entropy_power(y_density, y_order)
        rhs = 1.0 / (16.0 * np.pi ** 2)
    else:
        x_density, y_density = conjugate_densities(w)
        lhs = entropy.renyi_entropy_power(x_density, x_order) * entropy.renyi_entropy_power(y_density, y_order)
        rhs = w.hbar ** 2 / 4.0
    kind = 'tsallis' if tsallis else 'renyi'
    return InequalityReport.from_values(
        f"repur(p={p:g}, orders=({x_order:g}, {y_order:g}), {kind})", lhs, rhs, lhs / rhs - 1.0,
        check_tol=check_tol, saturation_tol=saturation_tol
    )


def robertson_check(w, check_tol=Config.CHECK_TOL, saturation_tol=Config.SATURATION_TOL):
    """Average position variance times average momentum variance >= hbar^2/4."""
    x_density, y_density = conjugate_densities(w)
    lhs = float(np.trace(grid.covariance(x_density)) * np.trace(grid.covariance(y_density))) / w.dim ** 2
    rhs = w.hbar ** 2 / 4.0
    return InequalityReport.from_values(
        'robertson', lhs, rhs, lhs / rhs - 1.0, check_tol=check_tol, saturation_tol=saturation_tol
    )
