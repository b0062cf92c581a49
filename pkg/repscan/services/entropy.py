# repscan/services/entropy.py
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import special

from repscan.config import Config
from repscan.errors import InvalidParameter, NonIntegrablePower, QExpDomain
from repscan.models import EntropyPowerCurve, EntropyValue, InequalityReport
from repscan.services import grid

logger = logging.getLogger(__name__)

CONVENTIONS = ('nats_exp', 'bits_exp')


def _check_order(q):
    if not q > 0:
        raise InvalidParameter(f"Entropy order must be positive, got {q}")


def _near_one(q):
    return abs(q - 1.0) < Config.Q_ONE_TOL


# q-deformed calculus

def ln_q(x, q):
    x = np.asarray(x, dtype=float)
    if _near_one(q):
        return np.log(x)
    return (x ** (1.0 - q) - 1.0) / (1.0 - q)


def exp_q(x, q):
    if _near_one(q):
        return np.exp(x)
    base = 1.0 + (1.0 - q) * np.asarray(x, dtype=float)
    if np.any(base < 0):
        raise QExpDomain(f"q-exponential argument 1 + (1-q)x = {np.min(base):.6g} is negative")
    return base ** (1.0 / (1.0 - q))


def oplus_q(x, y, q):
    return x + y + (1.0 - q) * x * y


# integrals

def log_power_integral(d, q):
    """log of the trapezoid integral of F^q, with the peak factored out."""
    _check_order(q)
    peak = float(d.values.max())
    if not peak > 0:
        raise NonIntegrablePower('Density has no positive values')
    scaled = d.values / peak
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        powered = np.where(scaled > 0, scaled ** q, 0.0)
    integral = grid.trapezoid(powered, d.spec)
    if not (integral > 0 and np.isfinite(integral)):
        raise NonIntegrablePower(f"Integral of F^{q} is {integral}")
    return q * np.log(peak) + np.log(integral)


def power_integral(d, q):
    value = np.exp(log_power_integral(d, q))
    if not (value > 0 and np.isfinite(value)):
        raise NonIntegrablePower(f"Integral of F^{q} is not representable")
    return float(value)


def shannon_entropy(d, base='nats'):
    value = grid.trapezoid(special.entr(d.values), d.spec)
    return EntropyValue(value, 'nats', 1.0).to(base)


def renyi_entropy(d, q, base='nats'):
    _check_order(q)
    if _near_one(q):
        return EntropyValue(shannon_entropy(d).value, 'nats', q).to(base)
    value = log_power_integral(d, q) / (1.0 - q)
    return EntropyValue(value, 'nats', q).to(base)


def tsallis_entropy(d, q):
    _check_order(q)
    if _near_one(q):
        return EntropyValue(shannon_entropy(d).value, 'nats', q)
    value = (power_integral(d, q) - 1.0) / (1.0 - q)
    return EntropyValue(value, 'nats', q)


# entropy powers

def _prefactor(p):
    """(1/2 pi) p^(-p'/p) with p' = p/(p-1)."""
    return p ** (-1.0 / (p - 1.0)) / (2.0 * np.pi)


def shannon_entropy_power(d):
    return float(np.exp(2.0 * shannon_entropy(d).value / d.dim) / (2.0 * np.pi * np.e))


def renyi_entropy_power(d, p, convention='nats_exp'):
    if convention not in CONVENTIONS:
        raise InvalidParameter(f"Unknown convention '{convention}'")
    _check_order(p)
    if _near_one(p):
        return shannon_entropy_power(d)
    if convention == 'bits_exp':
        bits = renyi_entropy(d, p, 'bits').value
        return float(_prefactor(p) * 2.0 ** (2.0 * bits / d.dim))
    nats = renyi_entropy(d, p).value
    return float(_prefactor(p) * np.exp(2.0 * nats / d.dim))


def tsallis_entropy_power(d, q):
    _check_order(q)
    if _near_one(q):
        return shannon_entropy_power(d)
    s = tsallis_entropy(d, q).value
    return float(_prefactor(q) * exp_q(s, q) ** (2.0 / d.dim))


def entropy_power_curve(d, delta=Config.DELTA, m=6, convention='nats_exp', workers=1):
    if not 0 < delta <= Config.MAX_CURVE_DELTA:
        raise InvalidParameter(f"delta must lie in (0, {Config.MAX_CURVE_DELTA}], got {delta}")
    if int(m) != m or m < 2:
        raise InvalidParameter(f"Ladder length m must be an integer >= 2, got {m}")
    orders = [1.0 + k * delta for k in range(int(m))]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            powers = list(pool.map(lambda p: renyi_entropy_power(d, p, convention), orders))
    else:
        powers = [renyi_entropy_power(d, p, convention) for p in orders]
    curve = EntropyPowerCurve(delta=delta, powers=powers, dim=d.dim, convention=convention)
    logger.info(f"Entropy power curve delta={delta} m={m} relative spread={curve.relative_spread:.3e}")
    return curve


def gaussian_maximality_check(d, q=2.0, check_tol=Config.CHECK_TOL, saturation_tol=Config.SATURATION_TOL):
    """Chain (q^(1/(q-1))/e) N_q <= N_1 <= det(cov)^(1/D) for q >= 1."""
    if q < 1:
        raise InvalidParameter(f"Maximality chain needs q >= 1, got {q}")
    n1 = shannon_entropy_power(d)
    det_power = float(np.linalg.det(grid.covariance(d)) ** (1.0 / d.dim))
    slack = det_power / n1 - 1.0
    lower = n1
    if not _near_one(q):
        lower = q ** (1.0 / (q - 1.0)) / np.e * renyi_entropy_power(d, q)
        slack = min(slack, n1 / lower - 1.0)
    return InequalityReport.from_values(
        f"gaussian_maximality(q={q:g})", det_power, n1, slack,
        check_tol=check_tol, saturation_tol=saturation_tol, lower=lower
    )
