# repscan/services/cumulants.py
import logging
import math

import numpy as np
from scipy import special

from repscan.config import Config, LOG2E
from repscan.errors import InsufficientLadder, InvalidParameter
from repscan.models import CumulantVector
from repscan.services import infodist

logger = logging.getLogger(__name__)


def _check_order(m):
    if int(m) != m or not 1 <= m <= Config.MAX_CUMULANT_ORDER:
        raise InvalidParameter(f"Cumulant count must be an integer in [1, {Config.MAX_CUMULANT_ORDER}], got {m}")
    return int(m)


def gaussian_reference_cumulants(n, dim=1):
    """Cumulants in bits^n of the information variable of a unit-covariance Gaussian."""
    if n < 1:
        raise InvalidParameter(f"Cumulant index must be >= 1, got {n}")
    bracket = math.factorial(n - 1) + (np.log(2.0 * np.pi) if n == 1 else 0.0)
    return float(dim / 2.0 * LOG2E ** n * bracket)


def moments_to_cumulants(moments):
    """Raw moments mu_0..mu_m (mu_0 = 1) to cumulants kappa_1..kappa_m."""
    mu = np.asarray(moments, dtype=float)
    m = len(mu) - 1
    kappa = np.zeros(m + 1)
    for n in range(1, m + 1):
        kappa[n] = mu[n] - sum(special.comb(n - 1, k - 1, exact=True) * kappa[k] * mu[n - k]
                               for k in range(1, n))
    return kappa[1:]


def cumulants_to_moments(kappa):
    """Cumulants kappa_1..kappa_m to raw moments mu_0..mu_m."""
    kappa = np.concatenate([[0.0], np.asarray(kappa, dtype=float)])
    m = len(kappa) - 1
    mu = np.zeros(m + 1)
    mu[0] = 1.0
    for n in range(1, m + 1):
        mu[n] = sum(special.comb(n - 1, k - 1, exact=True) * kappa[k] * mu[n - k] for k in range(1, n + 1))
    return mu


def cumulants_direct(d, m=Config.CUMULANT_ORDER):
    """Cumulants of the information variable from exact weighted sums over the grid."""
    m = _check_order(m)
    sample = infodist.information_values(d)
    central = sample.central_moments(m)
    kappa = moments_to_cumulants(central)
    kappa[0] = sample.mean()
    scale = np.sqrt(max(central[2], 0.0)) if m >= 2 else 0.0
    uncertainty = np.array([
        Config.DIRECT_NOISE * max(abs(k), scale ** n, 1.0) for n, k in enumerate(kappa, start=1)
    ])
    return CumulantVector(values=kappa, delta=None, dim=d.dim, source='direct', uncertainty=uncertainty)


def cumulants_from_powers(curve, m=Config.CUMULANT_ORDER):
    """Cumulants in bits^n from forward differences of log N over the order ladder 1, 1+delta, ...

    kappa_n = (nD/2) beta^n / delta^(n-1) sum_k (-1)^k C(n-1, k) ln N_(1+k delta) + reference_n
    with beta = log2(e).
    """
    m = _check_order(m)
    if len(curve) < m:
        raise InsufficientLadder(f"{m} cumulants need {m} entropy powers, curve has {len(curve)}")
    if not abs(curve.base_index - 1.0) < 1e-12:
        raise InvalidParameter(f"Ladder must start at order 1, starts at {curve.base_index}")
    delta = curve.delta
    if not 0 < delta <= Config.MAX_GLDF_DELTA:
        raise InvalidParameter(f"Ladder step must lie in (0, {Config.MAX_GLDF_DELTA}], got {delta}")
    if curve.convention != 'nats_exp':
        raise InvalidParameter(f"Cumulant extraction needs the nats_exp convention, got '{curve.convention}'")

    log_n = np.log(curve.powers[:m])
    dim = curve.dim
    kappa, uncertainty, warnings = [], [], []
    noise_scale = max(float(np.abs(log_n).max()), 1.0)
    for n in range(1, m + 1):
        signs = np.array([(-1) ** k * special.comb(n - 1, k, exact=True) for k in range(n)], dtype=float)
        difference = float(np.dot(signs, log_n[:n])) / delta ** (n - 1)
        prefactor = n * dim / 2.0 * LOG2E ** n
        kappa.append(prefactor * difference + gaussian_reference_cumulants(n, dim))
        amplification = 2.0 ** (n - 1) / delta ** (n - 1)
        uncertainty.append(prefactor * amplification * Config.LADDER_NOISE * noise_scale)
        if amplification > Config.ILL_CONDITIONED_FACTOR:
            warnings.append(f"IllConditioned: kappa_{n} amplifies ladder noise by {amplification:.2e}")

    for message in warnings:
        logger.warning(message)
    return CumulantVector(
        values=kappa, delta=delta, dim=dim, source='gldf',
        uncertainty=np.array(uncertainty), warnings=tuple(warnings)
    )


def renyi_from_cumulants(kappa, p):
    """Truncated cumulant series of p times the Renyi entropy of order 1 - p, in bits."""
    total = 0.0
    for n, k in enumerate(kappa.values, start=1):
        total += k * np.log(2.0) ** (n - 1) * p ** n / math.factorial(n)
    return float(total)
