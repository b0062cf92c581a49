import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from repscan.config import Config
from repscan.errors import InvalidParameter, RepscanError
from repscan.models import InequalityReport, WaveFunction
from repscan.services import entropy, estimation, grid

logger = logging.getLogger(__name__)

DENSITY_SUITES = ('debruijn', 'iso', 'cr', 'epi', 'maximality')
WAVEFUNCTION_SUITES = ('stam', 'repur', 'robertson')
SUITES = DENSITY_SUITES + WAVEFUNCTION_SUITES

# (swap, tsallis) forms of the uncertainty relation
REPUR_VARIANTS = {
    'renyi': (False, False),
    'swapped': (True, False),
    'tsallis': (False, True),
    'tsallis_swapped': (True, True)
}


class VerificationService:
    def __init__(self, check_tol=Config.CHECK_TOL, saturation_tol=Config.SATURATION_TOL,
                 debruijn_tol=Config.DEBRUIJN_TOL, workers=1, epi_lambda=0.5, repur_variants=('renyi',)):
        self.tolerances = {
            'check_tol': check_tol,
            'saturation_tol': saturation_tol
        }
        self.debruijn_tol = debruijn_tol
        self.workers = max(1, int(workers or 1))
        if not 0 < epi_lambda < 1:
            raise InvalidParameter(f"lambda must lie in (0, 1), got {epi_lambda}")
        self.epi_lambda = epi_lambda
        unknown = [v for v in repur_variants if v not in REPUR_VARIANTS]
        if unknown:
            raise InvalidParameter(f"Unknown REPUR variant(s) {unknown} (expected {', '.join(REPUR_VARIANTS)})")
        self.repur_variants = tuple(repur_variants)

    def suites_for(self, suite, is_wavefunction):
        if suite == 'all':
            return SUITES if is_wavefunction else DENSITY_SUITES
        if suite not in SUITES:
            raise InvalidParameter(f"Unknown suite '{suite}' (expected all or one of {', '.join(SUITES)})")
        if suite in WAVEFUNCTION_SUITES and not is_wavefunction:
            raise InvalidParameter(f"Suite '{suite}' needs a wavefunction input")
        return (suite,)

    def _epi(self, d, partner, q):
        report = estimation.epi_check(d, d if partner is None else partner, self.epi_lambda, q, **self.tolerances)
        if partner is None:
            return report
        return dataclasses.replace(report, name=report.name.replace('epi(', 'epi_pair(', 1))

    def plan(self, target, suite='all', orders=(1.0, 2.0), partner=None):
        """Ordered list of (label, thunk) checks; orders outside a check's domain are skipped.

        The EPI checks pair the density with an independent copy of itself, and also with
        partner when one is given.
        """
        is_wave = isinstance(target, WaveFunction)
        d = grid.density_of(target) if is_wave else target
        tol = self.tolerances
        checks = []
        for name in self.suites_for(suite, is_wave):
            for q in orders:
                if name == 'debruijn':
                    checks.append((f"{name}:{q:g}", lambda q=q: estimation.de_bruijn_check(
                        d, np.eye(d.dim), q, tol=self.debruijn_tol, saturation_tol=tol['saturation_tol'])))
                elif name == 'iso' and q >= 1:
                    checks.append((f"{name}:{q:g}", lambda q=q: estimation.isoperimetric_check(d, q, **tol)))
                elif name == 'cr' and q >= 1:
                    checks.append((f"{name}:{q:g}", lambda q=q: estimation.cramer_rao_check(d, q, **tol)))
                elif name == 'epi' and q > 1:
                    checks.append((f"{name}:{q:g}", lambda q=q: self._epi(d, None, q)))
                    if partner is not None:
                        checks.append((f"{name}_pair:{q:g}", lambda q=q: self._epi(d, partner, q)))
                elif name == 'maximality' and q >= 1:
                    checks.append((f"{name}:{q:g}", lambda q=q: entropy.gaussian_maximality_check(d, q, **tol)))
                elif name == 'stam' and q >= 1:
                    checks.append((f"{name}:{q:g}", lambda q=q: estimation.stam_check(target, q, **tol)))
                elif name == 'repur':
                    p = max(2.0 * q, 2.0)
                    for variant in self.repur_variants:
                        swap, tsallis = REPUR_VARIANTS[variant]
                        checks.append((f"{name}:{p:g}:{variant}", lambda p=p, swap=swap, tsallis=tsallis:
                                       estimation.repur_check(target, p, swap, tsallis, **tol)))
            if name == 'robertson':
                checks.append((name, lambda: estimation.robertson_check(target, **tol)))
        # repur collapses orders <= 1 onto p = 2
        seen, unique = set(), []
        for label, thunk in checks:
            if label not in seen:
                seen.add(label)
                unique.append((label, thunk))
        return unique

    def _guarded(self, label, thunk):
        try:
            return thunk()
        except RepscanError as e:
            logger.error(f"{label} failed: {e.name}: {e.message}")
            return InequalityReport.failed(label, e)

    def execute(self, checks):
        logger.info(f"Running {len(checks)} checks with {self.workers} worker(s)")
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                futures = [pool.submit(self._guarded, label, thunk) for label, thunk in checks]
                reports = [f.result() for f in futures]
        else:
            reports = [self._guarded(label, thunk) for label, thunk in checks]
        for report in reports:
            if 'error' in report.details:
                continue
            level = logging.INFO if report.satisfied else logging.WARNING
            logger.log(level, f"{report.name}: lhs={report.lhs:.6g} rhs={report.rhs:.6g} slack={report.slack:.3e}")
        return reports

    def run(self, target, suite='all', orders=(1.0, 2.0), partner=None):
        checks = self.plan(target, suite, orders, partner)
        if not checks:
            raise InvalidParameter(f"No check of suite '{suite}' applies to orders {list(orders)}")
        return self.execute(checks)
