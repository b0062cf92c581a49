# repscan/models.py
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import pandas as pd
from scipy import integrate, stats

from repscan.config import Config, LOG2E
from repscan.errors import InvalidGrid, NotNormalized


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    count: int

    @property
    def spacing(self):
        return (self.max - self.min) / (self.count - 1)

    @property
    def extent(self):
        return self.max - self.min

    def points(self):
        return np.linspace(self.min, self.max, self.count)

    def to_dict(self):
        return {'min': float(self.min), 'max': float(self.max), 'count': int(self.count)}


@dataclass(frozen=True)
class GridSpec:
    axes: tuple

    def __post_init__(self):
        axes = tuple(a if isinstance(a, Axis) else Axis(*a) for a in self.axes)
        object.__setattr__(self, 'axes', axes)
        if not 1 <= len(axes) <= Config.MAX_DIM:
            raise InvalidGrid(f"Grid dimension must be between 1 and {Config.MAX_DIM}, got {len(axes)}")
        for i, axis in enumerate(axes):
            if int(axis.count) != axis.count or axis.count < Config.MIN_AXIS_COUNT:
                raise InvalidGrid(f"Axis {i} needs at least {Config.MIN_AXIS_COUNT} points, got {axis.count}")
            if not (np.isfinite(axis.min) and np.isfinite(axis.max)) or axis.max <= axis.min:
                raise InvalidGrid(f"Axis {i} has max <= min ({axis.min}, {axis.max})")

    @classmethod
    def uniform(cls, min_, max_, count, dim=1):
        return cls(tuple(Axis(float(min_), float(max_), int(count)) for _ in range(dim)))

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(Axis(float(a['min']), float(a['max']), int(a['count'])) for a in data))

    @property
    def dim(self):
        return len(self.axes)

    @property
    def shape(self):
        return tuple(a.count for a in self.axes)

    @property
    def spacings(self):
        return tuple(a.spacing for a in self.axes)

    @property
    def cell_volume(self):
        return float(np.prod(self.spacings))

    @property
    def total_points(self):
        return int(np.prod(self.shape))

    def coordinates(self):
        return [a.points() for a in self.axes]

    def mesh(self):
        return np.meshgrid(*self.coordinates(), indexing='ij')

    def to_dict(self):
        return [a.to_dict() for a in self.axes]


@dataclass(frozen=True, eq=False)
class GriddedDensity:
    """Probability density sampled on a grid; norm_tol=None marks raw values still to be normalized."""
    spec: GridSpec
    values: np.ndarray
    norm_tol: Optional[float] = Config.NORM_TOL

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(self.spec.shape)
        object.__setattr__(self, 'values', values)
        if self.norm_tol is None:
            return
        if not np.all(np.isfinite(values)):
            raise InvalidGrid('Density contains non-finite values')
        if values.min(initial=0.0) < -Config.NEGATIVE_CLAMP:
            raise InvalidGrid(f"Density has negative values down to {values.min():.3e}")
        mass = self.mass
        if abs(mass - 1.0) > self.norm_tol:
            raise NotNormalized(f"Density integrates to {mass:.12g}, expected 1 within {self.norm_tol:g}")

    @classmethod
    def unnormalized(cls, spec, values):
        return cls(spec, values, norm_tol=None)

    @property
    def mass(self):
        out = self.values
        for axis in reversed(range(self.spec.dim)):
            out = integrate.trapezoid(out, dx=self.spec.spacings[axis], axis=axis)
        return float(out)

    @property
    def dim(self):
        return self.spec.dim

    def with_values(self, values):
        return GriddedDensity(self.spec, values, self.norm_tol)

    def to_dict(self):
        return {
            'kind': 'density',
            'dim': self.dim,
            'axes': self.spec.to_dict(),
            'values': self.values.ravel().tolist()
        }


@dataclass(frozen=True, eq=False)
class WaveFunction:
    spec: GridSpec
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).reshape(self.spec.shape)
        object.__setattr__(self, 'values', values)

    @property
    def dim(self):
        return self.spec.dim

    def density_values(self):
        return np.abs(self.values) ** 2

    def to_dict(self):
        flat = self.values.ravel()
        return {
            'kind': 'wavefunction',
            'dim': self.dim,
            'hbar': float(self.hbar),
            'axes': self.spec.to_dict(),
            'values': np.column_stack([flat.real, flat.imag]).tolist()
        }


@dataclass(frozen=True, eq=False)
class VectorField:
    spec: GridSpec
    components: tuple

    def __post_init__(self):
        comps = tuple(np.asarray(c, dtype=float).reshape(self.spec.shape) for c in self.components)
        if len(comps) != self.spec.dim:
            raise InvalidGrid(f"Vector field needs {self.spec.dim} components, got {len(comps)}")
        object.__setattr__(self, 'components', comps)

    def __getitem__(self, i):
        return self.components[i]


@dataclass(frozen=True)
class CatStateParams:
    nu: float
    alpha: float
    theta: float = 0.0

    @property
    def is_vacuum(self):
        return self.nu == 0.0

    @property
    def normalization(self):
        """Analytic normalization factor of the vacuum plus coherent superposition."""
        if self.is_vacuum:
            return 1.0
        overlap = np.exp(-self.alpha ** 2 / (2.0 * self.nu ** 2))
        return float((1.0 + 2.0 * self.nu * overlap + self.nu ** 2) ** -0.5)

    def to_dict(self):
        return {'nu': self.nu, 'alpha': self.alpha, 'theta': self.theta}


@dataclass(frozen=True)
class EntropyValue:
    value: float
    base: str
    order: float

    def to(self, base):
        if base == self.base:
            return self
        if base not in ('nats', 'bits'):
            raise ValueError(f"Unknown entropy base '{base}'")
        factor = LOG2E if base == 'bits' else 1.0 / LOG2E
        return EntropyValue(self.value * factor, base, self.order)

    def to_dict(self):
        return {'order': float(self.order), 'value': float(self.value), 'base': self.base}


@dataclass(frozen=True, eq=False)
class EntropyPowerCurve:
    delta: float
    powers: np.ndarray
    dim: int
    convention: str = 'nats_exp'
    base_index: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'powers', np.asarray(self.powers, dtype=float))

    @property
    def ks(self):
        return np.arange(len(self.powers))

    @property
    def orders(self):
        return self.base_index + self.ks * self.delta

    @property
    def relative_spread(self):
        return float((self.powers.max() - self.powers.min()) / self.powers.mean())

    def __len__(self):
        return len(self.powers)

    def to_frame(self):
        return pd.DataFrame({'k': self.ks, 'order': self.orders, 'N': self.powers})


@dataclass(frozen=True, eq=False)
class FisherMatrix:
    order: float
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'entries', np.atleast_2d(np.asarray(self.entries, dtype=float)))

    @property
    def trace(self):
        return float(np.trace(self.entries))

    @property
    def det(self):
        return float(np.linalg.det(self.entries))

    def to_dict(self):
        return {'order': self.order, 'entries': self.entries.tolist(), 'trace': self.trace}


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    satisfied: bool
    slack: float
    saturated: bool
    details: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_values(cls, name, lhs, rhs, slack, check_tol=Config.CHECK_TOL,
                    saturation_tol=Config.SATURATION_TOL, **details):
        slack = float(slack)
        return cls(
            name=name,
            lhs=float(lhs),
            rhs=float(rhs),
            satisfied=bool(slack >= -check_tol),
            slack=slack,
            saturated=bool(abs(slack) <= saturation_tol),
            details=details
        )

    @classmethod
    def failed(cls, name, error):
        """Unsatisfied report for a check that raised instead of producing numbers."""
        nan = float('nan')
        return cls(name=name, lhs=nan, rhs=nan, satisfied=False, slack=nan, saturated=False,
                   details={'error': f"{type(error).__name__}: {error}"})

    def to_dict(self):
        payload = {
            'name': self.name,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'satisfied': self.satisfied,
            'slack': self.slack,
            'saturated': self.saturated
        }
        if 'error' in self.details:
            payload['error'] = self.details['error']
        return payload


@dataclass(frozen=True, eq=False)
class InformationSample:
    """Information values -log2 F in bits with their probability weights, sorted by value."""
    values: np.ndarray
    weights: np.ndarray

    @property
    def total_weight(self):
        return float(self.weights.sum())

    def mean(self):
        return float(np.dot(self.weights, self.values) / self.total_weight)

    def central_moments(self, m):
        w = self.weights / self.total_weight
        centred = self.values - self.mean()
        return np.array([np.dot(w, centred ** k) for k in range(m + 1)])


@dataclass(frozen=True, eq=False)
class InfoDistribution:
    kind: str
    support: tuple
    centers: np.ndarray
    masses: np.ndarray
    total_mass: float

    @property
    def width(self):
        if len(self.centers) < 2:
            return 0.0
        return float(self.centers[1] - self.centers[0])

    @property
    def edges(self):
        w = self.width
        return np.append(self.centers - w / 2.0, self.centers[-1] + w / 2.0)

    @property
    def density(self):
        if self.width == 0.0:
            return self.masses.copy()
        return self.masses / self.width

    def to_frame(self):
        return pd.DataFrame({'center_bits': self.centers, 'density': self.density})


@dataclass(frozen=True, eq=False)
class CumulantVector:
    values: np.ndarray
    delta: Optional[float]
    dim: int
    source: str
    uncertainty: Optional[np.ndarray] = None
    warnings: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'values', np.asarray(self.values, dtype=float))
        if self.uncertainty is not None:
            object.__setattr__(self, 'uncertainty', np.asarray(self.uncertainty, dtype=float))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        """One-based access: kappa[1] is the first cumulant."""
        return float(self.values[n - 1])

    def to_dict(self):
        return {
            'values': self.values.tolist(),
            'delta': self.delta,
            'dim': self.dim,
            'source': self.source,
            'uncertainty': None if self.uncertainty is None else self.uncertainty.tolist(),
            'warnings': list(self.warnings)
        }


@dataclass(frozen=True)
class GammaReference:
    a: float
    alpha: float = 0.5
    beta: float = LOG2E

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError('Gamma reference needs alpha > 0 and beta > 0')

    @property
    def distribution(self):
        return stats.gamma(self.alpha, loc=self.a, scale=self.beta)

    def pdf(self, x):
        return self.distribution.pdf(x)

    def cdf(self, x):
        return self.distribution.cdf(x)

    def to_dict(self):
        return {'a': self.a, 'alpha': self.alpha, 'beta': self.beta}


@dataclass(frozen=True, eq=False)
class SeriesReconstruction:
    """Series estimate of the information PDF stored as cell masses on a uniform window."""
    reference: GammaReference
    kappa: CumulantVector
    method: str
    order: int
    edges: np.ndarray
    masses: np.ndarray
    warnings: tuple = ()

    @property
    def width(self):
        return float(self.edges[1] - self.edges[0])

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def values(self):
        return self.masses / self.width

    @property
    def total_mass(self):
        return float(self.masses.sum())

    @property
    def evaluation(self) -> Callable:
        values = self.values
        edges = self.edges

        def evaluate(x):
            x = np.asarray(x, dtype=float)
            idx = np.searchsorted(edges, x, side='right') - 1
            inside = (idx >= 0) & (idx < len(values))
            return np.where(inside, values[np.clip(idx, 0, len(values) - 1)], 0.0)

        return evaluate

    def bin_masses(self, group):
        """Masses summed over consecutive groups of cells."""
        n = len(self.masses) // group * group
        return self.masses[:n].reshape(-1, group).sum(axis=1)

    def to_frame(self):
        return pd.DataFrame({'x_bits': self.centers, 'density': self.values})


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    input_path: Optional[str] = None
    output_paths: dict = field(default_factory=dict)
    format: str = 'json'
    seed: int = 0

    def to_dict(self):
        return {
            'command': self.command,
            'params': self.params,
            'input_path': self.input_path,
            'output_paths': self.output_paths,
            'format': self.format,
            'seed': self.seed
        }
