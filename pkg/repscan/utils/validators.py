from repscan.config import Config
from repscan.errors import ConfigError

FORMATS = ('json', 'csv')


class RunConfigValidator:
    """Range checks run before any computation starts; failures exit with code 2."""

    @staticmethod
    def validate(run_config):
        params = run_config.params
        if run_config.format not in FORMATS:
            raise ConfigError(f"Output format must be one of {', '.join(FORMATS)}, got '{run_config.format}'")

        for key in ('q', 'p', 'r'):
            for value in RunConfigValidator._as_list(params.get(key)):
                if not value > 0:
                    raise ConfigError(f"Order {key} must be positive, got {value}")

        delta = params.get('delta')
        if delta is not None:
            limit = Config.MAX_GLDF_DELTA if run_config.command in ('cumulants', 'scan') else Config.MAX_CURVE_DELTA
            if not 0 < delta <= limit:
                raise ConfigError(f"delta must lie in (0, {limit}] for {run_config.command}, got {delta}")

        m = params.get('m')
        if m is not None and not 1 <= m <= Config.MAX_CUMULANT_ORDER:
            raise ConfigError(f"m must lie in [1, {Config.MAX_CUMULANT_ORDER}], got {m}")
        if run_config.command in ('power-curve',) and m is not None and m < 2:
            raise ConfigError(f"power-curve needs m >= 2, got {m}")

        bins = params.get('bins')
        if bins is not None and bins < 16:
            raise ConfigError(f"bins must be at least 16, got {bins}")

        count = params.get('count')
        if count is not None and count < Config.MIN_AXIS_COUNT:
            raise ConfigError(f"Grid needs at least {Config.MIN_AXIS_COUNT} points per axis, got {count}")

        dim = params.get('dim')
        if dim is not None and not 1 <= dim <= Config.MAX_DIM:
            raise ConfigError(f"dim must lie in [1, {Config.MAX_DIM}], got {dim}")

        lam = params.get('lambda')
        if lam is not None and not 0 < lam < 1:
            raise ConfigError(f"lambda must lie in (0, 1), got {lam}")

        hbar = params.get('hbar')
        if hbar is not None and not hbar > 0:
            raise ConfigError(f"hbar must be positive, got {hbar}")

        if run_config.command in ('entropy', 'power-curve', 'cumulants', 'infodist', 'check-moment',
                                  'verify', 'scan') and not run_config.input_path:
            raise ConfigError(f"{run_config.command} needs an input grid file (--in)")
        return run_config

    @staticmethod
    def _as_list(value):
        if value is None:
            return []
        if isinstance(value, (list, tuple)):
            return list(value)
        return [value]
