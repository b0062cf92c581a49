# repscan/config.py
import os

import numpy as np

LOG2E = float(np.log2(np.e))


class Config:
    # Logging
    LOG_LEVEL = 'INFO'
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    LOG_MAX_BYTES = 1024 * 1024
    LOG_BACKUP_COUNT = 10

    # Default 1D acceptance grid
    GRID_MIN = -12.0
    GRID_MAX = 12.0
    GRID_COUNT = 2048
    MIN_AXIS_COUNT = 8
    MAX_DIM = 3

    # Densities
    NORM_TOL = 1e-8
    NEGATIVE_CLAMP = 1e-14
    TAIL_FLOOR = 1e-300
    SCORE_FLOOR = 1e-300
    SUPPORT_SIGMAS = 6.0
    Q_ONE_TOL = 1e-8

    # Inequality checks
    CHECK_TOL = 1e-6
    SATURATION_TOL = 1e-3
    DEBRUIJN_TOL = 1e-3
    DEBRUIJN_STEP = 1e-3
    DEBRUIJN_PRESMOOTH_CELLS = 32
    MOMENT_TOL = 1e-6
    CONJUGATE_PAD = 4

    # Information scan
    DELTA = 0.01
    CUMULANT_ORDER = 5
    MAX_CUMULANT_ORDER = 8
    MAX_CURVE_DELTA = 0.2
    MAX_GLDF_DELTA = 0.05
    HIST_BINS = 256
    HIST_REFINE = 8
    LADDER_NOISE = 1e-12
    DIRECT_NOISE = 1e-9
    SIGNIFICANCE = 3.0
    ILL_CONDITIONED_FACTOR = 1e6
    KAPPA1_MATCH_TOL = 1e-2
    SERIES_WIDTH_BETAS = 12.0
    SERIES_CELLS = 4096
    CELLS_PER_BIN = 16
    EDGEWORTH_ORDER = 3
    SERIES_TRUNCATE = False

    # Concurrency
    THREADS = int(os.environ.get('REPSCAN_THREADS', '0') or 0)


class DevelopmentConfig(Config):
    LOG_LEVEL = 'DEBUG'


class ProductionConfig(Config):
    LOG_LEVEL = 'WARNING'


class TestingConfig(Config):
    LOG_LEVEL = 'DEBUG'
    THREADS = 1


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': ProductionConfig
}


def get_config(name=None):
    name = name or os.environ.get('REPSCAN_PROFILE', 'default')
    if name not in config:
        from repscan.errors import ConfigError
        raise ConfigError(f"Unknown profile '{name}' (expected one of {', '.join(sorted(config))})")
    return config[name]
