# repscan/__init__.py
import json
import logging

import click

from repscan.config import get_config
from repscan.errors import ConfigError
from repscan.utils.custom_logger import CustomLogger
from repscan.utils.system_monitor import SystemMonitor

__version__ = '0.1.0'


def _load_config_file(ctx, param, value):
    """Top-level keys name subcommands, nested keys name their options; flags still win."""
    if value is None:
        return value
    try:
        with open(value, 'r', encoding='utf-8') as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read config file {value}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {value} must hold a JSON object")
    ctx.default_map = {**(ctx.default_map or {}), **data}
    return value


def create_cli(config_name=None):
    @click.group('repscan')
    @click.version_option(__version__, prog_name='repscan')
    @click.option('--config', 'config_file', default=None, type=click.Path(dir_okay=False),
                  is_eager=True, expose_value=False, callback=_load_config_file,
                  help='JSON file of option defaults keyed by subcommand.')
    @click.option('--profile', default=None, help='Configuration profile (development, production, testing).')
    @click.option('--log-file', default=None, type=click.Path(dir_okay=False), help='Rotating log file.')
    @click.option('-v', '--verbose', is_flag=True, help='Log at DEBUG level.')
    @click.pass_context
    def cli(ctx, profile, log_file, verbose):
        """Entropy powers, estimation inequalities and information scans on gridded densities."""
        cfg = get_config(profile or config_name)
        level = logging.DEBUG if verbose else cfg.LOG_LEVEL
        CustomLogger.setup_logger(level, log_file)
        monitor = SystemMonitor(cfg.THREADS)
        ctx.obj = {'config': cfg, 'workers': monitor.worker_count(), 'monitor': monitor}

    # Register command modules
    from repscan.commands import analysis, scan, state, verify

    cli.add_command(state.bp)
    cli.add_command(analysis.entropy_command)
    cli.add_command(analysis.power_curve)
    cli.add_command(analysis.cumulants_command)
    cli.add_command(analysis.infodist_command)
    cli.add_command(analysis.check_moment)
    cli.add_command(verify.verify)
    cli.add_command(scan.scan)
    cli.add_command(scan.figures)
    return cli
