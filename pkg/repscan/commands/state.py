import logging

import click

from repscan.errors import ConfigError
from repscan.models import CatStateParams, RunConfig, WaveFunction
from repscan.services import grid, states
from repscan.services.data_service import data_service
from repscan.utils.helpers import load_target, parse_box, parse_float_list, parse_grid
from repscan.utils.middleware import Middleware
from repscan.utils.validators import RunConfigValidator

logger = logging.getLogger(__name__)


def grid_options(f):
    f = click.option('--grid', 'grid_text', default=None, help='min:max:count per axis (default -12:12:2048).')(f)
    f = click.option('--dim', default=1, show_default=True, type=int, help='Grid dimension.')(f)
    f = click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False),
                     help='Output .grid.json file.')(f)
    return f


@click.group('state')
def bp():
    """Generate densities and wavefunctions on a grid."""


@bp.command('cat')
@grid_options
@click.option('--nu', type=float, required=True, help='Coherent admixture weight (0 gives the vacuum).')
@click.option('--alpha', type=float, required=True, help='Coherent amplitude.')
@click.option('--theta', type=float, default=0.0, show_default=True, help='Quadrature angle.')
@click.option('--wavefunction', is_flag=True, help='Store the quadrature amplitude instead of its density.')
@click.option('--hbar', type=float, default=1.0, show_default=True)
@Middleware.command_timer('state cat')
def cat(grid_text, dim, out_path, nu, alpha, theta, wavefunction, hbar):
    run_config = RunConfig('state', {'dim': dim, 'hbar': hbar}, output_paths={'grid': out_path})
    RunConfigValidator.validate(run_config)
    spec = parse_grid(grid_text, dim)
    params = CatStateParams(nu=nu, alpha=alpha, theta=theta)
    if wavefunction:
        data_service.save_grid(states.cat_wavefunction(params, spec, hbar), out_path)
    else:
        data_service.save_grid(states.cat_quadrature_density(params, spec), out_path)


@bp.command('gaussian')
@grid_options
@click.option('--mean', default='0', show_default=True, help='Comma separated mean, one value per axis.')
@click.option('--sigma2', default='1', show_default=True, help='Comma separated per-axis variances.')
@click.option('--wavefunction', is_flag=True, help='Store a minimum-uncertainty packet instead of the density.')
@click.option('--hbar', type=float, default=1.0, show_default=True)
@Middleware.command_timer('state gaussian')
def gaussian(grid_text, dim, out_path, mean, sigma2, wavefunction, hbar):
    run_config = RunConfig('state', {'dim': dim, 'hbar': hbar}, output_paths={'grid': out_path})
    RunConfigValidator.validate(run_config)
    spec = parse_grid(grid_text, dim)
    mean = parse_float_list(mean, 'mean')
    variances = parse_float_list(sigma2, 'sigma2')
    if len(mean) == 1:
        mean = mean * dim
    if len(variances) == 1:
        variances = variances * dim
    if wavefunction:
        data_service.save_grid(states.gaussian_wavefunction(spec, mean, variances, hbar), out_path)
    else:
        data_service.save_grid(states.gaussian_density(spec, mean, [variances]), out_path)


@bp.command('uniform')
@grid_options
@click.option('--box', required=True, help='lo:hi interval per axis, comma separated.')
@Middleware.command_timer('state uniform')
def uniform(grid_text, dim, out_path, box):
    run_config = RunConfig('state', {'dim': dim}, output_paths={'grid': out_path})
    RunConfigValidator.validate(run_config)
    spec = parse_grid(grid_text, dim)
    data_service.save_grid(states.uniform_density(spec, parse_box(box, dim)), out_path)


@bp.command('conjugate')
@click.option('--in', 'input_path', required=True, type=click.Path(dir_okay=False))
@click.option('--pad', type=int, default=4, show_default=True, help='Zero-padding factor before the transform.')
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False))
@Middleware.command_timer('state conjugate')
def conjugate(input_path, pad, out_path):
    """Fourier conjugate of a stored wavefunction."""
    target = load_target(input_path)
    if not isinstance(target, WaveFunction):
        raise ConfigError(f"{input_path} holds a density, conjugate needs a wavefunction")
    data_service.save_grid(grid.fourier_conjugate(grid.pad_wavefunction(target, pad)), out_path)
