import logging

import click

from repscan.config import Config
from repscan.errors import ConfigError
from repscan.models import RunConfig
from repscan.services import cumulants, entropy, infodist
from repscan.services.data_service import data_service
from repscan.utils.helpers import emit, load_density, parse_float_list
from repscan.utils.middleware import Middleware
from repscan.utils.validators import RunConfigValidator

logger = logging.getLogger(__name__)


def input_option(f):
    return click.option('--in', 'input_path', required=True, type=click.Path(dir_okay=False),
                        help='Input .grid.json file.')(f)


def json_option(f):
    return click.option('--json', 'json_path', default=None, type=click.Path(dir_okay=False),
                        help='Write the JSON result here instead of stdout.')(f)


def _workers():
    ctx = click.get_current_context(silent=True)
    if ctx is None or ctx.obj is None:
        return 1
    return ctx.obj.get('workers', 1)


@click.command('entropy')
@input_option
@click.option('--q', 'orders', default='0.5,1,2', show_default=True, help='Comma separated entropy orders.')
@click.option('--base', type=click.Choice(['nats', 'bits']), default='nats', show_default=True)
@json_option
@Middleware.command_timer('entropy')
def entropy_command(input_path, orders, base, json_path):
    """Renyi and Tsallis entropies and entropy powers at each order."""
    orders = parse_float_list(orders, 'q')
    RunConfigValidator.validate(RunConfig('entropy', {'q': orders}, input_path=input_path))
    d = load_density(input_path)
    rows = []
    for q in orders:
        rows.append({
            'order': q,
            'renyi': entropy.renyi_entropy(d, q, base).value,
            'tsallis': entropy.tsallis_entropy(d, q).value,
            'renyi_power': entropy.renyi_entropy_power(d, q),
            'tsallis_power': entropy.tsallis_entropy_power(d, q)
        })
    payload = {
        'input': input_path,
        'base': base,
        'shannon': entropy.shannon_entropy(d, base).value,
        'shannon_power': entropy.shannon_entropy_power(d),
        'entropies': rows
    }
    emit(data_service.write_json(payload, json_path), json_path)


@click.command('power-curve')
@input_option
@click.option('--delta', type=float, default=Config.DELTA, show_default=True)
@click.option('--m', type=int, default=6, show_default=True, help='Number of ladder orders 1, 1+delta, ...')
@click.option('--convention', type=click.Choice(list(entropy.CONVENTIONS)), default='nats_exp', show_default=True)
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default='json', show_default=True)
@click.option('--out', 'out_path', default=None, type=click.Path(dir_okay=False))
@Middleware.command_timer('power-curve')
def power_curve(input_path, delta, m, convention, fmt, out_path):
    """Entropy power ladder N_1, N_(1+delta), ..."""
    RunConfigValidator.validate(RunConfig('power-curve', {'delta': delta, 'm': m}, input_path=input_path, format=fmt))
    d = load_density(input_path)
    curve = entropy.entropy_power_curve(d, delta=delta, m=m, convention=convention, workers=_workers())
    if fmt == 'csv':
        emit(data_service.write_csv(curve.to_frame(), out_path), out_path)
        return
    payload = {
        'delta': delta,
        'dim': curve.dim,
        'convention': convention,
        'orders': curve.orders.tolist(),
        'powers': curve.powers.tolist(),
        'relative_spread': curve.relative_spread
    }
    emit(data_service.write_json(payload, out_path), out_path)


@click.command('cumulants')
@input_option
@click.option('--delta', type=float, default=Config.DELTA, show_default=True)
@click.option('--m', type=int, default=Config.CUMULANT_ORDER, show_default=True)
@click.option('--method', type=click.Choice(['gldf', 'direct']), default='gldf', show_default=True)
@json_option
@Middleware.command_timer('cumulants')
def cumulants_command(input_path, delta, m, method, json_path):
    """Cumulants of the information variable in bits^n."""
    RunConfigValidator.validate(RunConfig('cumulants', {'delta': delta, 'm': m}, input_path=input_path))
    d = load_density(input_path)
    if method == 'direct':
        kappa = cumulants.cumulants_direct(d, m)
    else:
        curve = entropy.entropy_power_curve(d, delta=delta, m=m, workers=_workers())
        kappa = cumulants.cumulants_from_powers(curve, m)
    payload = kappa.to_dict()
    payload['reference'] = [cumulants.gaussian_reference_cumulants(n, d.dim) for n in range(1, m + 1)]
    emit(data_service.write_json(payload, json_path), json_path)


@click.command('infodist')
@input_option
@click.option('--bins', type=int, default=Config.HIST_BINS, show_default=True)
@click.option('--window', default=None, help='lo:hi range in bits (default: full support).')
@click.option('--refine', type=int, default=Config.HIST_REFINE, show_default=True,
              help='Linear sub-cell refinement before binning.')
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default='csv', show_default=True)
@click.option('--out', 'out_path', default=None, type=click.Path(dir_okay=False))
@Middleware.command_timer('infodist')
def infodist_command(input_path, bins, window, refine, fmt, out_path):
    """Histogram of the information values -log2 F."""
    RunConfigValidator.validate(RunConfig('infodist', {'bins': bins}, input_path=input_path, format=fmt))
    if refine < 1:
        raise ConfigError(f"refine must be >= 1, got {refine}")
    if window is not None:
        window = tuple(parse_float_list(window.replace(':', ','), 'window'))
        if len(window) != 2 or window[1] <= window[0]:
            raise ConfigError(f"window must be lo:hi with hi > lo, got {window}")
    d = load_density(input_path)
    hist = infodist.info_pdf_histogram(d, bins, window=window, refine=refine, allow_pointmass=True)
    if fmt == 'csv':
        emit(data_service.write_csv(hist.to_frame(), out_path), out_path)
        return
    payload = {
        'support': list(hist.support),
        'total_mass': hist.total_mass,
        'varentropy': infodist.varentropy(d),
        'centers': hist.centers.tolist(),
        'density': hist.density.tolist()
    }
    emit(data_service.write_json(payload, out_path), out_path)


@click.command('check-moment')
@input_option
@click.option('--p', 'orders', default='0.5,2', show_default=True, help='Comma separated orders.')
@json_option
@Middleware.command_timer('check-moment')
def check_moment(input_path, orders, json_path):
    """Integral of F^p against the information-value sum."""
    orders = parse_float_list(orders, 'p')
    RunConfigValidator.validate(RunConfig('check-moment', {'p': orders}, input_path=input_path))
    d = load_density(input_path)
    reports = [infodist.moment_identity_check(d, p) for p in orders]
    payload = [r.to_dict() for r in reports]
    emit(data_service.write_json(payload, json_path), json_path)
    if not all(r.satisfied for r in reports):
        logger.warning('Moment identity failed for at least one order')
