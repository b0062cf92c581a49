import logging

import click

from repscan.errors import ConfigError, InvalidParameter
from repscan.models import RunConfig, WaveFunction
from repscan.services import verification_service
from repscan.services.data_service import data_service
from repscan.services.verification_service import VerificationService
from repscan.utils.helpers import emit, load_density, load_target, parse_float_list
from repscan.utils.middleware import Middleware
from repscan.utils.validators import RunConfigValidator

logger = logging.getLogger(__name__)


@click.command('verify')
@click.option('--in', 'input_path', required=True, type=click.Path(dir_okay=False), help='Input .grid.json file.')
@click.option('--wavefunction', is_flag=True, help='Require a wavefunction input and run its conjugate suites.')
@click.option('--suite', type=click.Choice(('all',) + verification_service.SUITES), default='all', show_default=True)
@click.option('--q', 'orders', default='1,2', show_default=True, help='Comma separated orders.')
@click.option('--partner', 'partner_path', default=None, type=click.Path(dir_okay=False),
              help='Second density on the same grid spacing for an independent-pair EPI check.')
@click.option('--lambda', 'epi_lambda', type=float, default=0.5, show_default=True, help='EPI weight.')
@click.option('--repur-variant', 'repur_variants', multiple=True, default=('renyi',), show_default=True,
              type=click.Choice(tuple(verification_service.REPUR_VARIANTS)),
              help='Uncertainty relation forms to check; repeat for several.')
@click.option('--json', 'json_path', default=None, type=click.Path(dir_okay=False))
@click.pass_context
@Middleware.command_timer('verify')
def verify(ctx, input_path, wavefunction, suite, orders, partner_path, epi_lambda, repur_variants, json_path):
    """Run an inequality suite and report every check."""
    orders = parse_float_list(orders, 'q')
    RunConfigValidator.validate(RunConfig('verify', {'q': orders, 'lambda': epi_lambda}, input_path=input_path))
    target = load_target(input_path)
    if wavefunction and not isinstance(target, WaveFunction):
        raise ConfigError(f"{input_path} holds a density but --wavefunction was given")
    partner = load_density(partner_path) if partner_path else None

    workers = (ctx.obj or {}).get('workers', 1)
    service = VerificationService(workers=workers, epi_lambda=epi_lambda, repur_variants=repur_variants)
    try:
        checks = service.plan(target, suite, orders, partner)
    except InvalidParameter as e:
        raise ConfigError(e.message)
    if not checks:
        raise ConfigError(f"No check of suite '{suite}' applies to orders {orders}")
    reports = service.execute(checks)
    emit(data_service.write_json([r.to_dict() for r in reports], json_path), json_path)
