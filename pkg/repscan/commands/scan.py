import logging
import os

import click
import pandas as pd

from repscan.config import Config
from repscan.models import CatStateParams, GridSpec, RunConfig
from repscan.services import reconstruct, states
from repscan.services.data_service import data_service
from repscan.utils.helpers import emit, load_density
from repscan.utils.middleware import Middleware
from repscan.utils.validators import RunConfigValidator

logger = logging.getLogger(__name__)

# Figure fixtures: balanced cat on the default grid, unbalanced cat on a grid that holds its far peak.
BCS = CatStateParams(nu=1.0, alpha=5.0)
UCS = CatStateParams(nu=0.97, alpha=10.0)
UCS_GRID = (-8.0, 24.0, 2048)


def _workers(ctx):
    return (ctx.obj or {}).get('workers', 1)


@click.command('scan')
@click.option('--in', 'input_path', required=True, type=click.Path(dir_okay=False), help='Input .grid.json file.')
@click.option('--delta', type=float, default=Config.DELTA, show_default=True)
@click.option('--m', type=int, default=Config.CUMULANT_ORDER, show_default=True)
@click.option('--method', type=click.Choice(reconstruct.METHODS), default='edgeworth', show_default=True)
@click.option('--order', type=int, default=None, help='Series order (default: all available terms).')
@click.option('--truncate/--no-truncate', default=Config.SERIES_TRUNCATE, show_default=True,
              help='Drop correction groups once they grow in binned L1 norm.')
@click.option('--out', 'out_path', default=None, type=click.Path(dir_okay=False), help='Reconstruction CSV.')
@click.option('--truth', 'truth_path', default=None, type=click.Path(dir_okay=False), help='Histogram CSV.')
@click.option('--report', 'report_path', default=None, type=click.Path(dir_okay=False), help='Scan report JSON.')
@click.pass_context
@Middleware.command_timer('scan')
def scan(ctx, input_path, delta, m, method, order, truncate, out_path, truth_path, report_path):
    """Information scan: entropy-power ladder, cumulants, series and its histogram ground truth."""
    RunConfigValidator.validate(RunConfig(
        'scan', {'delta': delta, 'm': m}, input_path=input_path,
        output_paths={'out': out_path, 'truth': truth_path, 'report': report_path}
    ))
    d = load_density(input_path)
    recon, truth, report = reconstruct.scan(d, delta, m, method, order, workers=_workers(ctx), truncate=truncate)
    if out_path:
        data_service.write_csv(recon.to_frame(), out_path)
    if truth_path:
        data_service.write_csv(truth.to_frame(), truth_path)
    emit(data_service.write_json(report, report_path), report_path)


def figure_frames(workers=1):
    """Plot-ready tables: the balanced cat density and the unbalanced cat scan."""
    spec = GridSpec.uniform(Config.GRID_MIN, Config.GRID_MAX, Config.GRID_COUNT)
    bcs = states.cat_quadrature_density(BCS, spec)
    density_table = pd.DataFrame({'x': spec.coordinates()[0], 'density': bcs.values})

    ucs = states.cat_quadrature_density(UCS, GridSpec.uniform(*UCS_GRID))
    recon, truth, report = reconstruct.scan(ucs, Config.DELTA, Config.CUMULANT_ORDER, 'edgeworth', workers=workers)
    width = truth.width
    scan_table = pd.DataFrame({
        'center_bits': truth.centers,
        'target': truth.density,
        'reconstruction': recon.bin_masses(Config.CELLS_PER_BIN) / width,
        'reference': reconstruct.reference_masses(recon.reference, truth.edges) / width
    })
    return density_table, scan_table, report


@click.command('figures')
@click.option('--outdir', default='.', show_default=True, type=click.Path(file_okay=False))
@click.pass_context
@Middleware.command_timer('figures')
def figures(ctx, outdir):
    """Write fig1_bcs_density.csv and fig2_ucs_scan.csv."""
    density_table, scan_table, report = figure_frames(_workers(ctx))
    data_service.write_csv(density_table, os.path.join(outdir, 'fig1_bcs_density.csv'))
    data_service.write_csv(scan_table, os.path.join(outdir, 'fig2_ucs_scan.csv'))
    logger.info(f"Figure scan L1={report['l1']:.4f} (reference only {report['l1_reference_only']:.4f})")
