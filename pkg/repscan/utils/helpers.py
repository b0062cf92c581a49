import click

from repscan.config import Config
from repscan.errors import InsufficientMemory, InvalidGrid
from repscan.models import GridSpec, WaveFunction
from repscan.services import grid
from repscan.services.data_service import data_service


def parse_float_list(text, name='value'):
    """'0.5,1,2' -> [0.5, 1.0, 2.0]."""
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(part) for part in str(text).split(',') if part.strip()]
    except ValueError:
        raise click.BadParameter(f"{name} must be a comma separated list of numbers, got '{text}'")


def parse_grid(text, dim=1):
    """'min:max:count' (or min,max,count) -> isotropic GridSpec; a bare count keeps the default extent."""
    if text is None:
        text = f"{Config.GRID_MIN}:{Config.GRID_MAX}:{Config.GRID_COUNT}"
    parts = str(text).replace(',', ':').split(':')
    try:
        if len(parts) == 1:
            lo, hi, count = Config.GRID_MIN, Config.GRID_MAX, int(parts[0])
        elif len(parts) == 3:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        else:
            raise ValueError(text)
    except ValueError:
        raise click.BadParameter(f"grid must look like min:max:count, got '{text}'")
    try:
        return GridSpec.uniform(lo, hi, count, dim)
    except InvalidGrid as e:
        raise click.BadParameter(e.message)


def parse_box(text, dim=1):
    """'lo:hi[,lo:hi...]' -> list of (lo, hi) pairs, one per axis."""
    try:
        box = [tuple(float(v) for v in part.split(':')) for part in str(text).split(',')]
    except ValueError:
        raise click.BadParameter(f"box must look like lo:hi per axis, got '{text}'")
    if len(box) == 1 and dim > 1:
        box = box * dim
    if len(box) != dim or any(len(b) != 2 for b in box):
        raise click.BadParameter(f"box needs {dim} lo:hi interval(s), got '{text}'")
    return box


def _check_memory(target):
    ctx = click.get_current_context(silent=True)
    if ctx is None or not ctx.obj or 'monitor' not in ctx.obj:
        return
    if not ctx.obj['monitor'].check_memory(target.spec.total_points):
        raise InsufficientMemory(f"Not enough free memory for a grid of {target.spec.total_points} points")


def load_target(path):
    """Grid file contents, density or wavefunction, after the memory check."""
    target = data_service.load_grid(path)
    _check_memory(target)
    return target


def load_density(path):
    """Grid file contents as a density; wavefunctions contribute |psi|^2."""
    target = load_target(path)
    if isinstance(target, WaveFunction):
        return grid.density_of(target)
    return target


def emit(text, path=None):
    """Echo text on stdout unless it was already written to path."""
    if path is None:
        click.echo(text, nl=False)
