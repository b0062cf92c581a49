import sys

import click

from repscan import create_cli
from repscan.utils.custom_logger import CustomLogger
from repscan.utils.error_handlers import ErrorHandler


def run(argv=None, config_name=None):
    """Run the command line and return its exit code instead of exiting."""
    CustomLogger.setup_logger()
    cli = create_cli(config_name)
    try:
        result = cli.main(args=argv, prog_name='repscan', standalone_mode=False)
    except click.exceptions.Abort:
        print('Aborted!', file=sys.stderr)
        return 1
    except Exception as e:
        return ErrorHandler.handle(e)
    return result if isinstance(result, int) else 0


def main():
    sys.exit(run())
