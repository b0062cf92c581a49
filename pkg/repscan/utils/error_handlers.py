import logging
import sys
import traceback

import click

from repscan.errors import ConfigError, RepscanError

logger = logging.getLogger(__name__)


class ErrorHandler:
    @staticmethod
    def exit_code(error):
        if isinstance(error, click.exceptions.Exit):
            return error.exit_code
        if isinstance(error, (click.UsageError, ConfigError)):
            return 2
        if isinstance(error, RepscanError):
            return error.exit_code
        if isinstance(error, click.ClickException):
            return error.exit_code
        return 1

    @staticmethod
    def message(error):
        if isinstance(error, RepscanError):
            return f"{error.name}: {error.message}"
        if isinstance(error, click.ClickException):
            return f"{type(error).__name__}: {error.format_message()}"
        return f"{type(error).__name__}: {error}"

    @staticmethod
    def handle(error, stream=None):
        """Log the error, write one diagnostic line to stderr and return the exit code."""
        code = ErrorHandler.exit_code(error)
        if isinstance(error, click.exceptions.Exit):
            return code
        line = ErrorHandler.message(error).replace('\n', ' ')
        if isinstance(error, (RepscanError, click.ClickException)):
            logger.error(line, extra={'console': False})
        else:
            logger.error(f"{line}\n{traceback.format_exc()}", extra={'console': False})
        print(line, file=stream or sys.stderr)
        return code
