import logging
import os
import sys
from datetime import datetime
from logging.handlers import RotatingFileHandler

from repscan.config import Config

LOGGER_NAME = 'repscan'


class ConsoleFilter(logging.Filter):
    """Drops records logged with extra={'console': False}; they still reach the log files."""

    def filter(self, record):
        return getattr(record, 'console', True)


class CustomLogger:
    @staticmethod
    def setup_logger(level=Config.LOG_LEVEL, log_file=None, stream=None):
        """Configure the package logger: stderr always, rotating files when log_file is given.

        The error file sits beside log_file as <stem>.error<ext>.
        """
        logger = logging.getLogger(LOGGER_NAME)
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
            handler.close()

        formatter = logging.Formatter(Config.LOG_FORMAT)

        console = logging.StreamHandler(stream or sys.stderr)
        console.setFormatter(formatter)
        console.setLevel(level)
        console.addFilter(ConsoleFilter())
        logger.addHandler(console)

        if log_file:
            log_dir = os.path.dirname(os.path.abspath(log_file))
            if not os.path.exists(log_dir):
                os.makedirs(log_dir)

            app_handler = RotatingFileHandler(
                log_file,
                maxBytes=Config.LOG_MAX_BYTES,
                backupCount=Config.LOG_BACKUP_COUNT
            )
            app_handler.setFormatter(formatter)
            app_handler.setLevel(level)

            stem, ext = os.path.splitext(log_file)
            error_handler = RotatingFileHandler(
                f"{stem}.error{ext or '.log'}",
                maxBytes=Config.LOG_MAX_BYTES,
                backupCount=Config.LOG_BACKUP_COUNT
            )
            error_handler.setFormatter(formatter)
            error_handler.setLevel(logging.ERROR)

            logger.addHandler(app_handler)
            logger.addHandler(error_handler)

        logger.setLevel(level)
        logger.propagate = False
        logger.debug(f'repscan startup at {datetime.now()}')
        return logger
