import logging
import time
from functools import wraps

logger = logging.getLogger(__name__)


class Middleware:
    @staticmethod
    def command_timer(name):
        def decorator(f):
            @wraps(f)
            def decorated_function(*args, **kwargs):
                start_time = time.perf_counter()
                try:
                    return f(*args, **kwargs)
                finally:
                    duration = time.perf_counter() - start_time
                    logger.info(f'Command {name} took {duration:.2f} seconds')
            return decorated_function
        return decorator
