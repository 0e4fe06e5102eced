import time
from functools import wraps

from .. import rds_logging as logging

logger = logging.getLogger(__name__)


def timed(func):
    """Log the wall time of each call at DEBUG."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        elapsed_time = time.perf_counter() - start_time
        logger.debug(f"{func.__qualname__} took {elapsed_time:.6f} seconds")
        return result
    return wrapper
