import time
import numpy as np
from mpmath import MPContext
from functools import wraps
from typing import Callable, Any, Iterable
from src.config.logger import logger


def catch_exceptions(function: Callable) -> Callable:
    """
    Logs the duration of a call, or the exception it raised before re-raising it.
    """

    @wraps(function)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        start_time = time.time()
        logger.debug(f"Executing {function.__qualname__}...")

        try:
            result = function(*args, **kwargs)
            duration = time.time() - start_time
            logger.debug(
                f"{function.__qualname__} ran successfully in {duration:.2f} sec"
            )
            return result

        except Exception as e:
            duration = time.time() - start_time
            logger.error(
                f"Unexpected error occured in {function.__qualname__} after {duration:.2f} sec : {type(e).__name__} - {e}"
            )
            raise

    return wrapper


def wrap_angle(angle: float) -> float:
    """
    Maps an angle to (-pi, pi].
    """
    wrapped = float(np.angle(np.exp(1j * angle)))
    return np.pi if wrapped == -np.pi else wrapped


def angle_distance(a: float, b: float) -> float:
    """
    Unsigned distance between two angles on the circle.
    """
    return abs(wrap_angle(a - b))


def circular_mean(angles: Iterable[float]) -> float:
    """
    Mean direction of a set of angles, in (-pi, pi].
    """
    values = np.asarray(list(angles), dtype=float)
    if values.size == 0:
        raise ValueError("circular mean of an empty set")
    return wrap_angle(float(np.angle(np.exp(1j * values).mean())))


def decimal_string(value: Any, digits: int) -> str:
    """
    Renders a real number (float or mpmath) with a fixed number of significant digits.
    """
    ctx = MPContext()
    ctx.dps = digits + 5
    return ctx.nstr(ctx.mpf(value), digits, strip_zeros=False)
