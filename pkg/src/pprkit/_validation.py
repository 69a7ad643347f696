"""Small argument checkers and rounding helpers."""

import math
import numbers

from .errors import PreconditionError

# Slack used when a float sits a hair away from an integer after
# arithmetic such as 2 / 0.05 or 0.8 / 6.4e-5.
_ROUND_EPS = 1e-9


def check_open_unit(name, value, *, upper=1.0, closed_upper=False):
    """Return ``value`` as float after checking ``0 < value < upper``."""
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise PreconditionError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    ok_upper = value <= upper if closed_upper else value < upper
    if not (value > 0.0 and ok_upper):
        bracket = "]" if closed_upper else ")"
        raise PreconditionError(f"{name} must lie in (0, {upper:g}{bracket}, got {value!r}")
    return value


def check_count(name, value, *, minimum=0):
    if not isinstance(value, numbers.Integral) or isinstance(value, bool):
        raise PreconditionError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise PreconditionError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_positive(name, value):
    if not isinstance(value, numbers.Real) or isinstance(value, bool) or not value > 0:
        raise PreconditionError(f"{name} must be a positive real, got {value!r}")
    return float(value)


def safe_ceil(x):
    """Ceiling that ignores float noise just above an integer."""
    return int(math.ceil(x - _ROUND_EPS * max(1.0, abs(x))))


def safe_floor(x):
    """Floor that ignores float noise just below an integer."""
    return int(math.floor(x + _ROUND_EPS * max(1.0, abs(x))))


def ceil_log(base, x):
    """Smallest integer L with ``base**L <= x`` for ``0 < base < 1``."""
    if x >= 1.0:
        return 0
    return max(0, safe_ceil(math.log(x) / math.log(base)))
