"""Bessel functions of the first kind by ascending series, and the J0 inversion used to set AC drive strength."""

from functools import lru_cache
from math import isfinite

from .errors import InvalidArgumentError, NoSolutionError

SERIES_LIMIT = 12.0


def bessel_j(order, x):
    """J_order(x) for integer order >= 0 and |x| <= 12 via the ascending power series."""
    if order < 0 or int(order) != order:
        raise InvalidArgumentError(f"order must be a non-negative integer, got {order!r}")
    if not isfinite(x) or abs(x) > SERIES_LIMIT:
        raise InvalidArgumentError(f"series evaluation restricted to |x| <= {SERIES_LIMIT}, got {x!r}")
    half = x / 2.0
    term = 1.0
    for k in range(1, order + 1):
        term *= half / k
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + order))
        total += term
        if abs(term) <= 1e-16 * abs(total) or term == 0.0:
            return total


def j0(x):
    return bessel_j(0, x)


def j1(x):
    return bessel_j(1, x)


def _bisect(func, lo, hi, target=0.0, iterations=200):
    flo = func(lo) - target
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fmid = func(mid) - target
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def first_arch_end():
    """First positive zero of J1, where J0 reaches its first minimum."""
    return _bisect(j1, 3.0, 4.5)


@lru_cache(maxsize=None)
def first_zero_j0():
    return _bisect(j0, 2.0, 3.0)


def j0_arch_minimum():
    return j0(first_arch_end())


def solve_bessel_ratio(target):
    """Smallest x >= 0 with J0(x) == target, searched on J0's first monotone arch.

    The arch runs from x = 0 (J0 = 1) down to the first zero of J1
    (J0 ~ -0.4028); targets outside that range raise.
    """
    target = float(target)
    if target > 1.0:
        raise NoSolutionError(f"J0 never exceeds 1 (target {target!r})", bracket=(0.0, first_arch_end()))
    if target == 1.0:
        return 0.0
    end = first_arch_end()
    if target < j0(end):
        raise NoSolutionError(
            f"target {target!r} lies below the first-arch minimum {j0(end)!r} of J0",
            bracket=(0.0, end),
        )
    x = _bisect(j0, 0.0, end, target)
    residual = abs(j0(x) - target)
    if residual > 1e-12:
        raise NoSolutionError(f"bisection stalled with residual {residual!r}", bracket=(0.0, end))
    return x
