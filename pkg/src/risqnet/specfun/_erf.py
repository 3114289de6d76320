"""Error function to double precision.

Small arguments use the Maclaurin series (fast, no cancellation below
|x| = 2); larger arguments go through the continued fraction for erfc,
evaluated with the modified Lentz scheme, giving |error| well under the
1e-12 contract everywhere.
"""

from __future__ import annotations

import math

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def _erf_series(x: float) -> float:
    # erf(x) = 2/sqrt(pi) * sum_n (-1)^n x^(2n+1) / (n! (2n+1))
    x2 = x * x
    term = x
    acc = x
    n = 0
    while True:
        n += 1
        term *= -x2 / n
        delta = term / (2 * n + 1)
        acc += delta
        if abs(delta) < 1e-18 * abs(acc):
            return _TWO_OVER_SQRT_PI * acc
        if n > 200:  # unreachable for |x| <= 2
            return _TWO_OVER_SQRT_PI * acc


def _erfc_cf(x: float) -> float:
    """erfc(x) for x >= 2 via the Laplace continued fraction."""
    # erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...))))
    tiny = 1e-300
    f = x if x != 0.0 else tiny
    c = f
    d = 0.0
    k = 0
    while True:
        k += 1
        a_k = 0.5 * k
        d = x + a_k * d
        if d == 0.0:
            d = tiny
        c = x + a_k / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
        if k > 300:
            break
    return math.exp(-x * x) / math.sqrt(math.pi) / f


def erf(x: float) -> float:
    """erf(x); odd, monotone, |error| <= ~1e-15 absolute."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("erf requires a finite argument")
    if x < 0.0:
        return -erf(-x)
    if x <= 2.0:
        return _erf_series(x)
    if x >= 6.5:
        return 1.0  # erfc < 4e-20, below double resolution of 1 - eps
    return 1.0 - _erfc_cf(x)


def erfc(x: float) -> float:
    """erfc(x) = 1 - erf(x), accurate in the far tail as well."""
    x = float(x)
    if x < 2.0:
        return 1.0 - erf(x)
    if x > 26.5:
        return 0.0
    return _erfc_cf(x)
