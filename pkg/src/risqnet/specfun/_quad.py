"""Adaptive Gauss-Kronrod quadrature (G7-K15) with interval bisection.

Serves as the independent oracle for every closed-form probability in the
channel model, so it deliberately shares nothing with the Meijer-G fast
path.  Semi-infinite ranges are mapped to (0, 1) with t/(1-t); the worst
subinterval (by Kronrod-Gauss error gap) is split first via a heap.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

# 15-point Kronrod nodes/weights on [-1, 1] and the embedded 7-point Gauss
# weights (nodes 1, 3, 5, ... of the Kronrod set).
_XK = (
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
)
_WK = (
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
)
_WG = (
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
)


class NumericalFailure(RuntimeError):
    """Raised when an iteration budget runs out; carries the best estimate."""

    def __init__(self, message: str, estimate: float, bound: float):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={bound!r})")
        self.estimate = estimate
        self.bound = bound


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for adaptive integration.

    Defaults sit an order of magnitude inside the acceptance tolerances of
    everything that consumes them.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """(kronrod value, |kronrod - gauss|) of f over [a, b]."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    kron = _WK[7] * fc
    gauss = _WG[3] * fc
    for i in range(7):
        x = h * _XK[i]
        f1 = f(c - x)
        f2 = f(c + x)
        kron += _WK[i] * (f1 + f2)
        if i % 2 == 1:  # Kronrod nodes 1,3,5 carry the Gauss rule
            gauss += _WG[i // 2] * (f1 + f2)
    kron *= h
    gauss *= h
    return kron, abs(kron - gauss)


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    spec: QuadratureSpec | None = None,
) -> tuple[float, float]:
    """Integrate f over (lo, hi); hi may be +inf (lo likewise -inf).

    Returns (value, error_estimate).  Raises NumericalFailure when the
    subdivision budget is exhausted before the tolerance is met.  Endpoint
    singularities are tolerated as long as they are integrable: the Kronrod
    nodes never touch the interval ends.
    """
    if spec is None:
        spec = QuadratureSpec()
    if math.isinf(lo) and math.isinf(hi):
        v1, e1 = integrate(f, lo, 0.0, spec)
        v2, e2 = integrate(f, 0.0, hi, spec)
        return v1 + v2, e1 + e2
    if math.isinf(hi):
        base = lo

        def g(t: float) -> float:
            u = 1.0 - t
            return f(base + t / u) / (u * u)

        return _integrate_finite(g, 0.0, 1.0, spec)
    if math.isinf(lo):
        base = hi

        def g(t: float) -> float:
            u = 1.0 - t
            return f(base - t / u) / (u * u)

        return _integrate_finite(g, 0.0, 1.0, spec)
    return _integrate_finite(f, lo, hi, spec)


def _integrate_finite(f, lo: float, hi: float, spec: QuadratureSpec) -> tuple[float, float]:
    if hi < lo:
        v, e = _integrate_finite(f, hi, lo, spec)
        return -v, e
    if hi == lo:
        return 0.0, 0.0
    val, err = _gk15(f, lo, hi)
    # heap entries: (-err, counter, a, b, val, err); counter breaks ties
    counter = 0
    heap = [(-err, counter, lo, hi, val, err)]
    total_val = val
    total_err = err
    for _ in range(spec.max_subdivisions):
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total_val)):
            return total_val, total_err
        neg_err, _, a, b, v, e = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if m <= a or m >= b:  # interval at double-precision resolution
            heapq.heappush(heap, (0.0, counter, a, b, v, e))
            counter += 1
            continue
        v1, e1 = _gk15(f, a, m)
        v2, e2 = _gk15(f, m, b)
        total_val += v1 + v2 - v
        total_err += e1 + e2 - e
        counter += 1
        heapq.heappush(heap, (-e1, counter, a, m, v1, e1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, m, b, v2, e2))
    if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total_val)):
        return total_val, total_err
    raise NumericalFailure(
        "quadrature did not converge within max_subdivisions",
        total_val,
        total_err,
    )
