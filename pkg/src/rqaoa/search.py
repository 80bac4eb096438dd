"""One-dimensional bracketed maximisation."""

from __future__ import annotations

import math
from collections.abc import Callable

_INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section_max(
    func: Callable[[float], float], lo: float, hi: float, tol: float
) -> tuple[float, float]:
    """Golden-section search for a maximum of ``func`` on ``[lo, hi]``.

    Returns the best ``(x, f(x))`` among every point evaluated, endpoints
    included, so a non-unimodal bracket never returns something worse than
    what was seen.
    """
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = func(c), func(d)
    best = max((func(a), a), (func(b), b), (fc, c), (fd, d))
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = func(c)
            best = max(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = func(d)
            best = max(best, (fd, d))
    return best[1], best[0]
