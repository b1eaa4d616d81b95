"""Bracketed scalar root finding."""

from __future__ import annotations

import math
from typing import Callable

from .errors import RootNotBracketed


def newton_bisect(
    f: Callable[[float], float],
    df: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 1e-15,
    maxiter: int = 200,
) -> float:
    """Safeguarded Newton iteration on a sign-changing bracket ``[lo, hi]``.

    A Newton step is taken only if it lands strictly inside the current
    bracket and at least halves the residual; otherwise the bracket is bisected.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise RootNotBracketed(f"f({lo})={flo:.3g} and f({hi})={fhi:.3g} have the same sign")
    x = 0.5 * (lo + hi)
    fx = f(x)
    for _ in range(maxiter):
        if fx == 0:
            return x
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        if hi - lo <= xtol * max(1.0, abs(x)):
            return x
        d = df(x)
        if d != 0 and math.isfinite(d):
            xn = x - fx / d
            if lo < xn < hi:
                fn = f(xn)
                if abs(fn) <= 0.5 * abs(fx):
                    converged = abs(xn - x) <= xtol * max(1.0, abs(xn))
                    x, fx = xn, fn
                    if converged:
                        return x
                    continue
        x = 0.5 * (lo + hi)
        fx = f(x)
    return x


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-13, maxiter: int = 400) -> float:
    flo = f(lo)
    if (flo > 0) == (f(hi) > 0):
        raise RootNotBracketed(f"no sign change on [{lo}, {hi}]")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol:
            return mid
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
