"""Scalar 1-D searches shared by zero counting and extremum finding."""

import math

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_min(g, lo, hi, xtol=1e-12):
    """Golden-section minimiser of a unimodal ``g`` on ``[lo, hi]``."""
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    gc, gd = g(c), g(d)
    while hi - lo > xtol:
        if gc < gd:
            hi, d, gd = d, c, gc
            c = hi - _INVPHI * (hi - lo)
            gc = g(c)
        else:
            lo, c, gc = c, d, gd
            d = lo + _INVPHI * (hi - lo)
            gd = g(d)
    return 0.5 * (lo + hi)


def golden_max(g, lo, hi, xtol=1e-12):
    return golden_min(lambda x: -g(x), lo, hi, xtol)


def bisect_root(f, lo, hi, flo, xtol=1e-12):
    """Bisection on a sign change of ``f`` over ``[lo, hi]`` (``flo = f(lo)``)."""
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
