"""Slow, obviously-correct reference computations used by the tests.

Nothing here reuses the package's pyramid or vectorised code paths: cells are
visited one by one with Python loops, boxes are enumerated slab by slab, and
the Takagi series is summed in exact rational arithmetic.
"""
import itertools
import math
from fractions import Fraction

import numpy as np


def cell_blocks(values, n, m):
    """Yield the closed-cell sample blocks at scale m as flat Python lists."""
    w = 2 ** (n - m)
    cells = 2**m
    if values.ndim == 1:
        for a in range(cells):
            yield values[a * w:(a + 1) * w + 1].tolist()
    else:
        for a in range(cells):
            for b in range(cells):
                yield values[a * w:(a + 1) * w + 1, b * w:(b + 1) * w + 1].ravel().tolist()


def naive_range_sum(values, n, m):
    return math.fsum(max(blk) - min(blk) for blk in cell_blocks(values, n, m))


def naive_box_count(values, n, m):
    """Count mesh boxes [k d, (k+1) d) met by each cell's value interval.

    The interpolant is continuous on a closed cell, so it takes every value in
    [min, max]; a slab is met iff it overlaps that interval. Slabs are scanned
    over the global value range rather than computed with floor().
    """
    delta = Fraction(1, 2**m)
    lo_all = Fraction(float(values.min()))
    hi_all = Fraction(float(values.max()))
    k_lo = math.floor(lo_all / delta) - 1
    k_hi = math.floor(hi_all / delta) + 1
    total = 0
    for blk in cell_blocks(values, n, m):
        lo, hi = Fraction(min(blk)), Fraction(max(blk))
        for k in range(k_lo, k_hi + 1):
            if lo < (k + 1) * delta and hi >= k * delta:
                total += 1
    return total


def takagi_exact(i, n):
    x = Fraction(i, 2**n)
    total = Fraction(0)
    for k in range(n + 1):
        y = x * 2**k
        total += Fraction(1, 2**k) * min(y - math.floor(y), math.ceil(y) - y)
    return total


def all_pairs_lip(values, n, exponent):
    """Brute force over every unordered pair of grid points.

    The distance factor for offset (a, b) is ``(hypot(a, b) * 2**-n)**exponent``
    computed once per offset with scalar math, the same formula the package
    documents; the pair enumeration itself is independent.
    """
    side = values.shape[0]
    table = np.array([[(math.hypot(a, b) * 2.0**-n) ** exponent if (a or b) else 1.0
                       for b in range(side)] for a in range(side)])
    ii, jj = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    ii, jj, flat = ii.ravel(), jj.ravel(), values.ravel()
    best = 0.0
    for p in range(len(flat) - 1):
        q = slice(p + 1, None)
        dp = table[np.abs(ii[q] - ii[p]), np.abs(jj[q] - jj[p])]
        best = max(best, float((np.abs(flat[q] - flat[p]) / dp).max()))
    return best


def naive_horizon(values):
    return np.array([max(col) for col in values.tolist()])


def pairs(seq):
    return itertools.combinations(seq, 2)
