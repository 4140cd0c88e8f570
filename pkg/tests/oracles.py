"""Brute-force reference implementations, independent of the package.

Integer questions are answered by plain search: no continued fractions, no
unit group, no intervals.  Floating point only proposes candidates; every
candidate is confirmed with exact integer arithmetic.  Real-valued bound
formulas are recomputed directly in mpmath at high precision.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

CHUNK = 1 << 22


def minimal_unit_solution(D: int, limit: int = 2 * 10**9) -> tuple[int, int, int] | None:
    """Smallest y > 0 with x^2 - D y^2 = +-1, scanning y upward; returns (x, y, norm).

    x is the nearest integer to y sqrt D; a solution has |x - y sqrt D| < 1/y,
    so rounding in float64 cannot miss it.  x^2 - D y^2 is evaluated with
    uint64 wraparound, exact modulo 2^64, and |x^2 - D y^2| < 2^64 on the
    whole range, so the congruence test is an equality test.
    """
    root = math.sqrt(D)
    plus, minus = np.uint64(1), np.uint64((1 << 64) - 1)
    d = np.uint64(D)
    y = np.empty(CHUNK, dtype=np.uint64)
    fy = np.empty(CHUNK, dtype=np.float64)
    x = np.empty(CHUNK, dtype=np.uint64)
    t = np.empty(CHUNK, dtype=np.uint64)
    base = np.arange(CHUNK, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for start in range(1, limit + 1, CHUNK):
            np.add(base, np.uint64(start), out=y)
            np.multiply(y, root, out=fy)
            np.rint(fy, out=fy)
            x[:] = fy
            np.multiply(x, x, out=x)
            np.multiply(y, y, out=t)
            np.multiply(t, d, out=t)
            np.subtract(x, t, out=x)
            hit = np.flatnonzero((x == plus) | (x == minus))
            for k in hit:
                yi = int(y[k])
                xi = round(yi * root)
                for cand in (xi - 1, xi, xi + 1):
                    n = cand * cand - D * yi * yi
                    if n in (1, -1) and yi <= limit:
                        return cand, yi, n
    return None


def minimal_pell_solution(D: int, limit: int = 2 * 10**9) -> tuple[int, int] | None:
    """Smallest solution with y > 0 of x^2 - D y^2 = 1."""
    found = minimal_unit_solution(D, limit)
    if found is None:
        return None
    x, y, n = found
    if n == 1:
        return x, y
    # the square of the least norm -1 solution is the least norm +1 solution
    return x * x + D * y * y, 2 * x * y


def pell_solutions(D: int, N: int, y_cap: int) -> list[tuple[int, int]]:
    """All (x, y) with x >= 0, 0 <= y <= y_cap and x^2 - D y^2 = N, by y."""
    if abs(N) + D * y_cap * y_cap >= 1 << 52:
        raise ValueError("range too large for the float64 square-root filter")
    y = np.arange(0, y_cap + 1, dtype=np.int64)
    rhs = N + D * y * y
    keep = rhs >= 0
    y, rhs = y[keep], rhs[keep]
    x = np.rint(np.sqrt(rhs.astype(np.float64))).astype(np.int64)
    out = []
    for k in np.flatnonzero(x * x == rhs):
        xi, yi = int(x[k]), int(y[k])
        assert xi * xi - D * yi * yi == N
        out.append((xi, yi))
    return out


def system_solutions(a: int, b: int, u: int, v: int, y_cap: int) -> list[tuple[int, int, int]]:
    """Positive (x, y, z) with x^2 - a y^2 = u, z^2 - b y^2 = v, y <= y_cap.

    Naive scan over y; x and z are recovered with isqrt.
    """
    out = []
    for y in range(1, y_cap + 1):
        xs = a * y * y + u
        if xs <= 0:
            continue
        x = math.isqrt(xs)
        if x * x != xs:
            continue
        zs = b * y * y + v
        if zs <= 0:
            continue
        z = math.isqrt(zs)
        if z * z == zs:
            out.append((x, y, z))
    return out


def distance_to_nearest(q: int, a: int) -> float:
    """||q sqrt a|| in float64, for cross-checking exact decisions."""
    t = q * math.sqrt(a)
    return abs(t - round(t))


def _mp(r):
    return mpmath.mpf(r.numerator) / r.denominator


def linear_form_bound(n, D, logA, Bp, bits=1024):
    """2^(n+26) n^(3n+9) D^(n+2) log(3D) prod log A_j log B', in plain mpmath."""
    with mpmath.workprec(bits):
        v = mpmath.mpf(2) ** (n + 26) * mpmath.mpf(n) ** (3 * n + 9) * mpmath.mpf(D) ** (n + 2)
        v *= mpmath.log(3 * D) * mpmath.log(_mp(Bp))
        for la in logA:
            v *= _mp(la)
        return v


def height_bound(d, kappa, heights, hA, bits=1024):
    """(10 Q max{hA, Q}, C, Q) for Bombieri's bound, in plain mpmath."""
    with mpmath.workprec(bits):
        k = _mp(kappa)
        C = 4 * mpmath.mpf(10) ** 19 * d**4 * mpmath.log(3 * d) ** 7 / k * max(1, mpmath.log(d / k))
        Q = (2 * len(heights) * C) ** len(heights)
        for h in heights:
            Q *= _mp(h)
        return 10 * Q * max(_mp(hA), Q), C, Q
