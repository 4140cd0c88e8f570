"""Outward-rounded real intervals on top of mpmath's raw interval kernels.

``IntervalReal`` is the only carrier of inexact reals in the package.  The
endpoints are binary floating point numbers; every operation rounds the lower
endpoint down and the upper endpoint up, and transcendental results get two
extra ulps of padding on each side.

Precision is explicit.  Producers evaluate at a given number of bits and the
``refine`` helper re-runs them with doubled precision until the consumer is
satisfied or the ceiling of the active :class:`PrecisionPolicy` is reached.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, TypeVar

import mpmath
from mpmath.libmp import (
    fzero,
    from_int,
    from_man_exp,
    from_rational,
    libmpi,
    mpf_add,
    mpf_cmp,
    mpf_sub,
    round_ceiling,
    round_floor,
)

from .errors import InvalidInput, PrecisionCeilingError

__all__ = [
    "IntervalReal",
    "PrecisionPolicy",
    "current_policy",
    "precision_policy",
    "refine",
    "imax",
    "imin",
    "E",
    "LOG_GOLDEN",
    "CEILING_ENV_VAR",
]

CEILING_ENV_VAR = "PELLAPPROX_PRECISION_CEILING"

T = TypeVar("T")


@dataclass(frozen=True)
class PrecisionPolicy:
    start: int = 128
    ceiling: int = 8192

    def __post_init__(self):
        if self.start < 16:
            raise InvalidInput(f"precision start must be at least 16 bits, got {self.start}")
        if self.start > self.ceiling:
            raise InvalidInput(
                f"precision start {self.start} exceeds ceiling {self.ceiling}"
            )


_policy: ContextVar[PrecisionPolicy | None] = ContextVar("pellapprox_policy", default=None)


def _env_policy() -> PrecisionPolicy:
    raw = os.environ.get(CEILING_ENV_VAR)
    if not raw:
        return PrecisionPolicy()
    try:
        ceiling = int(raw)
    except ValueError:
        raise InvalidInput(f"{CEILING_ENV_VAR} must be an integer, got {raw!r}") from None
    return PrecisionPolicy(start=min(128, ceiling), ceiling=ceiling)


def current_policy() -> PrecisionPolicy:
    policy = _policy.get()
    return policy if policy is not None else _env_policy()


@contextmanager
def precision_policy(start: int | None = None, ceiling: int | None = None) -> Iterator[PrecisionPolicy]:
    """Temporarily override the precision policy for the current context."""
    base = current_policy()
    policy = PrecisionPolicy(
        start=base.start if start is None else start,
        ceiling=base.ceiling if ceiling is None else ceiling,
    )
    token = _policy.set(policy)
    try:
        yield policy
    finally:
        _policy.reset(token)


def refine(
    evaluate: Callable[[int], T],
    accept: Callable[[T], bool],
    what: str = "value",
    start: int | None = None,
) -> T:
    """Evaluate at increasing precision until ``accept`` holds.

    Raises PrecisionCeilingError if the ceiling is reached first.
    """
    policy = current_policy()
    bits = policy.start if start is None else max(start, 16)
    while True:
        result = evaluate(bits)
        if accept(result):
            return result
        if bits >= policy.ceiling:
            raise PrecisionCeilingError(
                f"could not decide {what} at the precision ceiling of {policy.ceiling} bits"
            )
        bits = min(2 * bits, policy.ceiling)


def _pad(raw: tuple, prec: int) -> tuple:
    lo, hi = raw
    lo = mpf_sub(lo, _ulps(lo, prec), prec, round_floor)
    hi = mpf_add(hi, _ulps(hi, prec), prec, round_ceiling)
    return lo, hi


def _ulps(x: tuple, prec: int) -> tuple:
    if x == fzero:
        return fzero
    # 4 * 2^(exponent - prec) covers two ulps at the working precision
    _, man, exp, bc = x
    return from_man_exp(1, exp + bc - prec + 2)


def _coerce_raw(value, prec: int) -> tuple:
    if isinstance(value, IntervalReal):
        return value._raw
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return from_int(value, prec, round_floor), from_int(value, prec, round_ceiling)
    if isinstance(value, Fraction):
        p, q = value.numerator, value.denominator
        return from_rational(p, q, prec, round_floor), from_rational(p, q, prec, round_ceiling)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidInput(f"non-finite float {value!r}")
        raw = mpmath.mpf(value)._mpf_
        return raw, raw
    if isinstance(value, mpmath.mpf):
        return value._mpf_, value._mpf_
    raise TypeError(f"cannot convert {type(value).__name__} to IntervalReal")


class IntervalReal:
    """Closed interval ``[lo, hi]`` guaranteed to contain an exact real."""

    __slots__ = ("_raw", "bits")

    def __init__(self, lo, hi=None, bits: int = 128):
        if hi is None:
            hi = lo
        lo_raw = _coerce_raw(lo, bits)[0]
        hi_raw = _coerce_raw(hi, bits)[1]
        if mpf_cmp(lo_raw, hi_raw) > 0:
            raise InvalidInput("interval lower bound exceeds upper bound")
        self._raw = (lo_raw, hi_raw)
        self.bits = int(bits)

    @classmethod
    def _from_raw(cls, raw: tuple, bits: int) -> IntervalReal:
        obj = cls.__new__(cls)
        obj._raw = raw
        obj.bits = bits
        return obj

    @classmethod
    def exact(cls, value, bits: int = 128) -> IntervalReal:
        """Tightest interval around an int or Fraction at ``bits`` precision."""
        return cls._from_raw(_coerce_raw(value, bits), bits)

    @classmethod
    def sqrt_of_int(cls, n: int, bits: int = 128) -> IntervalReal:
        """Certified enclosure of sqrt(n) from an integer square root."""
        if n < 0:
            raise InvalidInput("square root of a negative integer")
        if n == 0:
            return cls._from_raw((fzero, fzero), bits)
        # scale so the integer root carries about ``bits`` significant bits
        k = max(0, bits - n.bit_length() // 2 + 2)
        scaled = n << (2 * k)
        r = math.isqrt(scaled)
        lo = from_man_exp(r, -k)
        hi = lo if r * r == scaled else from_man_exp(r + 1, -k)
        return cls._from_raw((lo, hi), bits)

    @classmethod
    def hull(cls, *items: IntervalReal) -> IntervalReal:
        lo = min((i._raw[0] for i in items), key=mpmath.mp.make_mpf)
        hi = max((i._raw[1] for i in items), key=mpmath.mp.make_mpf)
        return cls._from_raw((lo, hi), max(i.bits for i in items))

    # -- views ---------------------------------------------------------------
    @property
    def lo(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._raw[0])

    @property
    def hi(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._raw[1])

    @property
    def raw(self) -> tuple:
        return self._raw

    def width(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(mpf_sub(self._raw[1], self._raw[0], self.bits + 8, round_ceiling))

    def mid(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(libmpi.mpi_mid(self._raw, self.bits + 8))

    def relative_width(self) -> mpmath.mpf:
        """Width divided by the smallest absolute value in the interval (inf if it holds 0)."""
        if self.contains_zero():
            return mpmath.inf
        low = min(abs(self.lo), abs(self.hi))
        return self.width() / low

    def __float__(self) -> float:
        return float(self.mid())

    def __repr__(self) -> str:
        return f"IntervalReal([{mpmath.nstr(self.lo, 17)}, {mpmath.nstr(self.hi, 17)}], bits={self.bits})"

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalReal) and self._raw == other._raw and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self._raw, self.bits))

    # -- predicates ------------------------------------------------------------
    def contains(self, value) -> bool:
        lo, hi = _coerce_raw(value, self.bits + 64)
        return mpf_cmp(self._raw[0], lo) <= 0 and mpf_cmp(hi, self._raw[1]) <= 0

    def contains_zero(self) -> bool:
        return mpf_cmp(self._raw[0], fzero) <= 0 <= mpf_cmp(self._raw[1], fzero)

    def is_inside(self, other: IntervalReal) -> bool:
        return mpf_cmp(other._raw[0], self._raw[0]) <= 0 and mpf_cmp(self._raw[1], other._raw[1]) <= 0

    def overlaps(self, other: IntervalReal) -> bool:
        return mpf_cmp(self._raw[0], other._raw[1]) <= 0 and mpf_cmp(other._raw[0], self._raw[1]) <= 0

    def intersect(self, other: IntervalReal) -> IntervalReal:
        if not self.overlaps(other):
            raise InvalidInput("intervals are disjoint")
        lo = self._raw[0] if mpf_cmp(self._raw[0], other._raw[0]) >= 0 else other._raw[0]
        hi = self._raw[1] if mpf_cmp(self._raw[1], other._raw[1]) <= 0 else other._raw[1]
        return IntervalReal._from_raw((lo, hi), max(self.bits, other.bits))

    def compare(self, other) -> int | None:
        """-1 if certainly below ``other``, 1 if certainly above, None if they overlap."""
        o = _coerce_raw(other, self.bits + 64)
        if mpf_cmp(self._raw[1], o[0]) < 0:
            return -1
        if mpf_cmp(self._raw[0], o[1]) > 0:
            return 1
        return None

    def sign(self) -> int | None:
        return self.compare(0)

    def certainly_lt(self, other) -> bool:
        return self.compare(other) == -1

    def certainly_gt(self, other) -> bool:
        return self.compare(other) == 1

    def certainly_le(self, other) -> bool:
        o = _coerce_raw(other, self.bits + 64)
        return mpf_cmp(self._raw[1], o[0]) <= 0

    def certainly_ge(self, other) -> bool:
        o = _coerce_raw(other, self.bits + 64)
        return mpf_cmp(self._raw[0], o[1]) >= 0

    # -- arithmetic ----------------------------------------------------------
    def _binary(self, other, op, swap=False) -> IntervalReal:
        bits = self.bits
        if isinstance(other, IntervalReal):
            bits = max(bits, other.bits)
        o = _coerce_raw(other, bits)
        a, b = (o, self._raw) if swap else (self._raw, o)
        return IntervalReal._from_raw(op(a, b, bits), bits)

    def __add__(self, other):
        return self._binary(other, libmpi.mpi_add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, libmpi.mpi_sub)

    def __rsub__(self, other):
        return self._binary(other, libmpi.mpi_sub, swap=True)

    def __mul__(self, other):
        return self._binary(other, libmpi.mpi_mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        divisor = other if isinstance(other, IntervalReal) else IntervalReal.exact(other, self.bits)
        if divisor.contains_zero():
            raise ZeroDivisionError("interval division by an interval containing zero")
        return self._binary(divisor, libmpi.mpi_div)

    def __rtruediv__(self, other):
        if self.contains_zero():
            raise ZeroDivisionError("interval division by an interval containing zero")
        return self._binary(other, libmpi.mpi_div, swap=True)

    def __neg__(self):
        return IntervalReal._from_raw(libmpi.mpi_neg(self._raw), self.bits)

    def __abs__(self):
        return IntervalReal._from_raw(libmpi.mpi_abs(self._raw), self.bits)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("IntervalReal only supports integer powers; use exp/log")
        if n < 0:
            return 1 / (self ** (-n))
        return IntervalReal._from_raw(libmpi.mpi_pow_int(self._raw, n, self.bits), self.bits)

    def log(self) -> IntervalReal:
        if self.sign() != 1:
            raise InvalidInput("log of an interval that is not certainly positive")
        return IntervalReal._from_raw(_pad(libmpi.mpi_log(self._raw, self.bits), self.bits), self.bits)

    def exp(self) -> IntervalReal:
        return IntervalReal._from_raw(_pad(libmpi.mpi_exp(self._raw, self.bits), self.bits), self.bits)

    def sqrt(self) -> IntervalReal:
        if mpf_cmp(self._raw[0], fzero) < 0:
            raise InvalidInput("sqrt of an interval with a negative part")
        return IntervalReal._from_raw(libmpi.mpi_sqrt(self._raw, self.bits), self.bits)

    def with_bits(self, bits: int) -> IntervalReal:
        """Same enclosure relabelled with a working precision (endpoints untouched)."""
        return IntervalReal._from_raw(self._raw, bits)


def imax(*items) -> IntervalReal:
    """Interval enclosure of the maximum of the enclosed reals."""
    items = [i if isinstance(i, IntervalReal) else IntervalReal.exact(i) for i in items]
    lo = items[0]._raw[0]
    hi = items[0]._raw[1]
    for it in items[1:]:
        if mpf_cmp(it._raw[0], lo) > 0:
            lo = it._raw[0]
        if mpf_cmp(it._raw[1], hi) > 0:
            hi = it._raw[1]
    return IntervalReal._from_raw((lo, hi), max(i.bits for i in items))


def imin(*items) -> IntervalReal:
    return -imax(*(-(i if isinstance(i, IntervalReal) else IntervalReal.exact(i)) for i in items))


def E(bits: int = 128) -> IntervalReal:
    return IntervalReal.exact(1, bits).exp()


def LOG_GOLDEN(bits: int = 128) -> IntervalReal:
    """log((1 + sqrt 5) / 2)."""
    return ((1 + IntervalReal.sqrt_of_int(5, bits)) / 2).log()


def mpf_to_decimal(x: mpmath.mpf) -> str:
    """Exact decimal expansion of a binary float (lossless)."""
    sign, man, exp, _ = x._mpf_
    if not man:
        return "0"
    value = -man if sign else man
    if exp >= 0:
        return str(value << exp)
    digits = str(abs(value) * 5 ** (-exp)).rjust(-exp + 1, "0")
    whole, frac = digits[:exp], digits[exp:]
    frac = frac.rstrip("0")
    text = whole + ("." + frac if frac else "")
    return ("-" if value < 0 else "") + text


def decimal_to_mpf(text: str) -> mpmath.mpf:
    """Inverse of :func:`mpf_to_decimal` for its own output (exact)."""
    frac = Fraction(text)
    p, q = frac.numerator, frac.denominator
    # q is a power of 2 times a power of 5 that cancels; recover the dyadic form
    shift = q.bit_length() - 1
    if q != 1 << shift:
        raise InvalidInput(f"{text!r} is not a dyadic rational")
    return mpmath.mp.make_mpf(from_man_exp(p, -shift))


def to_json(iv: IntervalReal) -> dict:
    return {"lo": mpf_to_decimal(iv.lo), "hi": mpf_to_decimal(iv.hi), "bits": str(iv.bits)}


def from_json(obj: dict) -> IntervalReal:
    bits = int(obj["bits"])
    lo = decimal_to_mpf(obj["lo"])._mpf_
    hi = decimal_to_mpf(obj["hi"])._mpf_
    return IntervalReal._from_raw((lo, hi), bits)
