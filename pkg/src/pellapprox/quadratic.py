"""Exact arithmetic in Z[sqrt(D)], continued fractions of sqrt(D), and units.

Every decision (sign, ordering, norm) is made with integers only.  Real
values are produced on demand as :class:`~pellapprox.intervals.IntervalReal`
enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache, total_ordering

from .errors import IncompatibleFields, InvalidInput, InvalidRadicand, InvariantViolation
from .intervals import IntervalReal, current_policy, refine

__all__ = [
    "QuadElement",
    "CFExpansion",
    "Unit",
    "is_square",
    "squarefree_core",
    "check_radicand",
    "make_element",
    "mul",
    "conj",
    "norm_of",
    "compare",
    "to_interval",
    "sqrt_cf",
    "fundamental_unit",
    "totally_positive_unit",
    "regulator_check",
    "regulator_report",
    "regulator_upper_bound",
]


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def squarefree_core(n: int) -> int:
    """Largest squarefree divisor d of n with n / d a perfect square."""
    if n < 1:
        raise InvalidInput("squarefree core needs a positive integer")
    core, p = 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
        if n % p == 0:
            core *= p
            n //= p
        p += 1 if p == 2 else 2
    return core * n


@lru_cache(maxsize=4096)
def check_radicand(D: int) -> int:
    if not isinstance(D, int) or isinstance(D, bool):
        raise InvalidRadicand(f"radicand must be an integer, got {D!r}")
    if D < 2:
        raise InvalidRadicand(f"radicand must be at least 2, got {D}")
    if is_square(D):
        raise InvalidRadicand(f"radicand {D} is a perfect square")
    return D


def _sign(x: int, y: int, D: int) -> int:
    """Sign of x + y*sqrt(D) by integer casework."""
    if y == 0:
        return (x > 0) - (x < 0)
    if x == 0:
        return (y > 0) - (y < 0)
    if x > 0 and y > 0:
        return 1
    if x < 0 and y < 0:
        return -1
    # mixed signs: the larger square wins; equality is impossible for nonsquare D
    if x * x > D * y * y:
        return 1 if x > 0 else -1
    return 1 if y > 0 else -1


@total_ordering
@dataclass(frozen=True)
class QuadElement:
    """Exact element x + y*sqrt(D) of the order Z[sqrt(D)]."""

    x: int
    y: int
    D: int

    def __post_init__(self):
        check_radicand(self.D)
        if not isinstance(self.x, int) or not isinstance(self.y, int):
            raise InvalidInput("coordinates must be integers")

    # -- construction helpers --------------------------------------------------
    def _same(self, other) -> QuadElement:
        if isinstance(other, QuadElement):
            if other.D != self.D:
                raise IncompatibleFields(f"radicands differ: {self.D} vs {other.D}")
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return QuadElement(other, 0, self.D)
        return NotImplemented

    def _new(self, x: int, y: int) -> QuadElement:
        obj = object.__new__(QuadElement)
        object.__setattr__(obj, "x", x)
        object.__setattr__(obj, "y", y)
        object.__setattr__(obj, "D", self.D)
        return obj

    # -- ring operations -------------------------------------------------------
    def __add__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return o
        return self._new(self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return o
        return self._new(self.x - o.x, self.y - o.y)

    def __rsub__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return self._new(-self.x, -self.y)

    def __mul__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return o
        D = self.D
        return self._new(self.x * o.x + D * self.y * o.y, self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise InvalidInput("negative powers are only defined for units; use unit_inverse")
        result = self._new(1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> QuadElement:
        return self._new(self.x, -self.y)

    def norm(self) -> int:
        return self.x * self.x - self.D * self.y * self.y

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def unit_inverse(self) -> QuadElement:
        n = self.norm()
        if abs(n) != 1:
            raise InvalidInput(f"{self} is not a unit (norm {n})")
        c = self.conj()
        return c if n == 1 else -c

    def sign(self) -> int:
        return _sign(self.x, self.y, self.D)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def compare(self, other) -> int:
        o = self._same(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare QuadElement with {type(other).__name__}")
        return _sign(self.x - o.x, self.y - o.y, self.D)

    def __lt__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return o
        return self.compare(o) < 0

    def __eq__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return self.y == 0 and self.x == other
        if not isinstance(other, QuadElement):
            return NotImplemented
        return (self.x, self.y, self.D) == (other.x, other.y, other.D)

    def __hash__(self):
        return hash((self.x, self.y, self.D))

    # -- real views ------------------------------------------------------------
    def to_interval(self, bits: int | None = None) -> IntervalReal:
        """Enclosure of the real value with relative width about 2^-bits."""
        if bits is None:
            bits = current_policy().start
        x, y, D = self.x, self.y, self.D
        if y == 0:
            return IntervalReal.exact(x, bits)
        root = IntervalReal.sqrt_of_int(y * y * D, bits + 4)  # |y| sqrt(D)
        magnitude = root + abs(x)
        if x == 0:
            return (root if y > 0 else -root).with_bits(bits)
        if (x > 0) == (y > 0):
            return (magnitude if x > 0 else -magnitude).with_bits(bits)
        # opposite signs: avoid cancellation by dividing the norm by the conjugate
        conj_value = magnitude if x > 0 else -magnitude
        return (IntervalReal.exact(self.norm(), bits + 4) / conj_value).with_bits(bits)

    def __float__(self):
        return float(self.to_interval(64))

    def __str__(self) -> str:
        if self.y == 0:
            return str(self.x)
        root = f"√{self.D}"
        coeff = "" if abs(self.y) == 1 else str(abs(self.y))
        if self.x == 0:
            return f"{'-' if self.y < 0 else ''}{coeff}{root}"
        return f"{self.x}{'-' if self.y < 0 else '+'}{coeff}{root}"

    def to_json(self) -> dict:
        return {"x": str(self.x), "y": str(self.y), "D": str(self.D)}

    @classmethod
    def from_json(cls, obj: dict) -> QuadElement:
        return cls(int(obj["x"]), int(obj["y"]), int(obj["D"]))


def make_element(x: int, y: int, D: int) -> QuadElement:
    return QuadElement(x, y, D)


def mul(e1: QuadElement, e2: QuadElement) -> QuadElement:
    return e1 * e2


def conj(e: QuadElement) -> QuadElement:
    return e.conj()


def norm_of(e: QuadElement) -> int:
    return e.norm()


def compare(e1: QuadElement, e2: QuadElement) -> int:
    """-1, 0 or 1 as e1 is below, equal to, or above e2."""
    return e1.compare(e2)


def to_interval(e: QuadElement, bits: int) -> IntervalReal:
    return e.to_interval(bits)


@dataclass(frozen=True)
class CFExpansion:
    a0: int
    period: tuple[int, ...]
    D: int

    def __post_init__(self):
        if not self.period:
            raise InvariantViolation("continued fraction period is empty")
        if self.period[-1] != 2 * self.a0:
            raise InvariantViolation("last partial quotient of a sqrt(D) period must be 2*a0")

    def partial_quotients(self, count: int) -> list[int]:
        """The first ``count`` partial quotients a0, a1, ..."""
        out = [self.a0]
        while len(out) < count:
            out.extend(self.period)
        return out[:count]


@lru_cache(maxsize=1024)
def sqrt_cf(D: int) -> CFExpansion:
    """Minimal-period continued fraction of sqrt(D) via the (P, Q) recurrence."""
    check_radicand(D)
    a0 = math.isqrt(D)
    P, Q, a = 0, 1, a0
    period = []
    while True:
        P = a * Q - P
        Q = (D - P * P) // Q
        a = (a0 + P) // Q
        period.append(a)
        # Q returns to 1 exactly at the end of the first period
        if Q == 1:
            break
    return CFExpansion(a0, tuple(period), D)


@dataclass(frozen=True)
class Unit:
    element: QuadElement
    norm: int
    regulator: IntervalReal = field(compare=False)
    totally_positive: bool = False

    def __post_init__(self):
        e = self.element
        if abs(e.norm()) != 1 or e.norm() != self.norm:
            raise InvariantViolation(f"{e} does not have norm {self.norm}")
        if e.compare(1) <= 0:
            raise InvariantViolation(f"unit {e} is not greater than 1")
        if self.totally_positive:
            if self.norm != 1 or e.conj().sign() <= 0:
                raise InvariantViolation(f"{e} is not totally positive")
            if not _at_least_golden(e):
                raise InvariantViolation(f"{e} is below (1+sqrt 5)/2")

    @property
    def D(self) -> int:
        return self.element.D

    def inverse(self) -> QuadElement:
        return self.element.unit_inverse()

    def log(self, bits: int | None = None) -> IntervalReal:
        if bits is None or bits <= self.regulator.bits:
            return self.regulator
        return self.element.to_interval(bits).log()


def _at_least_golden(e: QuadElement) -> bool:
    """Exact test of e >= (1 + sqrt 5)/2 for e in a field other than Q(sqrt 5)-rationals."""
    # e >= (1+sqrt5)/2  <=>  s = 2e - 1 >= sqrt 5  <=>  s >= 0 and s^2 >= 5
    s = 2 * e - 1
    if s.sign() < 0:
        return False
    return (s * s).compare(5) >= 0


def _log_interval(e: QuadElement) -> IntervalReal:
    return e.to_interval(current_policy().start).log()


@lru_cache(maxsize=1024)
def _fundamental_pair(D: int) -> tuple[int, int, int]:
    cf = sqrt_cf(D)
    p_prev, p = 1, cf.a0
    q_prev, q = 0, 1
    for a in cf.period[:-1]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    norm = p * p - D * q * q
    if abs(norm) != 1:
        raise InvariantViolation(f"period convergent for D={D} has norm {norm}")
    return p, q, norm


def fundamental_unit(D: int) -> Unit:
    """Smallest unit > 1 of Z[sqrt(D)], from the convergent closing one CF period."""
    check_radicand(D)
    x, y, norm = _fundamental_pair(D)
    e = QuadElement(x, y, D)
    return Unit(e, norm, _log_interval(e), totally_positive=(norm == 1))


def totally_positive_unit(D: int) -> Unit:
    """Generator > 1 of the totally positive units of Z[sqrt(D)]."""
    u = fundamental_unit(D)
    if u.norm == 1:
        return Unit(u.element, 1, u.regulator, totally_positive=True)
    e = u.element * u.element
    return Unit(e, 1, _log_interval(e), totally_positive=True)


def regulator_upper_bound(D: int, bits: int) -> IntervalReal:
    """sqrt(D) * (1 + log sqrt(D)) as an interval."""
    root = IntervalReal.sqrt_of_int(D, bits)
    return root * (1 + root.log())


def regulator_check(D: int) -> IntervalReal:
    """Regulator of Q(sqrt D), certified below sqrt(D)(1 + log sqrt(D)).

    Only squarefree D = 2, 3 mod 4 is accepted: there Z[sqrt(D)] is the full
    ring of integers, so the unit computed here is the field's fundamental unit.
    """
    check_radicand(D)
    if squarefree_core(D) != D:
        raise InvalidInput(f"D={D} is not squarefree")
    if D % 4 == 1:
        raise InvalidInput(f"D={D} = 1 mod 4: Z[sqrt D] is not the maximal order")
    unit = fundamental_unit(D)

    def evaluate(bits):
        return unit.element.to_interval(bits).log(), regulator_upper_bound(D, bits)

    def decided(pair):
        return pair[0].compare(pair[1]) is not None

    reg, bound = refine(evaluate, decided, what=f"regulator bound for D={D}")
    if not reg.certainly_lt(bound):
        raise InvariantViolation(f"regulator of Q(sqrt {D}) violates R < sqrt(D)(1 + log sqrt(D))")
    return reg


def regulator_report(D: int) -> dict:
    """Both regulator proxies for a possibly non-squarefree D.

    ``order`` is log of the fundamental unit of Z[sqrt(D)]; ``core`` is the
    same quantity for Z[sqrt(d)] with d the squarefree core of D (None when
    D is already squarefree).
    """
    check_radicand(D)
    d = squarefree_core(D)
    out = {"D": D, "order": fundamental_unit(D).regulator, "core_radicand": d, "core": None}
    if d != D:
        out["core"] = fundamental_unit(d).regulator
    return out
