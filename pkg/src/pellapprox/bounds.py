"""Explicit estimates: Weil heights, Feldman's B', linear forms in logarithms
and Bombieri's height bound.

All evaluators do plain interval arithmetic on their inputs.  The formulas
are monotone in every input, so the *upper* endpoint of a returned interval
is the certified value of the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import InvalidInput
from .intervals import E, IntervalReal, current_policy, imax
from .quadratic import QuadElement

__all__ = [
    "LinFormInstance",
    "BombieriInstance",
    "Thm22Result",
    "weil_height_quad",
    "log_a_value",
    "bprime_of",
    "thm21_constant",
    "thm21_lower_bound",
    "bombieri_C",
    "thm22_height_bound",
    "log_star",
]


def _iv(value, bits: int) -> IntervalReal:
    if isinstance(value, IntervalReal):
        return value
    return IntervalReal.exact(Fraction(value) if isinstance(value, str) else value, bits)


def log_star(x) -> IntervalReal:
    """max{1, log x}."""
    if not isinstance(x, IntervalReal):
        x = IntervalReal.exact(x, current_policy().start)
    if x.sign() != 1:
        raise InvalidInput("log* needs a positive argument")
    return imax(IntervalReal.exact(1, x.bits), x.log())


def weil_height_quad(e, denominator: int = 1, bits: int | None = None) -> IntervalReal:
    """Absolute logarithmic Weil height of e / denominator.

    ``e`` is a QuadElement, an int, or a Fraction.  The height is computed from
    the primitive integer minimal polynomial: the log of its leading
    coefficient plus the logs of the conjugates exceeding 1, over the degree.
    """
    if bits is None:
        bits = current_policy().start
    if denominator <= 0:
        raise InvalidInput("denominator must be positive")
    if isinstance(e, (int, Fraction)) and not isinstance(e, bool):
        r = Fraction(e) / denominator
        if r == 0:
            raise InvalidInput("height of zero is undefined")
        return IntervalReal.exact(max(abs(r.numerator), r.denominator), bits).log()
    if not isinstance(e, QuadElement):
        raise TypeError(f"unsupported value {e!r}")
    if e.y == 0:
        return weil_height_quad(e.x, denominator, bits)
    x, y, D = e.x, e.y, e.D
    # den^2 t^2 - 2 x den t + (x^2 - D y^2)
    coeffs = (denominator * denominator, -2 * x * denominator, x * x - D * y * y)
    lead = coeffs[0] // math.gcd(*coeffs)
    one = IntervalReal.exact(1, bits)
    total = IntervalReal.exact(lead, bits).log()
    for conjugate in (e, e.conj()):
        value = abs(conjugate.to_interval(bits)) / denominator
        total = total + imax(one, value).log()
    return total / 2


def log_a_value(height: IntervalReal, abs_log: IntervalReal, degree: int) -> IntervalReal:
    """Admissible log A_j: upper endpoint of max{h, (e/D)|log alpha|, 1/D}."""
    bits = max(height.bits, abs_log.bits)
    m = imax(height, E(bits) * abs_log / degree, IntervalReal.exact(Fraction(1, degree), bits))
    return IntervalReal(m.hi, m.hi, bits)


def bprime_of(b: Sequence[int], logA: Sequence, D: int, bits: int | None = None) -> IntervalReal:
    """Smallest admissible B' = max{3D, max_j (|b_n|/log A_j + |b_j|/log A_n)}."""
    if bits is None:
        bits = current_policy().start
    if len(b) != len(logA) or not b:
        raise InvalidInput("b and logA must be nonempty and of equal length")
    if b[-1] == 0:
        raise InvalidInput("b_n must be nonzero")
    logs = [_iv(v, bits) for v in logA]
    terms = [IntervalReal.exact(3 * D, bits)]
    last = logs[-1]
    for bj, lj in zip(b[:-1], logs[:-1]):
        terms.append(abs(b[-1]) / lj + abs(bj) / last)
    return imax(*terms)


@dataclass(frozen=True)
class LinFormInstance:
    """Data of a linear form b_1 log alpha_1 + ... + b_n log alpha_n.

    ``logA`` and ``Bprime`` are used through their upper endpoints.
    """

    n: int
    D: int
    logA: tuple[IntervalReal, ...]
    b: tuple[int, ...]
    Bprime: IntervalReal

    def __post_init__(self):
        if self.n < 1 or len(self.logA) != self.n or len(self.b) != self.n:
            raise InvalidInput("n, logA and b are inconsistent")
        if self.D < 1:
            raise InvalidInput("degree must be positive")
        if self.b[-1] == 0:
            raise InvalidInput("b_n must be nonzero")
        floor = Fraction(1, self.D)
        for j, la in enumerate(self.logA):
            if la.certainly_lt(floor):
                raise InvalidInput(f"log A_{j + 1} is below 1/D")
        bits = max(i.bits for i in self.logA)
        need = bprime_of(self.b, self.logA, self.D, bits)
        if self.Bprime.hi < need.hi:
            raise InvalidInput("B' is below max{3D, |b_n|/log A_j + |b_j|/log A_n}")

    @classmethod
    def build(cls, b: Sequence[int], logA: Sequence, D: int, bits: int | None = None) -> LinFormInstance:
        """Instance with the smallest admissible B'."""
        if bits is None:
            bits = current_policy().start
        logs = tuple(_iv(v, bits) for v in logA)
        return cls(len(logs), D, logs, tuple(b), bprime_of(b, logs, D, bits))


def thm21_constant(n: int, D: int) -> int:
    """The integer factor 2^(n+26) n^(3n+9) D^(n+2)."""
    return 2 ** (n + 26) * n ** (3 * n + 9) * D ** (n + 2)


def thm21_lower_bound(inst: LinFormInstance, bits: int | None = None) -> IntervalReal:
    """M such that log|Lambda| >= -M for a nonzero linear form.

    M = 2^(n+26) n^(3n+9) D^(n+2) log(3D) log A_1 ... log A_n log B'.
    """
    if bits is None:
        bits = max(current_policy().start, *(i.bits for i in inst.logA), inst.Bprime.bits)
    total = IntervalReal.exact(thm21_constant(inst.n, inst.D), bits)
    total = total * IntervalReal.exact(3 * inst.D, bits).log()
    for la in inst.logA:
        total = total * la.with_bits(bits)
    return total * inst.Bprime.with_bits(bits).log()


@dataclass(frozen=True)
class BombieriInstance:
    d: int
    kappa: Fraction
    t: int
    gen_heights: tuple[IntervalReal, ...]
    hA: IntervalReal

    def __post_init__(self):
        object.__setattr__(self, "kappa", Fraction(self.kappa))
        if not 0 < self.kappa <= 1:
            raise InvalidInput("kappa must lie in (0, 1]")
        if self.t < 1 or len(self.gen_heights) != self.t:
            raise InvalidInput("t must be positive and match the generator heights")
        if self.d < 1:
            raise InvalidInput("degree must be positive")
        for h in (*self.gen_heights, self.hA):
            if h.hi < 0:
                raise InvalidInput("heights are nonnegative")


class Thm22Result(NamedTuple):
    bound: IntervalReal
    C: IntervalReal
    Q: IntervalReal


def bombieri_C(d: int, kappa, bits: int) -> IntervalReal:
    """C = 4*10^19 d^4 (log 3d)^7 / kappa * log*(d / kappa)."""
    kappa = Fraction(kappa)
    log3d = IntervalReal.exact(3 * d, bits).log()
    base = IntervalReal.exact(4 * 10**19 * d**4, bits) * log3d**7
    return base / IntervalReal.exact(kappa, bits) * log_star(IntervalReal.exact(d / kappa, bits))


def thm22_height_bound(inst: BombieriInstance, bits: int | None = None) -> Thm22Result:
    """h(xi) <= 10 Q max{h(A), Q} with Q = (2tC)^t prod h(xi_i)."""
    if bits is None:
        bits = max(current_policy().start, *(h.bits for h in inst.gen_heights), inst.hA.bits)
    C = bombieri_C(inst.d, inst.kappa, bits)
    Q = (2 * inst.t * C) ** inst.t
    for h in inst.gen_heights:
        Q = Q * h.with_bits(bits)
    bound = 10 * Q * imax(inst.hA.with_bits(bits), Q)
    return Thm22Result(bound, C, Q)
