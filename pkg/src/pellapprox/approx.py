"""Simultaneous approximation to (sqrt a, sqrt b) with a common denominator.

Distances to the nearest integer are exact quadratic numbers
``+-(q sqrt a - f)``, so comparisons are decided by interval refinement that
can never stall (1, sqrt a, sqrt b are linearly independent over Q).
"""

from __future__ import annotations

import csv
import heapq
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import InvalidInput, InvariantViolation, PrecisionCeilingError
from .intervals import IntervalReal, current_policy, imax, refine
from .quadratic import QuadElement, check_radicand, squarefree_core, totally_positive_unit
from .system import Route, check_pair, exponent_record

__all__ = [
    "Distance",
    "ApproxRecord",
    "ExponentReport",
    "VerifyReport",
    "dist_nearest",
    "verify_inequality",
    "best_records",
    "exponent_report",
    "records_to_csv",
    "SQRT_FORM_FACTOR",
]

CSV_COLUMNS = ("q", "dist_a", "dist_b", "max_dist", "local_exponent")


@dataclass(frozen=True)
class Distance:
    """||q sqrt a|| = |q sqrt a - nearest|, held exactly as a QuadElement."""

    q: int
    a: int
    floor_root: int  # isqrt(a q^2)
    nearest: int

    @property
    def value(self) -> QuadElement:
        e = QuadElement(-self.nearest, self.q, self.a)
        return e if self.nearest == self.floor_root else -e

    @property
    def side(self) -> str:
        return "below" if self.nearest == self.floor_root else "above"

    def interval(self, bits: int | None = None) -> IntervalReal:
        return self.value.to_interval(bits or current_policy().start)

    def certificate_holds(self) -> bool:
        f, n = self.floor_root, self.a * self.q * self.q
        return f * f <= n < (f + 1) * (f + 1)

    def compare_rational(self, r) -> int:
        """Exact sign of distance - r for a rational r."""
        r = Fraction(r)
        # distance - r = (value) - p/s  ->  s*value - p
        e = self.value * r.denominator - r.numerator
        return e.sign()


def dist_nearest(q: int, a: int) -> Distance:
    if q < 1:
        raise InvalidInput("q must be a positive integer")
    check_radicand(a)
    n = a * q * q
    f = math.isqrt(n)
    # q sqrt a is nearer to f iff q sqrt a < f + 1/2  iff  4 a q^2 < (2f + 1)^2
    nearest = f if 4 * n < (2 * f + 1) ** 2 else f + 1
    return Distance(q, a, f, nearest)


def _max_interval(da: Distance, db: Distance, bits: int) -> IntervalReal:
    return imax(da.interval(bits), db.interval(bits))


@dataclass(frozen=True)
class ApproxRecord:
    q: int
    dist_a: Distance
    dist_b: Distance
    local_exponent: IntervalReal | None  # -log(max dist) / log q, None at q = 1

    def max_dist(self, bits: int | None = None) -> IntervalReal:
        return _max_interval(self.dist_a, self.dist_b, bits or current_policy().start)


def _local_exponent(q: int, m: IntervalReal) -> IntervalReal | None:
    if q == 1:
        return None
    return -m.log() / IntervalReal.exact(q, m.bits).log()


def _threshold(c: Fraction, mu: Fraction, q: int, bits: int) -> IntervalReal:
    """c * q^(1 - mu)."""
    if q == 1:
        return IntervalReal.exact(c, bits)
    power = (IntervalReal.exact(q, bits).log() * IntervalReal.exact(1 - mu, bits)).exp()
    return IntervalReal.exact(c, bits) * power


@dataclass
class VerifyReport:
    a: int
    b: int
    c: Fraction
    mu: Fraction
    q_max: int
    violations: list[int] = field(default_factory=list)
    undecided: list[int] = field(default_factory=list)
    worst: list[tuple[int, IntervalReal]] = field(default_factory=list)
    observed_constant: IntervalReal | None = None

    @property
    def passed(self) -> bool:
        return not self.violations and not self.undecided

    @property
    def witness(self) -> int | None:
        return self.violations[0] if self.violations else None


def verify_inequality(a: int, b: int, c, mu, q_max: int, keep: int = 5) -> VerifyReport:
    """Check max{||q sqrt a||, ||q sqrt b||} > c / q^(mu - 1) for 1 <= q <= q_max.

    ``worst`` lists the ``keep`` values of q with the smallest ratio of the
    left side to the threshold; ``observed_constant`` is the smallest
    max-distance * q^(mu - 1) seen, the empirical constant for exponent mu.
    """
    check_pair(a, b)
    c, mu = Fraction(c), Fraction(mu)
    if c <= 0:
        raise InvalidInput("c must be positive")
    if mu <= 1:
        raise InvalidInput("mu must exceed 1")
    if q_max < 1:
        raise InvalidInput("q_max must be at least 1")
    report = VerifyReport(a, b, c, mu, q_max)
    start = current_policy().start
    heap: list[tuple[float, int, IntervalReal]] = []
    for q in range(1, q_max + 1):
        da, db = dist_nearest(q, a), dist_nearest(q, b)

        def evaluate(bits):
            m = _max_interval(da, db, bits)
            return m, _threshold(c, mu, q, bits)

        def decided(pair):
            return pair[0].compare(pair[1]) is not None

        try:
            m, thr = refine(evaluate, decided, what=f"inequality at q={q}", start=start)
        except PrecisionCeilingError:
            report.undecided.append(q)
            continue
        if m.compare(thr) < 0:
            report.violations.append(q)
        ratio = m / thr
        key = -float(ratio.mid())
        if len(heap) < keep:
            heapq.heappush(heap, (key, -q, ratio))
        elif key > heap[0][0]:
            heapq.heapreplace(heap, (key, -q, ratio))
    worst = sorted(((-k, -nq, r) for k, nq, r in heap), key=lambda t: (t[0], t[1]))
    report.worst = [(q, r) for _, q, r in worst]
    if report.worst:
        report.observed_constant = report.worst[0][1] * IntervalReal.exact(c, start)
    return report


def best_records(a: int, b: int, q_max: int) -> list[ApproxRecord]:
    """Every q <= q_max whose max-distance is strictly below all earlier ones."""
    check_pair(a, b)
    if q_max < 1:
        raise InvalidInput("q_max must be at least 1")
    start = current_policy().start
    records: list[ApproxRecord] = []
    best: tuple[Distance, Distance] | None = None
    for q in range(1, q_max + 1):
        da, db = dist_nearest(q, a), dist_nearest(q, b)
        if best is not None:
            prev = best

            def evaluate(bits):
                return _max_interval(da, db, bits).compare(_max_interval(*prev, bits))

            # max distances at different q are never equal
            if refine(evaluate, lambda c: c is not None, what=f"record at q={q}", start=start) > 0:
                continue
        best = (da, db)
        m = _max_interval(da, db, start)
        records.append(ApproxRecord(q, da, db, _local_exponent(q, m)))
    return records


def records_to_csv(records: list[ApproxRecord], digits: int = 20) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        bits = current_policy().start
        writer.writerow([
            r.q,
            mpmath.nstr(r.dist_a.interval(bits).mid(), digits),
            mpmath.nstr(r.dist_b.interval(bits).mid(), digits),
            mpmath.nstr(r.max_dist(bits).mid(), digits),
            "" if r.local_exponent is None else mpmath.nstr(r.local_exponent.mid(), digits),
        ])
    return buf.getvalue()


# lambda <= 6 R_K < 6 sqrt(D)(1 + log sqrt D) for squarefree D, and
# 1 + log sqrt D <= (1/log 2 + 1/2) log D for D >= 2
def SQRT_FORM_FACTOR(bits: int) -> IntervalReal:
    per_field = 1 / IntervalReal.exact(2, bits).log() + IntervalReal.exact(Fraction(1, 2), bits)
    return 36 * per_field**2


@dataclass(frozen=True)
class ExponentReport:
    a: int
    b: int
    route: str
    tau: IntervalReal
    mu_eff_upper: IntervalReal
    regulator_product: IntervalReal
    constant: IntervalReal  # tau = 1 / (constant * product [* log* factor])
    log_star_factor: IntervalReal | None
    sqrt_form_denominator: IntervalReal | None
    record: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        if not self.tau.certainly_gt(0):
            raise InvariantViolation("tau must be positive")
        if not self.mu_eff_upper.certainly_lt(2):
            raise InvariantViolation("effective exponent bound must be below 2")

    @property
    def denominator(self) -> IntervalReal:
        d = self.constant * self.regulator_product
        return d * self.log_star_factor if self.log_star_factor is not None else d


def exponent_report(a: int, b: int, route: Route = "thm22", bits: int | None = None) -> ExponentReport:
    """Effective exponent 2 - tau for the pair (sqrt a, sqrt b).

    From X <= C U^E for the associated Pellian systems, any approximation with
    denominator y satisfies max{|sqrt a - x/y|, |sqrt b - z/y|} >> y^-(2 - 1/E),
    i.e. max{||y sqrt a||, ||y sqrt b||} >> y^-(1 - 1/E); tau = 1/E.
    """
    check_pair(a, b)
    if bits is None:
        bits = current_policy().start
    rec = exponent_record(a, b, route, bits)
    lam1 = totally_positive_unit(a).log(bits)
    lam2 = totally_positive_unit(b).log(bits)
    product = lam1 * lam2
    exponent = rec["exponent"]
    lstar = rec["factors"].get("log_star_max")
    denom_pieces = product * lstar if lstar is not None else product
    constant = exponent / denom_pieces
    tau = 1 / exponent
    # 2 - tau needs enough bits to resolve tau next to 2
    fine = bits + max(0, -int(mpmath.floor(mpmath.log(tau.lo, 2)))) + 8
    mu_upper = IntervalReal.exact(2, fine) - tau.with_bits(fine)
    sqrt_form = None

    if squarefree_core(a) == a and squarefree_core(b) == b:
        root_ab = IntervalReal.sqrt_of_int(a * b, bits)
        logs = IntervalReal.exact(a, bits).log() * IntervalReal.exact(b, bits).log()
        sqrt_form = constant * SQRT_FORM_FACTOR(bits) * root_ab * logs
        if lstar is not None:
            sqrt_form = sqrt_form * lstar
    return ExponentReport(a, b, route, tau, mu_upper, product, constant, lstar, sqrt_form, rec)
