"""Simultaneous Pellian systems x^2 - a y^2 = u, z^2 - b y^2 = v.

Besides the capped exhaustive search this module instantiates the effective
argument bounding max{x, y, z}: the linear form

    Lambda = |alpha beta^-1 sqrt(b/a) eps^m eta^-n - 1|,

the inequalities it satisfies on solutions, and two explicit routes to an
upper bound for log max{x, y, z} (three-logarithm estimate with Feldman's B',
and Bombieri's height bound).  All constants are instantiated numerically and
are nowhere near optimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal

from .bounds import (
    BombieriInstance,
    log_star,
    thm21_constant,
    thm22_height_bound,
    weil_height_quad,
)
from .errors import InvalidInput, InvariantViolation, PrecisionCeilingError
from .intervals import LOG_GOLDEN, E, IntervalReal, current_policy, imax, refine
from .pell import PellClassRep, class_representatives, decompose, solve_pell_capped
from .quadratic import QuadElement, Unit, is_square, totally_positive_unit

__all__ = [
    "SystemContext",
    "LinearFormValue",
    "ChainReport",
    "SymbolicBound",
    "EffectiveBoundReport",
    "SolutionSet",
    "check_pair",
    "setup_system",
    "lambda_value",
    "locate_solution",
    "inequality_chain_check",
    "exponent_record",
    "effective_bound",
    "solve_system",
    "SolutionProbe",
    "solution_probes",
    "KAPPA",
    "DEGREE",
]

Route = Literal["thm21", "thm22"]

# Q(sqrt a, sqrt b) has degree 4 when none of a, b, ab is a square
DEGREE = 4
# log Lambda <= -max/2 <= -(2/9) h(A xi) once max{m log eps, n log eta} >= 12 log U0
KAPPA = Fraction(2, 9)


def check_pair(a: int, b: int) -> None:
    """Reject pairs where a, b or ab is a perfect square."""
    for name, value in (("a", a), ("b", b)):
        if not isinstance(value, int) or value < 2:
            raise InvalidInput(f"{name} must be an integer >= 2, got {value!r}")
        if is_square(value):
            raise InvalidInput(f"{name} = {value} is a perfect square")
    if is_square(a * b):
        raise InvalidInput(f"ab = {a * b} is a perfect square")


def _cross_compare(left, right) -> int:
    """Exact comparison of ints / quadratic elements, possibly from different fields."""
    if isinstance(left, int) and isinstance(right, int):
        return (left > right) - (left < right)
    if isinstance(left, QuadElement) and (isinstance(right, int) or right.D == left.D):
        return left.compare(right)
    if isinstance(right, QuadElement) and isinstance(left, int):
        return -right.compare(left)

    # distinct fields: the values cannot coincide, so refinement terminates
    def evaluate(bits):
        return left.to_interval(bits).compare(right.to_interval(bits))

    return refine(evaluate, lambda c: c is not None, what="cross-field comparison")


def _to_interval(value, bits: int) -> IntervalReal:
    if isinstance(value, QuadElement):
        return value.to_interval(bits)
    return IntervalReal.exact(value, bits)


@dataclass(frozen=True)
class SystemContext:
    a: int
    b: int
    u: int
    v: int
    eps: Unit
    eta: Unit
    U: int
    U0_value: int | QuadElement
    U0_source: str
    alpha_reps: tuple[PellClassRep, ...]
    beta_reps: tuple[PellClassRep, ...]

    def __post_init__(self):
        for rep in self.alpha_reps:
            if not rep.within_bound():
                raise InvariantViolation(f"alpha = {rep.alpha} violates alpha^2 <= |u| eps^2")
        for rep in self.beta_reps:
            if not rep.within_bound():
                raise InvariantViolation(f"beta = {rep.alpha} violates beta^2 <= |v| eta^2")

    @property
    def U0(self) -> IntervalReal:
        return self.U0_interval()

    def U0_interval(self, bits: int | None = None) -> IntervalReal:
        return _to_interval(self.U0_value, bits or current_policy().start)

    def log_U0(self, bits: int | None = None) -> IntervalReal:
        return self.U0_interval(bits).log()

    def log_eps(self, bits: int | None = None) -> IntervalReal:
        return self.eps.log(bits)

    def log_eta(self, bits: int | None = None) -> IntervalReal:
        return self.eta.log(bits)


def setup_system(a: int, b: int, u: int, v: int) -> SystemContext:
    """Units, U0 = max{U, ab, eps^2, eta^2} and all class representatives."""
    check_pair(a, b)
    if u == 0:
        raise InvalidInput("u must be nonzero")
    if v == 0:
        raise InvalidInput("v must be nonzero")
    eps = totally_positive_unit(a)
    eta = totally_positive_unit(b)
    U = max(abs(u), abs(v), 2)
    candidates = [("U", U), ("ab", a * b), ("eps^2", eps.element**2), ("eta^2", eta.element**2)]
    source, best = candidates[0]
    for name, value in candidates[1:]:
        if _cross_compare(value, best) > 0:
            source, best = name, value
    return SystemContext(
        a, b, u, v, eps, eta, U, best, source,
        tuple(class_representatives(a, u, eps)),
        tuple(class_representatives(b, v, eta)),
    )


@lru_cache(maxsize=256)
def _cached_context(a: int, b: int, u: int, v: int) -> SystemContext:
    return setup_system(a, b, u, v)


@dataclass(frozen=True)
class LinearFormValue:
    lam: IntervalReal
    m: int
    n: int
    rep_pair: tuple[int, int]
    form_used: str
    direct: IntervalReal
    conjugate: IntervalReal | None = None

    @property
    def consistent(self) -> bool:
        """True when (i, j, m, n) comes from a solution, i.e. both forms apply."""
        return self.form_used == "both"


def _lambda_forms(ctx: SystemContext, gamma_a: QuadElement, gamma_b: QuadElement, bits: int):
    ga = gamma_a.to_interval(bits)
    gb = gamma_b.to_interval(bits)
    ratio = IntervalReal.sqrt_of_int(ctx.a * ctx.b, bits) / ctx.a  # sqrt(b/a)
    direct = abs(ga / gb * ratio - 1)
    # (alpha eps^m)' = alpha' eps^-m and (beta eta^n)' = beta' eta^-n
    conj_form = abs(gamma_a.conj().to_interval(bits) * ratio - gamma_b.conj().to_interval(bits)) / gb
    return direct, conj_form


def lambda_value(ctx: SystemContext, i: int, j: int, m: int, n: int) -> LinearFormValue:
    """Lambda for representatives (alpha_i, beta_j) and exponents (m, n).

    When alpha_i eps^m and beta_j eta^n share their y-coordinate (a solution
    of the system) both expressions of Lambda are evaluated and intersected;
    otherwise only the direct expression is meaningful and is returned alone.
    """
    if not (0 <= i < len(ctx.alpha_reps)) or not (0 <= j < len(ctx.beta_reps)):
        raise InvalidInput(f"invalid representative indices ({i}, {j})")
    if m < 0 or n < 0:
        raise InvalidInput("exponents must be nonnegative")
    gamma_a = ctx.alpha_reps[i].alpha * ctx.eps.element**m
    gamma_b = ctx.beta_reps[j].alpha * ctx.eta.element**n
    consistent = gamma_a.y == gamma_b.y

    def evaluate(bits):
        return _lambda_forms(ctx, gamma_a, gamma_b, bits)

    def separated(forms):
        direct, conj_form = forms
        if consistent:
            return not direct.contains_zero() and not conj_form.contains_zero()
        return not direct.contains_zero()

    direct, conj_form = refine(evaluate, separated, what="Lambda away from zero")
    if not consistent:
        return LinearFormValue(direct, m, n, (i, j), "direct", direct)
    if not direct.overlaps(conj_form):
        raise InvariantViolation("the two expressions of Lambda disagree on a solution")
    return LinearFormValue(direct.intersect(conj_form), m, n, (i, j), "both", direct, conj_form)


def locate_solution(ctx: SystemContext, x: int, y: int, z: int) -> tuple[int, int, int, int]:
    """(i, j, m, n) with x + y sqrt a = alpha_i eps^m and z + y sqrt b = beta_j eta^n."""
    if x * x - ctx.a * y * y != ctx.u or z * z - ctx.b * y * y != ctx.v:
        raise InvalidInput(f"({x}, {y}, {z}) does not solve the system")
    alpha, m = decompose(QuadElement(x, y, ctx.a), ctx.eps)
    beta, n = decompose(QuadElement(z, y, ctx.b), ctx.eta)
    i = [r.alpha for r in ctx.alpha_reps].index(alpha)
    j = [r.alpha for r in ctx.beta_reps].index(beta)
    return i, j, m, n


@dataclass(frozen=True)
class ChainReport:
    """Truth values of the inequalities satisfied by Lambda on solutions.

    None marks a comparison left undecided at the precision ceiling.
    """

    m: int
    n: int
    consistent: bool
    log_lambda: IntervalReal
    large_exponents: bool | None  # max{m log eps, n log eta} >= 12 log U0
    lambda_vs_eta: bool | None  # log Lambda <= -n log eta + 2 log U0
    exponent_gap: bool | None  # |m log eps - n log eta| <= 4 log U0
    lambda_vs_max: bool | None  # log Lambda <= -max + 6 log U0
    lambda_vs_half_max: bool | None  # log Lambda <= -max / 2

    @property
    def passed(self) -> bool:
        """Lambda vs eta and exponent-gap bounds hold, and the max-bounds hold when exponents are large."""
        ok = self.lambda_vs_eta is True and self.exponent_gap is True
        if self.large_exponents:
            ok = ok and self.lambda_vs_max is True and self.lambda_vs_half_max is True
        return ok


def _le(left: IntervalReal, right: IntervalReal) -> bool | None:
    c = left.compare(right)
    if c is None:
        return True if left.certainly_le(right) else None
    return c < 0


def inequality_chain_check(ctx: SystemContext, lfv: LinearFormValue) -> ChainReport:
    m, n = lfv.m, lfv.n
    i, j = lfv.rep_pair
    gamma_a = ctx.alpha_reps[i].alpha * ctx.eps.element**m
    gamma_b = ctx.beta_reps[j].alpha * ctx.eta.element**n

    def evaluate(bits):
        direct, conj_form = _lambda_forms(ctx, gamma_a, gamma_b, bits)
        lam = direct.intersect(conj_form) if lfv.consistent and direct.overlaps(conj_form) else direct
        log_lam = lam.log() if lam.sign() == 1 else None
        L0 = ctx.log_U0(bits)
        me = m * ctx.log_eps(bits)
        ne = n * ctx.log_eta(bits)
        top = imax(me, ne)
        flags = (
            _le(12 * L0, top),
            None if log_lam is None else _le(log_lam, -ne + 2 * L0),
            _le(abs(me - ne), 4 * L0),
            None if log_lam is None else _le(log_lam, -top + 6 * L0),
            None if log_lam is None else _le(log_lam, -top / 2),
        )
        return log_lam, flags

    try:
        log_lam, flags = refine(evaluate, lambda r: None not in r[1], what="inequality chain")
    except PrecisionCeilingError:
        log_lam, flags = evaluate(current_policy().ceiling)
    return ChainReport(m, n, lfv.consistent, log_lam, *flags)


@dataclass(frozen=True)
class SymbolicBound:
    """log X <= log_C + exponent * log U, valid for every nonzero u, v with max(|u|,|v|,2) = U."""

    log_C: IntervalReal
    exponent: IntervalReal
    factors: dict = field(default_factory=dict)

    def log_bound_at(self, U) -> IntervalReal:
        if not isinstance(U, IntervalReal):
            U = IntervalReal.exact(U, self.exponent.bits)
        return self.log_C + self.exponent * U.log()


@dataclass(frozen=True)
class EffectiveBoundReport:
    route: str
    bound_on_max_mn: IntervalReal
    X_log_bound: IntervalReal
    constants: dict
    symbolic: SymbolicBound

    @property
    def log10_X_bound(self) -> IntervalReal:
        return self.X_log_bound / IntervalReal.exact(10, self.X_log_bound.bits).log()


def _solve_normalized(k: IntervalReal, lam1: IntervalReal, lam2: IntervalReal,
                      delta: IntervalReal, bits: int) -> tuple[IntervalReal, IntervalReal]:
    """Largest s with s <= 2k log B'(s) + delta.

    B'(s) = max{12, 4/(e lam1) + s lam2 / 3, 4/(e lam2) + s lam1 / 3}.
    Returns (s_bar, B'(s_bar)) with s_bar certified to exceed every feasible s.
    """
    e = E(bits)
    c1 = 4 / (e * lam1)
    c2 = 4 / (e * lam2)

    def bprime(s):
        return imax(IntervalReal.exact(12, bits), c1 + s * lam2 / 3, c2 + s * lam1 / 3)

    def rhs(s):
        return 2 * k * bprime(s).log() + delta

    # s - rhs(s) is convex and negative at 0, so any positive s with s >= rhs(s)
    # bounds the feasible set; iterate downward from far above the root
    s = IntervalReal(rhs(IntervalReal.exact(1, bits) * k * 10**6).hi, bits=bits) * 10
    for _ in range(200):
        nxt = rhs(s)
        hi = nxt.hi * (1 + IntervalReal.exact(Fraction(1, 10**12), bits).hi)
        candidate = IntervalReal(hi, hi, bits)
        if candidate.compare(s) != -1:
            break
        s = candidate
    if not s.certainly_ge(rhs(s)):
        raise InvariantViolation("failed to certify the fixed point of the B' inequality")
    return s, bprime(s)


def exponent_record(a: int, b: int, route: Route, bits: int | None = None) -> dict:
    """The U-independent part of the effective bound for the pair (a, b).

    Returns a dict with keys ``exponent`` (of U), ``log_C``, ``factors`` and
    route-specific ``constants``; it depends only on the units of Z[sqrt a]
    and Z[sqrt b].
    """
    check_pair(a, b)
    if route not in ("thm21", "thm22"):
        raise InvalidInput(f"unknown route {route!r}")
    if bits is None:
        bits = current_policy().start
    return _exponent_record(a, b, route, bits)


@lru_cache(maxsize=512)
def _exponent_record(a: int, b: int, route: str, bits: int) -> dict:
    eps = totally_positive_unit(a)
    eta = totally_positive_unit(b)
    lam1 = eps.log(bits).with_bits(bits)
    lam2 = eta.log(bits).with_bits(bits)
    prod = lam1 * lam2
    # log U0 <= log U + log(ab) + 2 log eps + 2 log eta
    rest = IntervalReal.exact(a * b, bits).log() + 2 * lam1 + 2 * lam2
    # U0 >= max{2, ab, eps^2, eta^2}, independent of u and v
    L0_min = imax(IntervalReal.exact(a * b, bits).log(), 2 * lam1, 2 * lam2)
    constants: dict = {}
    factors = {"log_eps": lam1, "log_eta": lam2}
    if route == "thm21":
        theorem_constant = thm21_constant(3, DEGREE)
        e = E(bits)
        # log A_1 = (e/4) log eps, log A_2 = (e/4) log eta, log A_3 = 3 log U0
        k = theorem_constant * IntervalReal.exact(3 * DEGREE, bits).log() * (e / DEGREE) ** 2 * 3
        delta = 2 * IntervalReal.exact(2, bits).log() / (prod * L0_min)
        s_bar, bprime = _solve_normalized(k, lam1, lam2, delta, bits)
        H_norm = imax(s_bar * prod, IntervalReal.exact(12, bits))
        exponent = 1 + H_norm
        lstar = log_star(imax(lam1, lam2))
        factors["log_star_max"] = lstar
        constants.update(
            theorem_constant=IntervalReal.exact(theorem_constant, bits),
            k=k,
            s_bar=s_bar,
            B_prime=bprime,
            max_mn_per_log_U0=H_norm,
            c6=exponent / (prod * lstar),
            log_C1=exponent * rest,
        )
    else:
        gen_heights = (lam1 / 2, lam2 / 2)
        # h(A) only enters through max{h(A), Q}; Q dwarfs 3 log U0 at desk scale
        inst = BombieriInstance(DEGREE, KAPPA, 2, gen_heights, IntervalReal.exact(0, bits))
        result = thm22_height_bound(inst, bits)
        C, Q = result.C, result.Q
        c7 = 240 * C**2 + 1 / LOG_GOLDEN(bits) ** 2
        exponent = c7 * prod
        constants.update(
            kappa=str(KAPPA),
            C=C,
            Q=Q,
            c7=c7,
            log_C3=20 * Q**2 + exponent * rest,
        )
    log_C = constants["log_C1"] if route == "thm21" else constants["log_C3"]
    return {"exponent": exponent, "log_C": log_C, "factors": factors, "constants": constants,
            "L0_min": L0_min}


def _check_log_a3(ctx: SystemContext, L0: IntervalReal, bits: int) -> None:
    """3 log U0 dominates h(A) and (e/4)|log A| for every representative pair."""
    half_logs = (IntervalReal.exact(ctx.a, bits).log() + IntervalReal.exact(ctx.b, bits).log()) / 2
    ratio = IntervalReal.sqrt_of_int(ctx.a * ctx.b, bits) / ctx.a
    e = E(bits)
    for ra in ctx.alpha_reps:
        for rb in ctx.beta_reps:
            h = weil_height_quad(ra.alpha, bits=bits) + weil_height_quad(rb.alpha, bits=bits) + half_logs
            A = ra.alpha.to_interval(bits) / rb.alpha.to_interval(bits) * ratio
            if not (h.certainly_le(3 * L0) and (e / DEGREE * abs(A.log())).certainly_le(3 * L0)):
                raise InvariantViolation("log A_3 = 3 log U0 is not admissible")


def effective_bound(ctx: SystemContext, route: Route, bits: int | None = None) -> EffectiveBoundReport:
    """Upper bound for log max{x, y, z} over all positive solutions.

    thm21: three-logarithm estimate with alpha_1 = eps, alpha_2 = eta,
    alpha_3 = alpha beta^-1 sqrt(b/a), D = 4, b = (m, -n, 1), combined with
    log Lambda <= -max{m log eps, n log eta} / 2.

    thm22: Bombieri's bound for Gamma = <eps, eta>, xi = eps^m eta^-n,
    A = alpha beta^-1 sqrt(b/a), kappa = 2/9 and h(xi) = max{m log eps, n log eta} / 2.
    """
    if bits is None:
        bits = current_policy().start
    rec = exponent_record(ctx.a, ctx.b, route, bits)
    L0 = ctx.log_U0(bits)
    constants = dict(rec["constants"])
    if route == "thm21":
        _check_log_a3(ctx, L0, bits)
        H = constants["max_mn_per_log_U0"] * L0
    else:
        hA = 3 * L0
        Q = constants["Q"]
        H = imax(20 * Q * imax(hA, Q), 12 * L0)
        constants["h_A_bound"] = hA
    X_log = L0 + H
    symbolic = SymbolicBound(rec["log_C"], rec["exponent"], dict(rec["factors"]))
    if not X_log.certainly_le(symbolic.log_bound_at(ctx.U).hi):
        raise InvariantViolation("instance bound exceeds its symbolic form")
    constants["log_U0"] = L0
    return EffectiveBoundReport(route, H, X_log, constants, symbolic)


@dataclass(frozen=True)
class SolutionSet:
    solutions: tuple[tuple[int, int, int], ...]
    y_cap: int
    complete_under_cap: bool
    certified_complete: bool
    log10_effective_bound: IntervalReal | None = None

    def __post_init__(self):
        if list(self.solutions) != sorted(set(self.solutions), key=lambda t: (t[1], t[0], t[2])):
            raise InvariantViolation("solutions must be sorted by y without duplicates")


def solve_system(ctx: SystemContext, y_cap: int, bound_route: Route | None = "thm21") -> SolutionSet:
    """All positive solutions with y <= y_cap, by merging the two y-streams."""
    if y_cap < 1:
        raise InvalidInput("y_cap must be at least 1")
    xs = solve_pell_capped(ctx.a, ctx.u, y_cap)
    zs = solve_pell_capped(ctx.b, ctx.v, y_cap)
    out = []
    p = q = 0
    while p < len(xs) and q < len(zs):
        ya, yb = xs[p].y, zs[q].y
        if ya < yb:
            p += 1
        elif yb < ya:
            q += 1
        else:
            x, z = xs[p].x, zs[q].x
            if ya > 0 and x > 0 and z > 0:
                if x * x - ctx.a * ya * ya != ctx.u or z * z - ctx.b * ya * ya != ctx.v:
                    raise InvariantViolation(f"({x}, {ya}, {z}) fails the system")
                out.append((x, ya, z))
            p += 1
            q += 1
    certified = False
    log10_bound = None
    if bound_route is not None:
        report = effective_bound(ctx, bound_route)
        log10_bound = report.log10_X_bound
        # every solution has y <= X, so a cap above the bound certifies completeness
        certified = IntervalReal.exact(y_cap, report.X_log_bound.bits).log().certainly_ge(report.X_log_bound)
    return SolutionSet(tuple(out), y_cap, True, certified, log10_bound)


@dataclass(frozen=True)
class SolutionProbe:
    solution: tuple[int, int, int]
    context: SystemContext
    indices: tuple[int, int, int, int]
    value: LinearFormValue
    chain: ChainReport


def solution_probes(a: int, b: int, count: int, rng, y_max: int = 200) -> list[SolutionProbe]:
    """Random systems with a known solution, and Lambda / chain data at it.

    Each probe draws y <= y_max and x, z just above y sqrt a, y sqrt b, then
    uses u = x^2 - a y^2, v = z^2 - b y^2, so (x, y, z) solves its system.
    """
    check_pair(a, b)
    out = []
    for _ in range(count):
        y = rng.randint(1, y_max)
        x = math.isqrt(a * y * y) + rng.randint(0, 1)
        z = math.isqrt(b * y * y) + rng.randint(0, 1)
        x, z = max(x, 1), max(z, 1)
        ctx = _cached_context(a, b, x * x - a * y * y, z * z - b * y * y)
        i, j, m, n = locate_solution(ctx, x, y, z)
        lfv = lambda_value(ctx, i, j, m, n)
        out.append(SolutionProbe((x, y, z), ctx, (i, j, m, n), lfv, inequality_chain_check(ctx, lfv)))
    return out
