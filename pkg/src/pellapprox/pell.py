"""Solution classes of x^2 - D y^2 = N and their orbits under the unit group.

Every solution with x, y >= 0 is an element gamma = x + y sqrt(D) with
gamma >= |gamma'|.  Writing gamma = alpha * eps^m with eps the totally
positive unit, the ratio alpha / |alpha'| lands in the window [1, eps^2).
The representatives are the finitely many solutions whose ratio lies in that
window; using the half-open window makes the decomposition unique.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterator

from .errors import InvalidInput, InvariantViolation
from .quadratic import QuadElement, Unit, check_radicand, totally_positive_unit

__all__ = [
    "PellClassRep",
    "GeneratedSolution",
    "class_representatives",
    "generate_solutions",
    "solve_pell_capped",
    "decompose",
    "representative_y_bound",
]


def _floor_nonneg(e: QuadElement) -> int:
    """floor(x + y sqrt D) for x, y >= 0."""
    return e.x + math.isqrt(e.y * e.y * e.D)


def _ratio_position(alpha: QuadElement, unit: Unit) -> tuple[int, int]:
    """Compare alpha against |alpha'| and against |alpha'| * eps^2.

    Returns (sign(alpha - |alpha'|), sign(alpha - |alpha'| eps^2)).
    """
    c = abs(alpha.conj())
    eps = unit.element
    return alpha.compare(c), alpha.compare(c * eps * eps)


@dataclass(frozen=True)
class PellClassRep:
    """Representative alpha of a class of solutions of x^2 - D y^2 = N."""

    alpha: QuadElement
    D: int
    N: int
    unit: Unit

    def __post_init__(self):
        a = self.alpha
        if a.D != self.D or self.unit.D != self.D:
            raise InvariantViolation("representative, unit and radicand disagree")
        if a.norm() != self.N:
            raise InvariantViolation(f"norm of {a} is {a.norm()}, expected {self.N}")
        if a.sign() <= 0:
            raise InvariantViolation(f"representative {a} is not positive")
        lower, upper = _ratio_position(a, self.unit)
        # alpha >= |alpha'| and alpha eps^-1 <= |alpha'| eps
        if lower < 0 or upper > 0:
            raise InvariantViolation(f"{a} is outside the fundamental window of {self.unit.element}")

    def within_bound(self) -> bool:
        """alpha^2 <= |N| eps^2, decided exactly."""
        eps = self.unit.element
        return (self.alpha * self.alpha).compare(abs(self.N) * eps * eps) <= 0


@dataclass(frozen=True, order=True)
class GeneratedSolution:
    y: int
    x: int
    class_index: int
    power: int

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise InvariantViolation("generated solutions are nonnegative")

    def element(self, D: int) -> QuadElement:
        return QuadElement(self.x, self.y, D)

    @property
    def pair(self) -> tuple[int, int]:
        return self.x, self.y


def representative_y_bound(D: int, N: int, unit: Unit) -> int:
    """Search bound for representative y-coordinates.

    alpha <= eps sqrt|N| and y sqrt(D) <= alpha give D y^2 <= |N| eps^2; one
    extra step of slack is added.
    """
    eps = unit.element
    F = _floor_nonneg(abs(N) * eps * eps)
    return math.isqrt(F // D) + 1


def class_representatives(D: int, N: int, unit: Unit | None = None) -> list[PellClassRep]:
    """All solution classes of x^2 - D y^2 = N, ordered by the representative's y.

    An empty list means the equation has no integer solutions.
    """
    check_radicand(D)
    if N == 0:
        raise InvalidInput("N must be nonzero")
    if unit is None:
        unit = totally_positive_unit(D)
    elif not unit.totally_positive or unit.D != D:
        raise InvalidInput("unit must be the totally positive unit of Z[sqrt D]")
    reps = []
    y_max = representative_y_bound(D, N, unit)
    for y in range(y_max + 1):
        t = N + D * y * y
        if t < 0:
            continue
        x = math.isqrt(t)
        if x * x != t:
            continue
        alpha = QuadElement(x, y, D)
        lower, upper = _ratio_position(alpha, unit)
        if lower >= 0 and upper < 0:
            reps.append(PellClassRep(alpha, D, N, unit))
    return reps


def generate_solutions(rep: PellClassRep, y_cap: int, class_index: int = 0) -> list[GeneratedSolution]:
    """Solutions alpha * eps^m, m = 0, 1, ..., with y <= y_cap, by increasing y."""
    return list(_iter_orbit(rep, y_cap, class_index))


def _iter_orbit(rep: PellClassRep, y_cap: int, class_index: int) -> Iterator[GeneratedSolution]:
    gamma = rep.alpha
    eps = rep.unit.element
    m = 0
    # y grows strictly along the orbit since gamma >= |gamma'| and eps > 1
    while gamma.y <= y_cap:
        yield GeneratedSolution(gamma.y, gamma.x, class_index, m)
        gamma = gamma * eps
        m += 1


def solve_pell_capped(D: int, N: int, y_cap: int) -> list[GeneratedSolution]:
    """Every solution of x^2 - D y^2 = N with x >= 0 and 0 <= y <= y_cap, sorted by y."""
    if y_cap < 0:
        raise InvalidInput("y_cap must be nonnegative")
    reps = class_representatives(D, N)
    merged = heapq.merge(*(_iter_orbit(r, y_cap, i) for i, r in enumerate(reps)))
    out: list[GeneratedSolution] = []
    seen = set()
    for sol in merged:
        if sol.pair in seen:
            raise InvariantViolation(f"solution {sol.pair} reached from two classes")
        seen.add(sol.pair)
        out.append(sol)
    return out


def decompose(gamma: QuadElement, unit: Unit) -> tuple[QuadElement, int]:
    """Write gamma = alpha * eps^m with alpha in the window [1, eps^2) of ratios.

    gamma must satisfy gamma >= |gamma'| (true for x, y >= 0).
    """
    if gamma.D != unit.D:
        raise InvalidInput("element and unit live in different orders")
    if gamma.norm() == 0:
        raise InvalidInput("cannot decompose a zero-norm element")
    lower, upper = _ratio_position(gamma, unit)
    if lower < 0:
        raise InvalidInput(f"{gamma} is below its conjugate in absolute value")
    eps_inv = unit.element.unit_inverse()
    m = 0
    while upper >= 0:
        gamma = gamma * eps_inv
        m += 1
        _, upper = _ratio_position(gamma, unit)
    return gamma, m
