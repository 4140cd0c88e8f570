import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import minimal_unit_solution
from pellapprox.errors import IncompatibleFields, InvalidInput, InvalidRadicand
from pellapprox.intervals import IntervalReal
from pellapprox.quadratic import (
    QuadElement,
    compare,
    conj,
    fundamental_unit,
    make_element,
    mul,
    norm_of,
    regulator_check,
    regulator_report,
    sqrt_cf,
    squarefree_core,
    to_interval,
    totally_positive_unit,
)

NONSQUARE = [D for D in range(2, 60) if math.isqrt(D) ** 2 != D]
radicands = st.sampled_from(NONSQUARE)
coords = st.integers(min_value=-(10**12), max_value=10**12)


@st.composite
def elements(draw, D=None):
    D = D or draw(radicands)
    return QuadElement(draw(coords), draw(coords), D)


@st.composite
def element_pairs(draw):
    D = draw(radicands)
    return draw(elements(D)), draw(elements(D))


def test_constructor_and_string():
    e = make_element(1, 1, 2)
    assert (e.x, e.y, e.D) == (1, 1, 2)
    assert str(e) == "1+√2"
    assert str(QuadElement(3, -2, 7)) == "3-2√7"


def test_square_of_silver_ratio_square():
    e = make_element(3, 2, 2)
    assert mul(e, e) == QuadElement(17, 12, 2)


@pytest.mark.parametrize("D", [4, 9, 1, 0, -3])
def test_invalid_radicands(D):
    with pytest.raises(InvalidRadicand):
        make_element(1, 0, D)


def test_conjugate_and_norm():
    e = make_element(1, 1, 2)
    assert conj(e) == QuadElement(1, -1, 2)
    assert norm_of(e) == -1
    assert norm_of(make_element(3, 2, 2)) == 1


def test_compare_examples():
    assert compare(make_element(1, 1, 2), make_element(2, 0, 2)) == 1
    assert compare(make_element(1, -1, 2), 0) == -1
    assert compare(make_element(3, 2, 2), make_element(3, 2, 2)) == 0


def test_mixed_fields_rejected():
    with pytest.raises(IncompatibleFields):
        make_element(1, 1, 2) + make_element(1, 1, 3)


def test_to_interval_examples():
    iv = to_interval(make_element(1, 1, 2), 64)
    with mpmath.workprec(200):
        assert iv.contains(1 + mpmath.sqrt(2))
    assert iv.width() < 1e-15
    three = to_interval(make_element(3, 0, 2), 64)
    assert three.lo == three.hi == 3
    assert to_interval(conj(make_element(1, 1, 2)), 64).certainly_lt(0)


@given(element_pairs())
def test_norm_is_multiplicative(pair):
    e1, e2 = pair
    assert (e1 * e2).norm() == e1.norm() * e2.norm()


@given(element_pairs())
def test_ring_identities(pair):
    e1, e2 = pair
    assert (e1 + e2) - e2 == e1
    assert e1 * e2 == e2 * e1
    assert (e1 * e2).conj() == e1.conj() * e2.conj()
    assert e1 * e1.conj() == QuadElement(e1.norm(), 0, e1.D)


@given(element_pairs(), st.sampled_from([64, 128, 512]))
def test_compare_consistent_with_intervals(pair, bits):
    e1, e2 = pair
    c = e1.compare(e2)
    i1, i2 = e1.to_interval(bits), e2.to_interval(bits)
    if c == 0:
        assert i1.overlaps(i2)
    else:
        assert i1.compare(i2) in (c, None)


@given(elements(), st.sampled_from([32, 64, 200]))
def test_to_interval_contains_high_precision_value(e, bits):
    with mpmath.workprec(4 * bits + 200):
        value = e.x + e.y * mpmath.sqrt(e.D)
    iv = e.to_interval(bits)
    assert iv.contains(value)


@given(elements())
def test_sign_matches_float_away_from_zero(e):
    value = e.x + e.y * math.sqrt(e.D)
    if abs(value) > 1e-3 * (abs(e.x) + 1):
        assert e.sign() == (1 if value > 0 else -1)


@given(elements())
def test_json_round_trip(e):
    assert QuadElement.from_json(e.to_json()) == e


def test_unit_pow_and_inverse():
    e = QuadElement(1, 1, 2)
    assert e**4 == QuadElement(17, 12, 2)
    assert e * e.unit_inverse() == 1
    with pytest.raises(InvalidInput):
        QuadElement(2, 1, 2).unit_inverse()


@pytest.mark.parametrize(
    "D, a0, period",
    [(2, 1, (2,)), (3, 1, (1, 2)), (13, 3, (1, 1, 1, 1, 6)), (7, 2, (1, 1, 1, 4)), (94, 9, (1, 2, 3, 1, 1, 5, 1, 8, 1, 5, 1, 1, 3, 2, 1, 18))],
)
def test_sqrt_cf_examples(D, a0, period):
    cf = sqrt_cf(D)
    assert (cf.a0, cf.period) == (a0, period)


def brute_partial_quotients(D, count):
    # floor-based expansion of sqrt(D) at generous precision
    with mpmath.workprec(4000):
        x = mpmath.sqrt(D)
        out = []
        for _ in range(count):
            a = int(mpmath.floor(x))
            out.append(a)
            x = 1 / (x - a)
    return out


@pytest.mark.parametrize("D", [D for D in range(2, 120) if math.isqrt(D) ** 2 != D])
def test_sqrt_cf_matches_floor_expansion(D):
    cf = sqrt_cf(D)
    n = 1 + 2 * len(cf.period)
    assert cf.partial_quotients(n) == brute_partial_quotients(D, n)
    assert cf.period[-1] == 2 * cf.a0
    # minimality: no proper divisor of the length is a period
    L = len(cf.period)
    for d in range(1, L):
        if L % d == 0:
            assert cf.period != cf.period[:d] * (L // d)


def test_sqrt_cf_rejects_square():
    with pytest.raises(InvalidRadicand):
        sqrt_cf(4)


@pytest.mark.parametrize(
    "D, element, norm",
    [(2, (1, 1), -1), (3, (2, 1), 1), (5, (2, 1), -1), (13, (18, 5), -1), (61, (29718, 3805), -1)],
)
def test_fundamental_unit_examples(D, element, norm):
    u = fundamental_unit(D)
    assert (u.element.x, u.element.y, u.norm) == (*element, norm)


@pytest.mark.parametrize("D", NONSQUARE)
def test_fundamental_unit_matches_brute_force(D):
    x, y, n = minimal_unit_solution(D)
    u = fundamental_unit(D)
    assert (u.element.x, u.element.y, u.norm) == (x, y, n)


def test_totally_positive_unit_examples():
    assert totally_positive_unit(2).element == QuadElement(3, 2, 2)
    assert totally_positive_unit(3).element == QuadElement(2, 1, 3)
    assert totally_positive_unit(5).element == QuadElement(9, 4, 5)


@pytest.mark.parametrize("D", NONSQUARE)
def test_totally_positive_unit_at_least_golden_ratio(D):
    u = totally_positive_unit(D)
    assert u.totally_positive and u.norm == 1 and u.element.conj().sign() == 1
    # exact: 2u - 1 >= sqrt 5  <=>  (2u - 1)^2 >= 5 with 2u - 1 > 0
    s = 2 * u.element - 1
    assert s.sign() == 1 and (s * s).compare(5) >= 0


def test_unit_log_encloses_reference():
    for D in (2, 3, 7, 94):
        u = totally_positive_unit(D)
        for bits in (64, 256):
            with mpmath.workprec(bits * 4):
                ref = mpmath.log(u.element.x + u.element.y * mpmath.sqrt(D))
            assert u.log(bits).contains(ref)


def test_regulator_check_examples():
    r2 = regulator_check(2)
    assert r2.certainly_gt(mpmath.mpf("0.8813")) and r2.certainly_lt(mpmath.mpf("0.8815"))
    r3 = regulator_check(3)
    assert r3.certainly_gt(mpmath.mpf("1.3169")) and r3.certainly_lt(mpmath.mpf("1.3171"))


@pytest.mark.parametrize("D", [5, 8, 12, 13, 4])
def test_regulator_check_rejects_non_maximal_or_square(D):
    with pytest.raises(InvalidInput):
        regulator_check(D)


def test_regulator_report_gives_both_orders():
    rep = regulator_report(8)
    with mpmath.workprec(400):
        assert rep["order"].contains(mpmath.log(3 + mpmath.sqrt(8)))
        assert rep["core"].contains(mpmath.log(1 + mpmath.sqrt(2)))
    assert regulator_report(7)["core"] is None


@pytest.mark.parametrize("n, core", [(2, 2), (8, 2), (12, 3), (72, 2), (30, 30), (49 * 3, 3)])
def test_squarefree_core(n, core):
    assert squarefree_core(n) == core


def test_regulator_interval_type():
    assert isinstance(regulator_check(7), IntervalReal)
