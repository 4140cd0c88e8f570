import math
import random

import mpmath
import pytest

from oracles import pell_solutions, system_solutions
from pellapprox.errors import InvalidInput
from pellapprox.intervals import IntervalReal
from pellapprox.quadratic import QuadElement
from pellapprox.system import (
    KAPPA,
    effective_bound,
    inequality_chain_check,
    lambda_value,
    locate_solution,
    setup_system,
    solution_probes,
    solve_system,
)


def test_setup_examples():
    ctx = setup_system(2, 3, 1, 1)
    assert ctx.eps.element == QuadElement(3, 2, 2)
    assert ctx.eta.element == QuadElement(2, 1, 3)
    assert ctx.U == 2
    assert ctx.U0_value == QuadElement(17, 12, 2) and ctx.U0_source == "eps^2"
    assert abs(float(ctx.U0.mid()) - 33.97) < 0.01

    ctx = setup_system(3, 8, -2, -7)
    assert ctx.eta.element == QuadElement(3, 1, 8)
    assert ctx.U == 7
    assert ctx.U0_value == QuadElement(17, 6, 8) and ctx.U0_source == "eta^2"


@pytest.mark.parametrize(
    "args, message",
    [((2, 8, 1, 1), "ab"), ((4, 3, 1, 1), "a = 4"), ((2, 9, 1, 1), "b = 9"), ((2, 3, 0, 1), "u"), ((2, 3, 1, 0), "v")],
)
def test_setup_rejects_each_hypothesis(args, message):
    with pytest.raises(InvalidInput, match=message):
        setup_system(*args)


def test_context_reps_are_within_bound():
    ctx = setup_system(3, 8, -2, -7)
    for rep in ctx.alpha_reps + ctx.beta_reps:
        assert rep.within_bound()


def test_lambda_example_at_origin():
    ctx = setup_system(3, 8, -2, -7)
    j = [r.alpha for r in ctx.beta_reps].index(QuadElement(1, 1, 8))
    lfv = lambda_value(ctx, 0, j, 0, 0)
    with mpmath.workdps(60):
        expected = abs((1 + mpmath.sqrt(3)) / (1 + mpmath.sqrt(8)) * mpmath.sqrt(mpmath.mpf(8) / 3) - 1)
    assert lfv.lam.contains(expected)
    assert lfv.form_used == "both"
    assert lfv.direct.overlaps(lfv.conjugate)


def test_lambda_rejects_bad_indices():
    ctx = setup_system(3, 8, -2, -7)
    with pytest.raises(InvalidInput):
        lambda_value(ctx, 5, 0, 0, 0)
    with pytest.raises(InvalidInput):
        lambda_value(ctx, 0, 0, -1, 0)


def test_non_solution_pair_uses_direct_form_only():
    ctx = setup_system(3, 8, -2, -7)
    lfv = lambda_value(ctx, 0, 0, 3, 1)
    assert lfv.form_used == "direct" and lfv.conjugate is None
    report = inequality_chain_check(ctx, lfv)
    assert report.consistent is False
    assert report.log_lambda is not None


def test_chain_on_known_solution():
    ctx = setup_system(3, 8, -2, -7)
    for sol in [(1, 1, 1), (19, 11, 31)]:
        i, j, m, n = locate_solution(ctx, *sol)
        report = inequality_chain_check(ctx, lambda_value(ctx, i, j, m, n))
        assert report.passed
        assert report.lambda_vs_eta and report.exponent_gap
        # exponents are small here, so the max-bounds are not asserted
        assert report.large_exponents is False


def test_chain_on_random_solutions():
    # solutions with exponents past 12 log U0 do not occur at this scale, so
    # the max-bounds are checked only when that hypothesis holds
    rng = random.Random(3)
    for probe in solution_probes(2, 3, 100, rng, y_max=10**6):
        assert probe.chain.passed
        if probe.chain.large_exponents:
            assert probe.chain.lambda_vs_max and probe.chain.lambda_vs_half_max


def test_locate_rejects_non_solution():
    ctx = setup_system(3, 8, -2, -7)
    with pytest.raises(InvalidInput):
        locate_solution(ctx, 2, 1, 1)


def test_solve_examples():
    ctx = setup_system(3, 8, -2, -7)
    res = solve_system(ctx, 10**6)
    assert res.solutions == ((1, 1, 1), (19, 11, 31))
    assert res.complete_under_cap and not res.certified_complete
    assert res.log10_effective_bound.certainly_gt(10)
    assert solve_system(setup_system(2, 3, 1, 1), 100).solutions == ()
    with pytest.raises(InvalidInput):
        solve_system(ctx, 0)


def test_solve_matches_oracle_on_sampled_systems():
    rng = random.Random(2024)
    nonsquare = [n for n in range(2, 21) if math.isqrt(n) ** 2 != n]
    pell = {}

    def stream(D, N):
        if (D, N) not in pell:
            pell[D, N] = {y: x for x, y in pell_solutions(D, N, 10**4)}
        return pell[D, N]

    checked = 0
    while checked < 300:
        a, b = rng.sample(nonsquare, 2)
        if math.isqrt(a * b) ** 2 == a * b:
            continue
        u = rng.choice([k for k in range(-10, 11) if k])
        v = rng.choice([k for k in range(-10, 11) if k])
        xs, zs = stream(a, u), stream(b, v)
        expected = [(xs[y], y, zs[y]) for y in sorted(set(xs) & set(zs)) if y > 0 and xs[y] > 0 and zs[y] > 0]
        got = solve_system(setup_system(a, b, u, v), 10**4, bound_route=None).solutions
        assert list(got) == expected, (a, b, u, v)
        checked += 1


def test_naive_oracle_agrees_with_stream_oracle():
    for a, b, u, v in [(3, 8, -2, -7), (2, 3, -1, 1), (2, 5, 7, 4), (6, 7, 3, 9)]:
        naive = system_solutions(a, b, u, v, 2000)
        xs = {y: x for x, y in pell_solutions(a, u, 2000)}
        zs = {y: x for x, y in pell_solutions(b, v, 2000)}
        stream = [(xs[y], y, zs[y]) for y in sorted(set(xs) & set(zs)) if y > 0 and xs[y] > 0 and zs[y] > 0]
        assert naive == stream


def test_every_solution_reconstructs():
    for a, b, u, v in [(3, 8, -2, -7), (2, 3, 7, 13), (5, 7, -1, 2)]:
        ctx = setup_system(a, b, u, v)
        for x, y, z in solve_system(ctx, 10**6, bound_route=None).solutions:
            i, j, m, n = locate_solution(ctx, x, y, z)
            assert ctx.alpha_reps[i].alpha * ctx.eps.element**m == QuadElement(x, y, a)
            assert ctx.beta_reps[j].alpha * ctx.eta.element**n == QuadElement(z, y, b)


# -- effective bounds -------------------------------------------------------------


@pytest.mark.parametrize("route", ["thm21", "thm22"])
def test_effective_bound_is_finite_and_consistent(route):
    ctx = setup_system(2, 3, 1, 1)
    rep = effective_bound(ctx, route)
    assert rep.X_log_bound.certainly_gt(0)
    assert mpmath.isfinite(rep.X_log_bound.hi)
    assert rep.X_log_bound.certainly_le(rep.symbolic.log_bound_at(ctx.U).hi)
    if route == "thm22":
        assert {"C", "Q", "c7", "kappa"} <= set(rep.constants)
    else:
        assert {"k", "s_bar", "B_prime", "c6"} <= set(rep.constants)


def test_log_star_factor_only_on_thm21_route():
    ctx = setup_system(3, 8, -2, -7)
    assert "log_star_max" in effective_bound(ctx, "thm21").symbolic.factors
    assert "log_star_max" not in effective_bound(ctx, "thm22").symbolic.factors


@pytest.mark.parametrize("route", ["thm21", "thm22"])
def test_doubling_U_adds_exponent_log2(route):
    sym = effective_bound(setup_system(3, 8, -2, -7), route).symbolic
    U = 7
    diff = sym.log_bound_at(2 * U) - sym.log_bound_at(U)
    assert diff.overlaps(sym.exponent * IntervalReal.exact(2).log())


def test_thm22_exponent_structure():
    # c7 depends on nothing but the fixed degree and kappa
    c7s = [effective_bound(setup_system(a, b, 1, 1), "thm22").constants["c7"] for a, b in [(2, 3), (5, 7), (3, 11)]]
    assert c7s[0].overlaps(c7s[1]) and c7s[1].overlaps(c7s[2])
    assert KAPPA == pytest.approx(2 / 9)


def test_bound_reports_log10():
    rep = effective_bound(setup_system(3, 8, -2, -7), "thm21")
    assert (rep.log10_X_bound * IntervalReal.exact(10).log()).overlaps(rep.X_log_bound)
