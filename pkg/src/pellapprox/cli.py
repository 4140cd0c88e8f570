"""Command-line interface.

Exit codes: 0 ok, 2 invalid input, 3 undecidable at the precision ceiling,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from typing import NamedTuple

import mpmath

from . import __version__
from .approx import best_records, exponent_report, records_to_csv, verify_inequality
from .config import FORMATS, RunConfig, load_config
from .errors import InvalidInput, InvariantViolation, PellApproxError, PrecisionCeilingError
from .intervals import IntervalReal, precision_policy
from .pell import class_representatives, solve_pell_capped
from .quadratic import fundamental_unit, regulator_check, squarefree_core, totally_positive_unit
from .reports import dumps, envelope
from .system import check_pair, effective_bound, setup_system, solution_probes, solve_system

CSV_HELP = """\
CSV columns by command:
  unit      D, element, norm, regulator_lo, regulator_hi, regulator_checked
  pell      D, N, x, y, class_index, power
  system    a, b, u, v, x, y, z
  exponent  a, b, route, tau, mu_eff_upper, regulator_product
  verify    a, b, c, mu, q_max, passed, violations, undecided, observed_constant
  records   q, dist_a, dist_b, max_dist, local_exponent
  sweep     a, b, admissible, reason, route, tau, mu_eff_upper, verify_passed, observed_constant
  probe     a, b, u, v, x, y, z, m, n, lambda, chain_passed
"""


def _num(iv: IntervalReal | None, digits: int = 20) -> str:
    return "" if iv is None else mpmath.nstr(iv.mid(), digits)


def _mu_text(rep) -> str:
    # 2 - tau with enough digits that the gap below 2 is visible
    digits = int(-mpmath.log10(rep.tau.lo)) + 12
    return mpmath.nstr(rep.mu_eff_upper.hi, digits)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _parse_range(text: str) -> range:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return range(int(lo), int(hi) + 1)
    return range(int(text), int(text) + 1)


# -- commands ------------------------------------------------------------------


class CommandResult(NamedTuple):
    inputs: dict
    outputs: dict
    derived: dict
    csv_text: str
    text: str
    exit_code: int = 0  # PrecisionCeilingError.exit_code when something stayed undecided


def cmd_unit(args, cfg):
    D = args.D
    unit = totally_positive_unit(D)
    fund = fundamental_unit(D)
    try:
        reg, checked, reason = regulator_check(D), True, None
    except InvalidInput as exc:
        if "perfect square" in str(exc) or "at least 2" in str(exc):
            raise
        reg, checked, reason = fund.regulator, False, str(exc)
    outputs = {
        "element": str(unit.element),
        "unit": unit,
        "norm": unit.norm,
        "fundamental_unit": fund,
        "regulator": reg,
        "regulator_bound_checked": checked,
        "regulator_note": reason,
        "squarefree_core": squarefree_core(D),
    }
    row = [D, str(unit.element), unit.norm, mpmath.nstr(reg.lo, 20), mpmath.nstr(reg.hi, 20), checked]
    csv_text = _csv(["D", "element", "norm", "regulator_lo", "regulator_hi", "regulator_checked"], [row])
    text = (f"totally positive unit of Z[√{D}]: {unit.element} (norm {unit.norm})\n"
            f"fundamental unit: {fund.element} (norm {fund.norm})\n"
            f"regulator: {_num(reg)}" + ("" if checked else f"  [{reason}]") + "\n")
    return {"D": D}, outputs, {}, csv_text, text


def cmd_pell(args, cfg):
    D, N, cap = args.D, args.N, args.cap or cfg.y_cap
    reps = class_representatives(D, N)
    sols = solve_pell_capped(D, N, cap)
    outputs = {"representatives": reps, "solutions": sols, "y_cap": cap}
    csv_text = _csv(["D", "N", "x", "y", "class_index", "power"],
                    [[D, N, s.x, s.y, s.class_index, s.power] for s in sols])
    text = (f"x^2 - {D} y^2 = {N}: {len(reps)} class(es), {len(sols)} solution(s) with y <= {cap}\n"
            + "".join(f"  ({s.x}, {s.y})  class {s.class_index}, power {s.power}\n" for s in sols))
    return {"D": D, "N": N, "y_cap": cap}, outputs, {}, csv_text, text


def cmd_system(args, cfg):
    a, b, u, v = args.a, args.b, args.u, args.v
    cap = args.cap or cfg.y_cap
    ctx = setup_system(a, b, u, v)
    routes = ["thm21", "thm22"] if args.route == "both" else [args.route]
    reports = {r: effective_bound(ctx, r) for r in routes}
    sols = solve_system(ctx, cap, bound_route=routes[0])
    # completeness is certified if any route's bound is below the cap
    log_cap = IntervalReal.exact(cap).log()
    certified = any(log_cap.certainly_ge(rep.X_log_bound) for rep in reports.values())
    outputs = {
        "context": ctx,
        "solutions": sols.solutions,
        "y_cap": cap,
        "complete_under_cap": sols.complete_under_cap,
        "certified_complete": certified,
        "log10_effective_bound": {r: rep.log10_X_bound for r, rep in reports.items()},
        "effective_bounds": reports,
    }
    derived = {r: rep.constants for r, rep in reports.items()}
    csv_text = _csv(["a", "b", "u", "v", "x", "y", "z"], [[a, b, u, v, *t] for t in sols.solutions])
    text = (f"system x^2 - {a} y^2 = {u}, z^2 - {b} y^2 = {v}, y <= {cap}\n"
            + "".join(f"  {t}\n" for t in sols.solutions)
            + f"certified complete: {certified}\n"
            + "".join(f"log10 bound on max(x,y,z) via {r}: {_num(rep.log10_X_bound, 6)}\n"
                      for r, rep in reports.items()))
    return {"a": a, "b": b, "u": u, "v": v, "y_cap": cap, "route": args.route}, outputs, derived, csv_text, text


def cmd_exponent(args, cfg):
    a, b = args.a, args.b
    routes = ["thm21", "thm22"] if args.route == "both" else [args.route]
    reports = [exponent_report(a, b, r) for r in routes]
    outputs = {"reports": reports}
    derived = {r.route: r.record["constants"] for r in reports}
    csv_text = _csv(["a", "b", "route", "tau", "mu_eff_upper", "regulator_product"],
                    [[a, b, r.route, _num(r.tau), _mu_text(r), _num(r.regulator_product)]
                     for r in reports])
    text = "".join(f"({a}, {b}) {r.route}: tau = {_num(r.tau, 8)}, mu_eff <= 2 - tau\n" for r in reports)
    return {"a": a, "b": b, "route": args.route}, outputs, derived, csv_text, text


def _verify_row(rep):
    return [rep.a, rep.b, str(rep.c), str(rep.mu), rep.q_max, rep.passed,
            " ".join(map(str, rep.violations[:20])), " ".join(map(str, rep.undecided[:20])),
            _num(rep.observed_constant)]


def cmd_verify(args, cfg):
    q_max = args.qmax or cfg.q_max
    rep = verify_inequality(args.a, args.b, args.c, args.mu, q_max)
    csv_text = _csv(["a", "b", "c", "mu", "q_max", "passed", "violations", "undecided", "observed_constant"],
                    [_verify_row(rep)])
    text = (f"max(||q√{args.a}||, ||q√{args.b}||) > {args.c} q^-({args.mu} - 1) for q <= {q_max}: "
            f"{'pass' if rep.passed else 'FAIL'}\n"
            + (f"  first witness q = {rep.witness}\n" if rep.witness else ""))
    inputs = {"a": args.a, "b": args.b, "c": args.c, "mu": args.mu, "q_max": q_max}
    code = PrecisionCeilingError.exit_code if rep.undecided else 0
    return inputs, {"report": rep}, {}, csv_text, text, code


def cmd_records(args, cfg):
    q_max = args.qmax or cfg.q_max
    recs = best_records(args.a, args.b, q_max)
    text = "".join(f"q = {r.q}: max dist {_num(r.max_dist(), 10)}\n" for r in recs)
    return {"a": args.a, "b": args.b, "q_max": q_max}, {"records": recs}, {}, records_to_csv(recs), text


def cmd_sweep(args, cfg):
    q_max = args.qmax or cfg.q_max
    rows, outputs, undecided = [], [], False
    for a in _parse_range(args.a):
        for b in _parse_range(args.b):
            if b <= a and not args.all_pairs:
                continue
            try:
                check_pair(a, b)
            except InvalidInput as exc:
                rows.append([a, b, False, str(exc), args.route, "", "", "", ""])
                outputs.append({"a": a, "b": b, "admissible": False, "reason": str(exc)})
                continue
            er = exponent_report(a, b, args.route)
            vr = verify_inequality(a, b, args.c, args.mu, q_max)
            undecided = undecided or bool(vr.undecided)
            rows.append([a, b, True, "", args.route, _num(er.tau), _mu_text(er),
                         vr.passed, _num(vr.observed_constant)])
            outputs.append({"a": a, "b": b, "admissible": True, "exponent": er, "verify": vr})
    header = ["a", "b", "admissible", "reason", "route", "tau", "mu_eff_upper", "verify_passed",
              "observed_constant"]
    csv_text = _csv(header, rows)
    inputs = {"a": args.a, "b": args.b, "q_max": q_max, "c": args.c, "mu": args.mu, "route": args.route}
    code = PrecisionCeilingError.exit_code if undecided else 0
    return inputs, {"pairs": outputs}, {}, csv_text, csv_text, code


def cmd_probe(args, cfg):
    rng = random.Random(cfg.seed)
    probes = solution_probes(args.a, args.b, args.count, rng, y_max=args.ymax)
    out = [{"solution": p.solution, "u": p.context.u, "v": p.context.v, "indices": p.indices,
            "lambda": p.value, "chain": p.chain} for p in probes]
    rows = [[args.a, args.b, p.context.u, p.context.v, *p.solution, p.indices[2], p.indices[3],
             _num(p.value.lam), p.chain.passed] for p in probes]
    csv_text = _csv(["a", "b", "u", "v", "x", "y", "z", "m", "n", "lambda", "chain_passed"], rows)
    passed = sum(p.chain.passed for p in probes)
    text = f"{passed}/{len(probes)} probes satisfy the inequality chain\n"
    inputs = {"a": args.a, "b": args.b, "count": args.count, "y_max": args.ymax, "seed": cfg.seed}
    return inputs, {"probes": out}, {}, csv_text, text


COMMANDS = {
    "unit": cmd_unit,
    "pell": cmd_pell,
    "system": cmd_system,
    "exponent": cmd_exponent,
    "verify": cmd_verify,
    "records": cmd_records,
    "sweep": cmd_sweep,
    "probe": cmd_probe,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, dest="output_format", help="output format")
    common.add_argument("--config", help="key = value file overriding defaults")
    common.add_argument("--precision-start", type=int, help="starting interval precision in bits")
    common.add_argument("--precision-ceiling", type=int, help="maximum interval precision in bits")
    common.add_argument("--seed", type=int, help="seed for randomized probes")
    common.add_argument("--timing", action="store_true", help="record wall time (breaks byte-identity)")

    parser = argparse.ArgumentParser(
        prog="pellapprox",
        description="Quadratic units, Pellian systems and effective simultaneous approximation.",
        epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common], epilog=CSV_HELP,
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    p = add("unit", "totally positive unit and regulator of Z[sqrt D]")
    p.add_argument("D", type=int)

    p = add("pell", "solve x^2 - D y^2 = N up to a y cap")
    p.add_argument("D", type=int)
    p.add_argument("N", type=int)
    p.add_argument("--cap", type=int)

    p = add("system", "solve x^2 - a y^2 = u, z^2 - b y^2 = v")
    for name in ("a", "b", "u", "v"):
        p.add_argument(name, type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--route", choices=("thm21", "thm22", "both"), default="both")

    p = add("exponent", "effective exponent bound 2 - tau for (sqrt a, sqrt b)")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--route", choices=("thm21", "thm22", "both"), default="both")

    p = add("verify", "check max(||q sqrt a||, ||q sqrt b||) > c q^(1 - mu) for q <= qmax")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--c", required=True, help="positive rational, e.g. 1e-7 or 1/3")
    p.add_argument("--mu", required=True, help="rational exponent > 1, e.g. 1.913")
    p.add_argument("--qmax", type=int)

    p = add("records", "record minima of max(||q sqrt a||, ||q sqrt b||)")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--qmax", type=int)

    p = add("sweep", "exponent and verify over a rectangle of pairs (CSV)")
    p.add_argument("--a", required=True, help="range like 2..10")
    p.add_argument("--b", required=True, help="range like 2..10")
    p.add_argument("--qmax", type=int)
    p.add_argument("--c", default="1e-7")
    p.add_argument("--mu", default="1.95")
    p.add_argument("--route", choices=("thm21", "thm22"), default="thm22")
    p.add_argument("--all-pairs", action="store_true", help="include b <= a")

    p = add("probe", "random solution-derived Lambda probes for the pair (a, b)")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--ymax", type=int, default=200)
    return parser


def _validate_rationals(args):
    from fractions import Fraction

    for name in ("c", "mu"):
        if hasattr(args, name):
            try:
                Fraction(getattr(args, name))
            except (ValueError, ZeroDivisionError):
                raise InvalidInput(f"--{name} must be a rational number, got {getattr(args, name)!r}") from None


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(
            args.config,
            precision_start=args.precision_start,
            precision_ceiling=args.precision_ceiling,
            output_format=args.output_format,
            seed=args.seed,
        )
        _validate_rationals(args)
        fmt = cfg.output_format
        if args.command == "sweep" and args.output_format is None:
            fmt = "csv"
        started = time.perf_counter()
        with precision_policy(cfg.precision_start, cfg.precision_ceiling):
            inputs, outputs, derived, csv_text, text, code = CommandResult(*COMMANDS[args.command](args, cfg))
            timing = {"seconds": f"{time.perf_counter() - started:.3f}"} if args.timing else None
            if fmt == "json":
                inputs = {**inputs, "config": _config_dict(cfg)}
                stdout.write(dumps(envelope(args.command, inputs, outputs, derived, timing)))
            elif fmt == "csv":
                stdout.write(csv_text)
            else:
                stdout.write(text)
    except PellApproxError as exc:
        _error(stderr, exc, exc.exit_code)
        return exc.exit_code
    except (ValueError, ArithmeticError) as exc:
        _error(stderr, exc, InvalidInput.exit_code)
        return InvalidInput.exit_code
    except Exception as exc:  # noqa: BLE001 - anything else is a bug
        _error(stderr, exc, InvariantViolation.exit_code)
        return InvariantViolation.exit_code
    return code


def _config_dict(cfg: RunConfig) -> dict:
    return {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}


def _error(stream, exc, code):
    stream.write(json.dumps({"error": type(exc).__name__, "reason": str(exc), "exit_code": code}) + "\n")


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
