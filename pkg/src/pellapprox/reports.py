"""JSON encoding of every result type, and decoding back to the same objects.

Numbers are written as decimal strings so nothing is truncated by JSON's
float type.  Intervals are ``{lo, hi, bits}`` with exact decimal endpoints,
quadratic elements are ``{x, y, D}``.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import __version__
from .approx import ApproxRecord, Distance, ExponentReport, VerifyReport
from .intervals import IntervalReal
from .intervals import from_json as interval_from_json
from .intervals import to_json as interval_to_json
from .pell import GeneratedSolution, PellClassRep
from .quadratic import QuadElement, Unit
from .system import (
    ChainReport,
    EffectiveBoundReport,
    LinearFormValue,
    SolutionSet,
    SymbolicBound,
    SystemContext,
)

__all__ = ["encode", "dumps", "envelope", "decode"]


def _opt(value):
    return None if value is None else encode(value)


def encode(obj):
    """Convert a result object (or nested containers of them) to JSON-ready data."""
    if obj is None or isinstance(obj, (str, bool)):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, IntervalReal):
        return interval_to_json(obj)
    if isinstance(obj, QuadElement):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, Unit):
        return {
            "type": "Unit",
            "element": encode(obj.element),
            "norm": encode(obj.norm),
            "regulator": encode(obj.regulator),
            "totally_positive": obj.totally_positive,
        }
    if isinstance(obj, PellClassRep):
        return {"type": "PellClassRep", "alpha": encode(obj.alpha), "D": encode(obj.D),
                "N": encode(obj.N), "unit": encode(obj.unit)}
    if isinstance(obj, GeneratedSolution):
        return {"type": "GeneratedSolution", "x": encode(obj.x), "y": encode(obj.y),
                "class_index": encode(obj.class_index), "power": encode(obj.power)}
    if isinstance(obj, SystemContext):
        return {
            "type": "SystemContext",
            "a": encode(obj.a), "b": encode(obj.b), "u": encode(obj.u), "v": encode(obj.v),
            "eps": encode(obj.eps), "eta": encode(obj.eta), "U": encode(obj.U),
            "U0": {"value": encode(obj.U0_value), "source": obj.U0_source, "interval": encode(obj.U0)},
            "alpha_reps": encode(obj.alpha_reps), "beta_reps": encode(obj.beta_reps),
        }
    if isinstance(obj, LinearFormValue):
        return {"type": "LinearFormValue", "lambda": encode(obj.lam), "m": encode(obj.m),
                "n": encode(obj.n), "rep_pair": encode(obj.rep_pair), "form_used": obj.form_used,
                "direct": encode(obj.direct), "conjugate": _opt(obj.conjugate)}
    if isinstance(obj, ChainReport):
        return {
            "type": "ChainReport", "m": encode(obj.m), "n": encode(obj.n),
            "consistent": obj.consistent, "log_lambda": _opt(obj.log_lambda),
            "large_exponents": obj.large_exponents, "lambda_vs_eta": obj.lambda_vs_eta,
            "exponent_gap": obj.exponent_gap, "lambda_vs_max": obj.lambda_vs_max,
            "lambda_vs_half_max": obj.lambda_vs_half_max, "passed": obj.passed,
        }
    if isinstance(obj, SymbolicBound):
        return {"type": "SymbolicBound", "log_C": encode(obj.log_C), "exponent": encode(obj.exponent),
                "factors": encode(obj.factors)}
    if isinstance(obj, EffectiveBoundReport):
        return {
            "type": "EffectiveBoundReport", "route": obj.route,
            "bound_on_max_mn": encode(obj.bound_on_max_mn), "X_log_bound": encode(obj.X_log_bound),
            "log10_X_bound": encode(obj.log10_X_bound), "constants": encode(obj.constants),
            "symbolic": encode(obj.symbolic),
        }
    if isinstance(obj, SolutionSet):
        return {
            "type": "SolutionSet", "solutions": encode(obj.solutions), "y_cap": encode(obj.y_cap),
            "complete_under_cap": obj.complete_under_cap, "certified_complete": obj.certified_complete,
            "log10_effective_bound": _opt(obj.log10_effective_bound),
        }
    if isinstance(obj, Distance):
        return {"type": "Distance", "q": encode(obj.q), "a": encode(obj.a),
                "floor_root": encode(obj.floor_root), "nearest": encode(obj.nearest),
                "value": encode(obj.value)}
    if isinstance(obj, ApproxRecord):
        return {"type": "ApproxRecord", "q": encode(obj.q), "dist_a": encode(obj.dist_a),
                "dist_b": encode(obj.dist_b), "max_dist": encode(obj.max_dist()),
                "local_exponent": _opt(obj.local_exponent)}
    if isinstance(obj, ExponentReport):
        return {
            "type": "ExponentReport", "a": encode(obj.a), "b": encode(obj.b), "route": obj.route,
            "tau": encode(obj.tau), "mu_eff_upper": encode(obj.mu_eff_upper),
            "regulator_product": encode(obj.regulator_product), "constant": encode(obj.constant),
            "log_star_factor": _opt(obj.log_star_factor),
            "sqrt_form_denominator": _opt(obj.sqrt_form_denominator),
        }
    if isinstance(obj, VerifyReport):
        return {
            "type": "VerifyReport", "a": encode(obj.a), "b": encode(obj.b), "c": encode(obj.c),
            "mu": encode(obj.mu), "q_max": encode(obj.q_max), "passed": obj.passed,
            "violations": encode(obj.violations), "undecided": encode(obj.undecided),
            "worst": [{"q": encode(q), "ratio": encode(r)} for q, r in obj.worst],
            "observed_constant": _opt(obj.observed_constant),
        }
    raise TypeError(f"no JSON encoding for {type(obj).__name__}")


def dumps(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def envelope(command: str, inputs: dict, outputs, derived_constants=None, timing=None) -> dict:
    return {
        "command": command,
        "inputs": encode(inputs),
        "outputs": encode(outputs),
        "derived_constants": encode(derived_constants or {}),
        "timing": timing,
        "version": __version__,
    }


# -- decoding ------------------------------------------------------------------

def _int(s) -> int:
    return int(s)


def _iv(obj):
    return None if obj is None else interval_from_json(obj)


def _quad(obj) -> QuadElement:
    return QuadElement.from_json(obj)


def _int_or_quad(obj):
    return _quad(obj) if isinstance(obj, dict) else _int(obj)


def _decode_value(obj):
    """Decode a constants/factors entry: interval dict or plain string."""
    if isinstance(obj, dict) and set(obj) == {"lo", "hi", "bits"}:
        return interval_from_json(obj)
    return obj


def decode(obj):
    """Rebuild the object that :func:`encode` produced ``obj`` from."""
    if isinstance(obj, list):
        return [decode(o) for o in obj]
    if not isinstance(obj, dict):
        return obj
    if set(obj) == {"lo", "hi", "bits"}:
        return interval_from_json(obj)
    if set(obj) == {"x", "y", "D"}:
        return _quad(obj)
    kind = obj.get("type")
    if kind == "Unit":
        return Unit(_quad(obj["element"]), _int(obj["norm"]), _iv(obj["regulator"]),
                    obj["totally_positive"])
    if kind == "PellClassRep":
        return PellClassRep(_quad(obj["alpha"]), _int(obj["D"]), _int(obj["N"]), decode(obj["unit"]))
    if kind == "GeneratedSolution":
        return GeneratedSolution(_int(obj["y"]), _int(obj["x"]), _int(obj["class_index"]),
                                 _int(obj["power"]))
    if kind == "SystemContext":
        return SystemContext(
            _int(obj["a"]), _int(obj["b"]), _int(obj["u"]), _int(obj["v"]),
            decode(obj["eps"]), decode(obj["eta"]), _int(obj["U"]),
            _int_or_quad(obj["U0"]["value"]), obj["U0"]["source"],
            tuple(decode(r) for r in obj["alpha_reps"]), tuple(decode(r) for r in obj["beta_reps"]),
        )
    if kind == "LinearFormValue":
        return LinearFormValue(_iv(obj["lambda"]), _int(obj["m"]), _int(obj["n"]),
                               tuple(_int(i) for i in obj["rep_pair"]), obj["form_used"],
                               _iv(obj["direct"]), _iv(obj["conjugate"]))
    if kind == "ChainReport":
        return ChainReport(_int(obj["m"]), _int(obj["n"]), obj["consistent"], _iv(obj["log_lambda"]),
                           obj["large_exponents"], obj["lambda_vs_eta"], obj["exponent_gap"],
                           obj["lambda_vs_max"], obj["lambda_vs_half_max"])
    if kind == "SymbolicBound":
        return SymbolicBound(_iv(obj["log_C"]), _iv(obj["exponent"]),
                             {k: _decode_value(v) for k, v in obj["factors"].items()})
    if kind == "EffectiveBoundReport":
        return EffectiveBoundReport(obj["route"], _iv(obj["bound_on_max_mn"]), _iv(obj["X_log_bound"]),
                                    {k: _decode_value(v) for k, v in obj["constants"].items()},
                                    decode(obj["symbolic"]))
    if kind == "SolutionSet":
        sols = tuple(tuple(_int(c) for c in t) for t in obj["solutions"])
        return SolutionSet(sols, _int(obj["y_cap"]), obj["complete_under_cap"],
                           obj["certified_complete"], _iv(obj["log10_effective_bound"]))
    if kind == "Distance":
        return Distance(_int(obj["q"]), _int(obj["a"]), _int(obj["floor_root"]), _int(obj["nearest"]))
    if kind == "ApproxRecord":
        return ApproxRecord(_int(obj["q"]), decode(obj["dist_a"]), decode(obj["dist_b"]),
                            _iv(obj["local_exponent"]))
    if kind == "ExponentReport":
        return ExponentReport(_int(obj["a"]), _int(obj["b"]), obj["route"], _iv(obj["tau"]),
                              _iv(obj["mu_eff_upper"]), _iv(obj["regulator_product"]),
                              _iv(obj["constant"]), _iv(obj["log_star_factor"]),
                              _iv(obj["sqrt_form_denominator"]))
    if kind == "VerifyReport":
        return VerifyReport(
            _int(obj["a"]), _int(obj["b"]), Fraction(obj["c"]), Fraction(obj["mu"]), _int(obj["q_max"]),
            [_int(q) for q in obj["violations"]], [_int(q) for q in obj["undecided"]],
            [(_int(w["q"]), _iv(w["ratio"])) for w in obj["worst"]], _iv(obj["observed_constant"]),
        )
    return {k: decode(v) for k, v in obj.items()}
