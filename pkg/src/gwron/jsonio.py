"""JSON wire formats: complex numbers as [re, im] pairs, polynomials as
coefficient lists ascending in degree."""

from __future__ import annotations

import json

import numpy as np

from .master import ExponentSpec, MasterSpec, TuplePoint, spec_from_exponents
from .polyops import Poly, RatFn, ScalarDiffOp
from .solver import SolveReport


def complex_to_json(c) -> list:
    c = complex(c)
    return [c.real, c.imag]


def complex_from_json(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    return complex(v[0], v[1])


def poly_to_json(p: Poly) -> list:
    return [complex_to_json(c) for c in p.coeffs]


def poly_from_json(v) -> Poly:
    return Poly([complex_from_json(c) for c in v])


def ratfn_to_json(f: RatFn) -> dict:
    return {"num": poly_to_json(f.num), "den": poly_to_json(f.den)}


def ratfn_from_json(v) -> RatFn:
    return RatFn(poly_from_json(v["num"]), poly_from_json(v["den"]))


def op_to_json(op: ScalarDiffOp) -> dict:
    return {"order": op.order, "coeffs": [ratfn_to_json(c) for c in op.coeffs]}


def op_from_json(v) -> ScalarDiffOp:
    return ScalarDiffOp(int(v["order"]), tuple(ratfn_from_json(c) for c in v["coeffs"]))


def masterspec_to_json(spec: MasterSpec) -> dict:
    out = {
        "r": spec.r,
        "gram": [[float(v) for v in row] for row in spec.gram],
        "weights": [[float(v) for v in row] for row in spec.weights],
        "z": [complex_to_json(z) for z in spec.z],
        "l": list(spec.l),
    }
    if spec.d is not None:
        out["d"] = list(spec.d)
    return out


def spec_from_json(v) -> MasterSpec:
    """Accepts either a full MasterSpec dict or an exponent dict {"d", "z"}."""
    if "r" not in v and "d" in v:
        return spec_from_exponents(ExponentSpec(tuple(v["d"])),
                                   [complex_from_json(z) for z in v["z"]])
    return MasterSpec(
        r=int(v["r"]),
        gram=np.array(v["gram"], dtype=float),
        weights=np.array(v["weights"], dtype=float),
        z=np.array([complex_from_json(z) for z in v["z"]], dtype=complex),
        l=tuple(v["l"]),
        d=tuple(v["d"]) if v.get("d") is not None else None,
    )


def tuple_to_json(t: TuplePoint) -> dict:
    return {"groups": [[complex_to_json(c) for c in g] for g in t.groups]}


def tuple_from_json(v) -> TuplePoint:
    return TuplePoint(tuple(tuple(complex_from_json(c) for c in g)
                            for g in v["groups"]))


def report_to_json(report: SolveReport, reality=None, conjugation=None) -> dict:
    orbits = []
    for k, o in enumerate(report.orbits):
        entry = {
            "groups": [[complex_to_json(c) for c in g] for g in o.rep.groups],
            "residual_norm": o.residual_norm,
            "newton_iters": o.newton_iters,
        }
        if reality is not None:
            entry["real"] = bool(reality[k])
        if conjugation is not None:
            entry["conjugation_invariant"] = bool(conjugation[k])
        orbits.append(entry)
    return {
        "orbits": orbits,
        "target_count": report.target_count,
        "seeds_tried": report.seeds_tried,
        "failures": report.failures,
    }


def dump(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
