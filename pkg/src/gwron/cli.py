"""Command-line pipeline: count, solve, verify, gaudin, bethe, report.

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 usage or
configuration error.  All file I/O is UTF-8 JSON with complex numbers as
[re, im] pairs; reports embed the config so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bethe as bethe_mod
from . import gaudin as gaudin_mod
from . import jsonio
from .errors import GwronError
from .master import ExponentSpec, spec_from_exponents
from .polyops import Poly, monic_wronskian, polynomial_kernel
from .rep import multiplicity_N, singular_subspace
from .solver import SolveStrategy, conjugation_check, reality_check, solve_all

DEFAULT_TOLS = {
    "reality": 1e-8,
    "wronskian": 1e-8,
    "commute": 1e-10,
    "shapovalov": 1e-11,
    "eigen": 1e-9,
    "separation": 1e-6,
}

ALL_CHECKS = ("commute", "shapovalov", "spectrum", "monodromy")


@dataclass
class RunConfig:
    subcommand: str
    spec_path: str = None
    seeds: int = 2000
    rng_seed: int = 0
    jobs: int = 1
    out: str = None
    checks: tuple = ALL_CHECKS
    tols: dict = field(default_factory=lambda: dict(DEFAULT_TOLS))

    def as_json(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "spec": self.spec_path,
            "seeds": self.seeds,
            "rng_seed": self.rng_seed,
            "jobs": self.jobs,
            "checks": list(self.checks),
            "tolerances": {k: self.tols[k] for k in sorted(self.tols)},
        }


class ConfigError(Exception):
    pass


def _parse_tols(pairs) -> dict:
    tols = dict(DEFAULT_TOLS)
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"bad --tol {item!r}: expected NAME=VALUE")
        name, _, val = item.partition("=")
        if name not in DEFAULT_TOLS:
            raise ConfigError(f"unknown tolerance {name!r}; known: {sorted(DEFAULT_TOLS)}")
        try:
            fval = float(val)
        except ValueError:
            raise ConfigError(f"tolerance {name} is not a number: {val!r}")
        if not fval > 0:
            raise ConfigError(f"tolerance {name} must be positive, got {fval}")
        tols[name] = fval
    return tols


def _jobs_default(cli_value) -> int:
    env = os.environ.get("GW_JOBS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"GW_JOBS is not an integer: {env!r}")
    if cli_value is not None:
        return max(1, cli_value)
    return os.cpu_count() or 1


def _load_spec(path):
    try:
        data = jsonio.load(path)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read spec {path}: {e}")
    try:
        return jsonio.spec_from_json(data)
    except (KeyError, ValueError, TypeError, GwronError) as e:
        raise ConfigError(f"malformed spec {path}: {e}")


def _emit(payload, out_path):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _parse_d(text) -> ExponentSpec:
    try:
        return ExponentSpec(tuple(int(v) for v in text.split(",")))
    except (ValueError, GwronError) as e:
        raise ConfigError(f"bad --d {text!r}: {e}")


def cmd_count(args) -> int:
    dspec = _parse_d(args.d)
    payload = {"d": list(dspec.d), "n": dspec.n, "l": list(dspec.l),
               "N": multiplicity_N(dspec)}
    _emit(payload, args.out)
    return 0


def cmd_solve(args) -> int:
    config = RunConfig("solve", args.spec, args.seeds, args.rng,
                       _jobs_default(args.jobs), args.out)
    spec = _load_spec(args.spec)
    report = solve_all(spec, SolveStrategy(config.seeds, config.rng_seed,
                                           jobs=config.jobs))
    real_flags = conj_flags = None
    if np.abs(spec.z.imag).max(initial=0.0) == 0.0:
        conj_flags = conjugation_check(report, spec)
        if spec.d is not None:
            real_flags = reality_check(report, spec)
    payload = jsonio.report_to_json(report, real_flags, conj_flags)
    payload["config"] = config.as_json()
    _emit(payload, args.out)
    return 0


def _verify_payload(spec, config) -> dict:
    """Runs the full pipeline; returns the report dict with per-check passes."""
    tols = config.tols
    checks = {}
    findings = []

    if spec.d is None:
        raise ConfigError("verify needs a spec with exponent origin (d)")
    if np.abs(spec.z.imag).max(initial=0.0) != 0.0:
        raise ConfigError("verify needs real z")
    dspec = ExponentSpec(spec.d)
    target = multiplicity_N(dspec)

    report = solve_all(spec, SolveStrategy(config.seeds, config.rng_seed,
                                           jobs=config.jobs))
    checks["orbit_count"] = {"found": len(report.orbits), "expected": target,
                             "pass": len(report.orbits) == target}

    real_flags = reality_check(report, spec, tols["reality"])
    conj_flags = conjugation_check(report, spec)
    checks["reality"] = {"flags": real_flags, "pass": all(real_flags)}
    checks["conjugation"] = {"flags": conj_flags, "pass": all(conj_flags)}

    # Wronskian round-trip per orbit
    target_w = Poly.from_roots(spec.z)
    wr_errs = []
    from .master import fundamental_op_typeA
    for o in report.orbits:
        D = fundamental_op_typeA(o.rep, spec)
        ker = polynomial_kernel(D, max(spec.d))
        w = monic_wronskian(ker)
        err = float(np.abs(np.pad(w.coeffs, (0, max(0, target_w.coeffs.size - w.coeffs.size)))
                           - target_w.coeffs).max() /
                    max(np.abs(target_w.coeffs).max(), 1.0)) if w.coeffs.size <= target_w.coeffs.size else 1.0
        wr_errs.append(err)
    checks["wronskian"] = {"errors": wr_errs,
                           "pass": all(e <= tols["wronskian"] for e in wr_errs)}

    rep = bethe_mod.default_rep(spec)
    rng = np.random.default_rng(config.rng_seed + 1)
    M = gaudin_mod.build_M(rep, spec.z)
    K = gaudin_mod.build_K(M)
    sub = singular_subspace(rep, dspec.lam)
    samples = gaudin_mod.sample_points(spec.z, 5, rng)
    real_samples = gaudin_mod.sample_points(spec.z, 5, rng, real=True)

    eig_resids = []
    for o in report.orbits:
        w = bethe_mod.weight_function(spec, o.rep, rep)
        eig_resids.append(gaudin_mod.eigenvalue_match(K, w, o.rep, spec, samples))
    checks["eigenvalue"] = {"residuals": eig_resids,
                            "pass": all(e <= tols["eigen"] for e in eig_resids)}

    basis = bethe_mod.bethe_basis_check(spec, report.orbits, rep)
    checks["bethe_basis"] = {"rank": basis.rank, "expected": basis.expected,
                             "pass": basis.passed}

    cd = max(gaudin_mod.commutation_defect(K, u, v, sub)
             for u, v in zip(samples, samples[1:] + samples[:1]))
    checks["commute"] = {"defect": cd, "pass": cd <= tols["commute"]}

    sd = max(gaudin_mod.shapovalov_defect(K, x) for x in real_samples)
    checks["shapovalov"] = {"defect": sd, "pass": sd <= tols["shapovalov"]}

    checks["real_spectrum"] = {"pass": gaudin_mod.real_spectrum_check(K, sub, real_samples)}
    checks["simple_spectrum"] = {
        "pass": gaudin_mod.simple_spectrum_check(K, sub, real_samples, rng,
                                                 tols["separation"])}

    for name, result in checks.items():
        if not result["pass"]:
            findings.append(name)
    payload = jsonio.report_to_json(report, real_flags, conj_flags)
    payload["checks"] = checks
    payload["failed_checks"] = findings
    payload["pass"] = not findings
    return payload


def cmd_verify(args) -> int:
    config = RunConfig("verify", args.spec, args.seeds, args.rng,
                       _jobs_default(args.jobs), args.out,
                       tols=_parse_tols(args.tol))
    spec = _load_spec(args.spec)
    payload = _verify_payload(spec, config)
    payload["config"] = config.as_json()
    _emit(payload, args.out)
    return 0 if payload["pass"] else 1


def cmd_gaudin(args) -> int:
    checks = tuple(args.checks.split(",")) if args.checks else ALL_CHECKS
    for c in checks:
        if c not in ALL_CHECKS:
            raise ConfigError(f"unknown check {c!r}; known: {list(ALL_CHECKS)}")
    config = RunConfig("gaudin", args.spec, rng_seed=args.rng,
                       jobs=_jobs_default(args.jobs), out=args.out,
                       checks=checks, tols=_parse_tols(args.tol))
    spec = _load_spec(args.spec)
    rep = bethe_mod.default_rep(spec)
    rng = np.random.default_rng(config.rng_seed + 1)
    K = gaudin_mod.build_K(gaudin_mod.build_M(rep, spec.z))
    results = {}
    samples = gaudin_mod.sample_points(spec.z, 5, rng)
    real_samples = gaudin_mod.sample_points(spec.z, 5, rng, real=True)
    if "commute" in checks:
        cd = max(gaudin_mod.commutation_defect(K, u, v)
                 for u, v in zip(samples, samples[1:] + samples[:1]))
        results["commute"] = {"defect": cd, "pass": cd <= config.tols["commute"]}
    if "shapovalov" in checks:
        sd = max(gaudin_mod.shapovalov_defect(K, x) for x in real_samples)
        results["shapovalov"] = {"defect": sd,
                                 "pass": sd <= config.tols["shapovalov"]}
    if "spectrum" in checks:
        mu = bethe_mod._mu_coords(spec)
        sub = singular_subspace(rep, mu)
        ok_real = gaudin_mod.real_spectrum_check(K, sub, real_samples)
        ok_simple = gaudin_mod.simple_spectrum_check(K, sub, real_samples, rng,
                                                     config.tols["separation"])
        results["spectrum"] = {"real": ok_real, "simple": ok_simple,
                               "pass": ok_real and ok_simple}
    if "monodromy" in checks:
        bound = spec.n + spec.r + 2
        dim = gaudin_mod.polynomial_solutions_check(K, bound)
        expect = (spec.r + 1) * rep.dim
        results["monodromy"] = {"polynomial_solution_dim": dim, "expected": expect,
                                "pass": dim == expect}
    payload = {"checks": results, "config": config.as_json(),
               "pass": all(v["pass"] for v in results.values())}
    _emit(payload, args.out)
    return 0 if payload["pass"] else 1


def cmd_bethe(args) -> int:
    spec = _load_spec(args.spec)
    try:
        t = jsonio.tuple_from_json(jsonio.load(args.t))
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read tuple {args.t}: {e}")
    vec = bethe_mod.weight_function(spec, t)
    payload = {"coords": [jsonio.complex_to_json(c) for c in vec.coords],
               "weight": list(vec.weight)}
    _emit(payload, args.out)
    return 0


def cmd_report(args) -> int:
    try:
        data = jsonio.load(args.infile)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read report {args.infile}: {e}")
    orbits = data.get("orbits", [])
    lines = []
    lines.append(f"orbits found: {len(orbits)}"
                 + (f" (target {data['target_count']})" if "target_count" in data else ""))
    if not orbits:
        lines.append("  (empty report)")
    for k, o in enumerate(orbits):
        lines.append(f"orbit {k}:")
        for gi, g in enumerate(o.get("groups", [])):
            pts = ", ".join(f"{c[0]:+.6g}{c[1]:+.6g}i" for c in g)
            lines.append(f"  color {gi + 1}: [{pts}]")
        extras = []
        if "residual_norm" in o:
            extras.append(f"residual {o['residual_norm']:.2e}")
        if "real" in o:
            extras.append(f"real={o['real']}")
        if "conjugation_invariant" in o:
            extras.append(f"conj={o['conjugation_invariant']}")
        if extras:
            lines.append("  " + "  ".join(extras))
    if "checks" in data:
        lines.append("checks:")
        for name in sorted(data["checks"]):
            res = data["checks"][name]
            lines.append(f"  {name}: {'pass' if res.get('pass') else 'FAIL'}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gwron",
                                description="Bethe-ansatz pipeline for Wronskians "
                                            "and Gaudin spectra")
    sub = p.add_subparsers(dest="subcommand", required=True)

    c = sub.add_parser("count", help="multiplicity N(d) for exponents d")
    c.add_argument("--d", required=True, help="comma-separated exponents, e.g. 1,2")
    c.add_argument("--out")
    c.set_defaults(func=cmd_count)

    s = sub.add_parser("solve", help="find all critical-point orbits")
    s.add_argument("--spec", required=True)
    s.add_argument("--seeds", type=int, default=2000)
    s.add_argument("--rng", type=int, default=0)
    s.add_argument("--jobs", type=int, default=None)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="end-to-end verification pipeline")
    v.add_argument("--spec", required=True)
    v.add_argument("--seeds", type=int, default=2000)
    v.add_argument("--rng", type=int, default=0)
    v.add_argument("--jobs", type=int, default=None)
    v.add_argument("--tol", action="append", metavar="NAME=VALUE")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gaudin", help="spectral checks for the Gaudin operators")
    g.add_argument("--spec", required=True)
    g.add_argument("--checks", default=",".join(ALL_CHECKS))
    g.add_argument("--rng", type=int, default=0)
    g.add_argument("--jobs", type=int, default=None)
    g.add_argument("--tol", action="append", metavar="NAME=VALUE")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gaudin)

    b = sub.add_parser("bethe", help="evaluate the universal weight function")
    b.add_argument("--spec", required=True)
    b.add_argument("--t", required=True, help="tuple JSON {\"groups\": [[..]]}")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bethe)

    r = sub.add_parser("report", help="human-readable summary of a report")
    r.add_argument("--in", dest="infile", required=True)
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except GwronError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
