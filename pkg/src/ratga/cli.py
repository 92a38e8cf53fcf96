"""Command line interface.

Every mathematical outcome, including negative ones, exits 0 with a JSON
verdict on stdout.  Exit code 2 means the input could not be read, parsed
or validated.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass, fields

from . import flow as flows
from .arith import DegenerateSubstitution
from .derivation import NonPolynomialImage, lnd_check
from .flow import FlowError
from .io import (InputError, derivation_from_json, fan_from_json, flow_from_json, flow_to_json,
                 load_json, parse_vector)
from .parser import GRAMMAR, EvalError, ParseError, parse_expr, render
from .toric import HomogDeriv, enumerate_roots, regular_on_fan, semi_affine

CONFIG_ENV = "GA_KERNEL_CONFIG"


@dataclass
class CliConfig:
    detect_degree: int = 8
    series_order: int | None = None  # defaults to 2 * detect_degree + 4
    lnd_cap: int = 64
    root_bound: int = 5
    trust_fan: bool = False
    samples: int = 512
    output: str = "json"
    threads: int = 1

    def validate(self):
        if self.series_order is None:
            self.series_order = flows.min_order(self.detect_degree)
        for name in ("detect_degree", "series_order", "lnd_cap", "root_bound", "samples", "threads"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise InputError(f"config value {name} must be a positive integer")
        if self.series_order < flows.min_order(self.detect_degree):
            raise InputError(
                f"series_order must be at least 2*detect_degree+4 = {flows.min_order(self.detect_degree)}")
        if self.output not in ("json", "pretty"):
            raise InputError("output must be 'json' or 'pretty'")
        return self


def load_config(args) -> CliConfig:
    base = {}
    path = os.environ.get(CONFIG_ENV)
    if path:
        base = load_json(path)
        known = {f.name for f in fields(CliConfig)}
        unknown = sorted(set(base) - known)
        if unknown:
            raise InputError(f"{CONFIG_ENV}: unknown keys {unknown}")
    cfg = CliConfig(**base)
    for f in fields(CliConfig):
        value = getattr(args, f.name, None)
        if value is not None and value is not False:
            setattr(cfg, f.name, value)
    return cfg.validate()


def _certificate(d, flow):
    try:
        unit = flows.unit_check(flow)
        ode = flows.ode_check(d, flow)
    except DegenerateSubstitution:
        return {"ode": False, "unit": False}, True
    return {"ode": ode, "unit": unit}, False


def cmd_exp(args, cfg):
    d = derivation_from_json(load_json(args.derivation))
    f = _parse(args.function, d.ctx)
    order = args.order if args.order is not None else cfg.series_order
    if order < 0:
        raise InputError("order must be non-negative")
    return [render(c) for c in flows.exp_coeffs(d, f, order)]


def cmd_integrable(args, cfg):
    d = derivation_from_json(load_json(args.derivation))
    verdict = flows.integrability_check(d, cfg.detect_degree, cfg.series_order)
    out = {"status": verdict.status, "flow": None, "slice": None, "certificate": None,
           "detect_degree": cfg.detect_degree}
    if verdict.flow is not None:
        out["flow"] = flow_to_json(verdict.flow)
        out["certificate"] = {"ode": True, "unit": True}
        found = flows.find_slice(verdict.flow)
        if found is not None:
            out["slice"] = render(found[1])
    return out


def cmd_lnd(args, cfg):
    d = derivation_from_json(load_json(args.derivation))
    try:
        v = lnd_check(d, cfg.lnd_cap)
    except NonPolynomialImage as exc:
        raise InputError(f"lnd needs polynomial images; {exc}") from None
    out = {"status": v.status, "degrees": None, "cap": v.cap}
    if v.nilpotent:
        out["degrees"] = dict(zip(d.ctx.names, v.degrees))
    return out


def cmd_slice(args, cfg):
    f = flow_from_json(load_json(args.flow))
    if args.component is not None:
        if args.component not in f.ctx.names:
            raise InputError(f"unknown component {args.component!r}")
        i = f.ctx.index(args.component)
        s = flows.extract_slice(f, i)
        found = (i, s) if s is not None else None
    else:
        found = flows.find_slice(f)
    if found is None:
        return {"slice": None, "verified": False}
    i, s = found
    return {"slice": render(s), "verified": True, "component": f.ctx.names[i]}


def cmd_flow_verify(args, cfg):
    f = flow_from_json(load_json(args.flow))
    d = derivation_from_json(load_json(args.derivation))
    if d.ctx != f.ctx:
        raise InputError("flow and derivation declare different variables")
    cert, structural = _certificate(d, f)
    out = {"certified": cert["ode"] and cert["unit"], "certificate": cert}
    if structural:
        out["structural_failure"] = True
    return out


def cmd_coaction(args, cfg):
    f = flow_from_json(load_json(args.flow))
    try:
        return {"coaction": flows.coaction_check(f)}
    except DegenerateSubstitution:
        return {"coaction": False, "structural_failure": True}


def _fan(args, cfg):
    return fan_from_json(load_json(args.fan), trust=cfg.trust_fan)


def cmd_toric_check(args, cfg):
    fan = _fan(args, cfg)
    p, e = parse_vector(args.p), parse_vector(args.e)
    if len(p) != fan.rank or len(e) != fan.rank:
        raise InputError(f"p and e must have {fan.rank} coordinates")
    if not any(p):
        raise InputError("p must be nonzero")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        h = HomogDeriv.normalized(p, e)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out = regular_on_fan(h, fan).to_json()
    out["semi_affine"] = semi_affine(fan, cfg.samples).status
    return out


def cmd_toric_roots(args, cfg):
    fan = _fan(args, cfg)
    bound = args.bound if args.bound is not None else cfg.root_bound
    if bound < 1:
        raise InputError("bound must be at least 1")
    roots = enumerate_roots(fan, bound, workers=cfg.threads)
    return {"roots": [{"e": list(e), "witness": list(r)} for e, r in roots]}


def cmd_toric_semiaffine(args, cfg):
    return semi_affine(_fan(args, cfg), cfg.samples).to_json()


def _parse(text, ctx):
    try:
        return parse_expr(text, ctx)
    except (ParseError, EvalError) as exc:
        raise InputError(str(exc)) from None


COMMANDS = {
    "exp": cmd_exp,
    "integrable": cmd_integrable,
    "lnd": cmd_lnd,
    "slice": cmd_slice,
    "flow-verify": cmd_flow_verify,
    "coaction": cmd_coaction,
    "toric-check": cmd_toric_check,
    "toric-roots": cmd_toric_roots,
    "toric-semiaffine": cmd_toric_semiaffine,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("configuration (overrides $GA_KERNEL_CONFIG)")
    g.add_argument("--detect-degree", dest="detect_degree", type=int)
    g.add_argument("--series-order", dest="series_order", type=int)
    g.add_argument("--lnd-cap", dest="lnd_cap", type=int)
    g.add_argument("--root-bound", dest="root_bound", type=int)
    g.add_argument("--trust-fan", dest="trust_fan", action="store_true",
                   help="skip face-compatibility validation of fans")
    g.add_argument("--samples", type=int, help="sample count for rank >= 3 convexity")
    g.add_argument("--output", choices=("json", "pretty"))
    g.add_argument("--threads", type=int, help="worker processes for toric-roots")

    parser = _Parser(
        prog="ratga",
        description="Rational additive-group actions: flows, slices, LND tests, toric roots. "
                    "Expressions use t for the flow parameter and tp for its shifted copy.",
        parents=[common])
    parser.add_argument("--help-grammar", action="store_true", help="print the expression grammar")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("exp", parents=[common], help="truncated exp(t*d)(f)")
    p.add_argument("derivation")
    p.add_argument("function")
    p.add_argument("--order", type=int)

    for name, help_ in (("integrable", "decide and certify rational integrability"),
                        ("lnd", "local nilpotency test on the polynomial ring")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("derivation")

    p = sub.add_parser("slice", parents=[common], help="rational slice of a flow")
    p.add_argument("flow")
    p.add_argument("--component")

    p = sub.add_parser("flow-verify", parents=[common], help="ODE and unit certificate")
    p.add_argument("flow")
    p.add_argument("derivation")

    p = sub.add_parser("coaction", parents=[common], help="group-law check F(t+tp) = F(tp, F(t))")
    p.add_argument("flow")

    p = sub.add_parser("toric-check", parents=[common], help="root verdict for d_{p,e} on a fan")
    p.add_argument("fan")
    p.add_argument("-p", "--p", dest="p", required=True, help="comma-separated ints")
    p.add_argument("-e", "--e", dest="e", required=True, help="comma-separated ints")

    p = sub.add_parser("toric-roots", parents=[common], help="Demazure roots in a box")
    p.add_argument("fan")
    p.add_argument("--bound", type=int)

    p = sub.add_parser("toric-semiaffine", parents=[common], help="convexity of the fan support")
    p.add_argument("fan")
    return parser


def _glue_vectors(argv):
    # "-e -1,2" would be read as an option; attach vector values to their flag.
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("-p", "--p", "-e", "--e"):
            nxt = next(it, None)
            if nxt is not None:
                out.append(f"{tok}={nxt}" if tok.startswith("--") else f"{tok}{nxt}")
                continue
        out.append(tok)
    return out


def main(argv=None) -> int:
    argv = _glue_vectors(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors (2) and --help (0)
        return exc.code
    if args.help_grammar:
        print(GRAMMAR)
        return 0
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        cfg = load_config(args)
        result = COMMANDS[args.command](args, cfg)
    except (InputError, FlowError, ValueError, KeyError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.output == "pretty":
        print(json.dumps(result, indent=2))
    else:
        print(json.dumps(result, separators=(",", ":")))
    return 0


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
