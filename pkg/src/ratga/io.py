"""JSON input files (derivations, flows, fans) and their output encodings."""

from __future__ import annotations

import json
from pathlib import Path

from .arith import RatFunc, VarContext
from .derivation import Derivation
from .flow import RationalFlow
from .parser import EvalError, ParseError, parse_expr, render
from .toric import Cone, Fan, FanError


class InputError(ValueError):
    pass


def load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise InputError(f"{path}: expected a JSON object")
    return obj


def _context(obj) -> VarContext:
    names = obj.get("vars")
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise InputError('"vars" must be a list of variable names')
    try:
        return VarContext(tuple(names))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _expressions(obj, key, ctx, mode):
    table = obj.get(key, {})
    if not isinstance(table, dict):
        raise InputError(f'"{key}" must be an object mapping names to expressions')
    unknown = sorted(set(table) - set(ctx.names))
    if unknown:
        raise InputError(f'"{key}" mentions undeclared variables {unknown}')
    out = {}
    for name, text in table.items():
        if not isinstance(text, str) or not text.strip():
            raise InputError(f"{key}[{name!r}] must be a non-empty expression string")
        try:
            out[name] = parse_expr(text, ctx, mode)
        except (ParseError, EvalError) as exc:
            raise InputError(f"{key}[{name!r}]: {exc}") from None
    return out


def derivation_from_json(obj: dict) -> Derivation:
    """``{"vars": [...], "images": {name: expr}}``; missing images are 0."""
    ctx = _context(obj)
    return Derivation.from_map(ctx, _expressions(obj, "images", ctx, "plain"))


def flow_from_json(obj: dict) -> RationalFlow:
    """``{"vars": [...], "flow": {name: expr in vars and t}}``; missing names stay fixed."""
    ctx = _context(obj)
    ext = ctx.with_time(1)
    table = _expressions(obj, "flow", ctx, "flow")
    comps = []
    for name in ctx.names:
        f = table.get(name)
        if f is None:
            comps.append(_identity_component(ctx, name))
        elif f.ctx != ext:
            raise InputError(f"flow[{name!r}] may use t but not tp")
        else:
            comps.append(f)
    return RationalFlow(ctx, comps)


def _identity_component(ctx, name):
    return RatFunc.var(ctx, name).relabel(ctx.with_time(1))


def fan_from_json(obj: dict, trust: bool = False) -> Fan:
    """``{"rank": r, "cones": [[[ray ints], ...], ...]}``."""
    rank = obj.get("rank")
    cones = obj.get("cones")
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
        raise InputError('"rank" must be a positive integer')
    if not isinstance(cones, list):
        raise InputError('"cones" must be a list of ray lists')
    parsed = []
    for cone in cones:
        if not isinstance(cone, list):
            raise InputError("each cone must be a list of rays")
        rays = []
        for ray in cone:
            if not isinstance(ray, list) or not all(
                    isinstance(x, int) and not isinstance(x, bool) for x in ray):
                raise InputError(f"ray {ray!r} must be a list of integers")
            rays.append(tuple(ray))
        parsed.append(rays)
    try:
        return Fan.build(rank, [Cone(r, rank) for r in parsed], trust=trust)
    except FanError as exc:
        raise InputError(str(exc)) from None


def parse_vector(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def flow_to_json(flow: RationalFlow) -> dict:
    return {name: render(F) for name, F in zip(flow.ctx.names, flow.components)}
