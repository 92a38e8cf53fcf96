#!/usr/bin/env python3
"""Run the worked examples end to end and print flows, slices and root data."""

from ratga.arith import RatFunc, VarContext
from ratga.derivation import Derivation, lnd_check
from ratga.flow import coaction_check, find_slice, integrability_check
from ratga.parser import parse_expr, render
from ratga.toric import Cone, Fan, HomogDeriv, enumerate_roots, regular_on_fan, semi_affine

X = VarContext(("x",))
XY = VarContext(("x", "y"))


def show_flow(label, d):
    v = integrability_check(d)
    print(f"{label}: {v.status}")
    if v.flow is None:
        return
    for name, F in zip(d.ctx.names, v.flow.components):
        print(f"  {name} -> {render(F)}")
    found = find_slice(v.flow)
    print(f"  slice: {render(found[1]) if found else None}")
    print(f"  group law: {coaction_check(v.flow)}")


def main():
    show_flow("dx = -x^2", Derivation(X, [parse_expr("-x^2", X)]))
    show_flow("dy = 1/x", Derivation(XY, [RatFunc.zero(XY), parse_expr("1/x", XY)]))
    show_flow("dy = x^2", Derivation(XY, [RatFunc.zero(XY), parse_expr("x^2", XY)]))
    show_flow("dx = x^3", Derivation(X, [parse_expr("x^3", X)]))
    print("lnd dy = x^2:", lnd_check(Derivation(XY, [RatFunc.zero(XY), parse_expr("x^2", XY)])))

    quadrant = Fan.build(2, [Cone(((1, 0), (0, 1))), Cone(((1, 0),)), Cone(((0, 1),)), Cone((), 2)])
    p1 = Fan.build(1, [Cone(((1,),)), Cone(((-1,),))])
    print("quadrant semi-affine:", semi_affine(quadrant).status)
    print("quadrant roots (bound 4):")
    for e, rho in enumerate_roots(quadrant, 4):
        print(f"  e={e} witness={rho}")
    print("P^1 roots:", enumerate_roots(p1, 3))
    print("d_{(1,0),(-1,2)} on quadrant:", regular_on_fan(HomogDeriv((1, 0), (-1, 2)), quadrant).to_json())


if __name__ == "__main__":
    main()
