import random
from fractions import Fraction

import pytest

from conftest import XY, X, integrable_derivations, triangular
from oracles import hankel_nonsingular_up_to
from ratga.arith import RatFunc
from ratga.derivation import Derivation, apply, lnd_check
from ratga.flow import (CERTIFIED, NOT_DETECTED, FlowError, RationalFlow, _complexity_over_q,
                        _specializations, berlekamp_massey, coaction_check, derivation_from_flow,
                        detect_rational, exp_series, extract_slice, find_slice, integrability_check,
                        series_of_flow, slice_ok, verify_flow)
from ratga.parser import parse_expr, render


def R(text, ctx=XY):
    return parse_expr(text, ctx)


def D(ctx, **images):
    return Derivation.from_map(ctx, {k: R(v, ctx) for k, v in images.items()})


def flow(ctx, *texts):
    return RationalFlow(ctx, [parse_expr(s, ctx, "flow") for s in texts])


NEG_SQUARE = D(X, x="-x^2")
INV_X = D(XY, y="1/x")


# --- series -----------------------------------------------------------------------


def test_exp_series_examples():
    s = exp_series(NEG_SQUARE, 4)
    assert [render(c) for c in s.coeffs[0]] == ["x", "-x^2", "x^3", "-x^4", "x^5"]
    s = exp_series(D(X, x="1"), 3)
    assert [render(c) for c in s.coeffs[0]] == ["x", "1", "0", "0"]
    s = exp_series(INV_X, 2)
    assert [render(c) for c in s.coeffs[1]] == ["y", "1/x", "0"]
    with pytest.raises(ValueError):
        exp_series(INV_X, 0)


def test_series_recurrence_invariant():
    rng = random.Random(21)
    for d in integrable_derivations(rng, 8) + [NEG_SQUARE, D(X, x="x^3")]:
        s = exp_series(d, 6)
        for i, seq in enumerate(s.coeffs):
            assert seq[0] == RatFunc.var(d.ctx, i)
            for m in range(6):
                assert seq[m + 1] * (m + 1) == apply(d, seq[m])


# --- detection ----------------------------------------------------------------------


def test_detect_examples():
    v = detect_rational(exp_series(NEG_SQUARE, 20), 8)
    assert v.status == CERTIFIED and v.flow.certified
    assert v.flow.components[0] == parse_expr("x/(1+t*x)", X, "flow")
    v = detect_rational(exp_series(INV_X, 20), 8)
    assert v.status == CERTIFIED
    assert [render(F) for F in v.flow.components] == ["x", "(x*y + t)/x"]
    assert detect_rational(exp_series(D(X, x="x^3"), 20), 8).status == NOT_DETECTED


def test_detect_needs_margin():
    with pytest.raises(FlowError):
        detect_rational(exp_series(NEG_SQUARE, 19), 8)
    assert detect_rational(exp_series(NEG_SQUARE, 8), 2).status == CERTIFIED


@pytest.mark.parametrize("image", ["x^3", "x"])
def test_hankel_oracle_confirms_no_low_order_recurrence(image):
    # Specialize x to rational points; a generic recurrence would survive there.
    d = D(X, x=image)
    seq = exp_series(d, 20).coeffs[0]
    for point in ((Fraction(3, 2),), (Fraction(-5, 7),)):
        vals = [c.evaluate(point) for c in seq]
        for offset in range(4):
            assert hankel_nonsingular_up_to(vals[offset:], 9)
    assert integrability_check(d).status == NOT_DETECTED


def test_integrability_examples():
    v = integrability_check(NEG_SQUARE)
    assert v.certified and render(v.flow.components[0]) == "x/(t*x + 1)"
    v = integrability_check(D(XY, y="x^2"))
    assert v.certified
    assert [render(F) for F in v.flow.components] == ["x", "t*x^2 + y"]
    assert integrability_check(D(X, x="x")).status == NOT_DETECTED
    v = integrability_check(Derivation.from_map(XY, {}))
    assert v.certified and coaction_check(v.flow)


# --- certificates -------------------------------------------------------------------


def test_verify_flow_examples():
    assert verify_flow(NEG_SQUARE, flow(X, "x/(1+t*x)"))
    assert verify_flow(D(X, x="1"), flow(X, "x+t"))
    assert not verify_flow(NEG_SQUARE, flow(X, "x/(1-t*x)"))
    assert not verify_flow(NEG_SQUARE, flow(X, "(x+t)/(1+t*x)"))  # wrong at t = 0


def test_coaction_examples():
    assert coaction_check(flow(X, "x+t"))
    assert coaction_check(flow(X, "x/(1+t*x)"))
    assert not coaction_check(flow(X, "x+t^2"))
    assert coaction_check(flow(XY, "x", "y+t/x"))


def test_derivation_from_flow_examples():
    assert derivation_from_flow(flow(X, "x/(1+t*x)")).equals(NEG_SQUARE)
    assert derivation_from_flow(flow(XY, "x", "y+t/x")).equals(INV_X)
    assert derivation_from_flow(flow(X, "x+t")).equals(D(X, x="1"))
    with pytest.raises(FlowError):
        derivation_from_flow(flow(X, "x/t"))


def test_certified_flows_satisfy_group_law_and_match_series():
    rng = random.Random(22)
    for d in integrable_derivations(rng, 12) + [NEG_SQUARE, INV_X]:
        v = integrability_check(d)
        assert v.certified
        assert verify_flow(d, v.flow)
        assert coaction_check(v.flow)
        expected = exp_series(d, 8).coeffs
        assert all(a == b for got, want in zip(series_of_flow(v.flow, 8), expected)
                   for a, b in zip(got, want))


def test_round_trip_derivation_from_flow():
    rng = random.Random(23)
    for d in integrable_derivations(rng, 12):
        assert derivation_from_flow(integrability_check(d).flow).equals(d)


def test_lnd_gives_polynomial_flow():
    rng = random.Random(24)
    for _ in range(10):
        d = triangular(rng)
        assert lnd_check(d).nilpotent
        v = integrability_check(d)
        assert v.certified
        assert all(F.den == 1 for F in v.flow.components)


# --- slices ----------------------------------------------------------------------------


def test_slice_examples():
    assert render(extract_slice(flow(X, "x/(1+t*x)"), 0)) == "1/x"
    assert render(extract_slice(flow(X, "x+t"), 0)) == "x"
    assert render(extract_slice(flow(XY, "x", "y+t/x"), 1)) == "x*y"
    with pytest.raises(FlowError):
        extract_slice(flow(XY, "x", "y+t/x"), 0)


def test_slice_is_verified_or_absent():
    assert extract_slice(flow(X, "x+t^2"), 0) is None
    rng = random.Random(25)
    for d in integrable_derivations(rng, 12):
        f = integrability_check(d).flow
        found = find_slice(f)
        if found is not None:
            i, s = found
            assert slice_ok(f, s)
            # A slice of the flow is a slice of its velocity field.
            assert apply(d, s) == 1


def test_specialized_complexity_matches_exact_berlekamp_massey():
    cases = [D(X, x="x"), D(X, x="x^3"), NEG_SQUARE, D(XY, x="y", y="1/x"), D(XY, x="x*y", y="1")]
    for d in cases:
        for seq in exp_series(d, 9).coeffs:
            L, _ = berlekamp_massey(seq)
            for vals in _specializations(seq):
                assert _complexity_over_q(vals) == L
