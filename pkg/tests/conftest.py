import random
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ratga.arith import MPoly, RatFunc, VarContext
from ratga.derivation import Derivation
from ratga.toric import HomogDeriv, dot, is_primitive, to_derivation

settings.register_profile(
    "default", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

XY = VarContext(("x", "y"))
X = VarContext(("x",))
XYZ = VarContext(("x", "y", "z"))

coefficients = st.builds(
    Fraction, st.integers(-6, 6), st.integers(1, 4))


@st.composite
def polys(draw, ctx=XY, max_terms=4, max_deg=3, nonzero=False):
    exps = st.tuples(*[st.integers(0, max_deg)] * ctx.n)
    terms = draw(st.dictionaries(exps, coefficients, min_size=1 if nonzero else 0,
                                 max_size=max_terms))
    p = MPoly(ctx, terms)
    if nonzero and p.is_zero():
        p = MPoly.const(ctx, 1)
    return p


@st.composite
def ratfuncs(draw, ctx=XY, max_terms=4, max_deg=3):
    return RatFunc(draw(polys(ctx, max_terms, max_deg)),
                   draw(polys(ctx, max_terms, max_deg, nonzero=True)))


def random_poly(rng: random.Random, ctx, max_terms=4, max_deg=3, den=4):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        e = tuple(rng.randint(0, max_deg) for _ in range(ctx.n))
        terms[e] = Fraction(rng.randint(-6, 6), rng.randint(1, den))
    return MPoly(ctx, terms)


def random_ratfunc(rng: random.Random, ctx=XY, max_terms=4, max_deg=3):
    den = random_poly(rng, ctx, max_terms, max_deg)
    while den.is_zero():
        den = random_poly(rng, ctx, max_terms, max_deg)
    return RatFunc(random_poly(rng, ctx, max_terms, max_deg), den)


def triangular(rng: random.Random):
    """dx = 0, dy in Q[x], dz in Q[x, y] on Q(x, y, z): always locally nilpotent."""
    def lift(p):
        return RatFunc(MPoly(XYZ, {e + (0,) * (3 - len(e)): c for e, c in p.terms.items()}))

    dy = random_poly(rng, X, 3, 3)
    dz = random_poly(rng, XY, 4, 2)
    return Derivation(XYZ, [RatFunc.zero(XYZ), lift(dy), lift(dz)])


def shear(rng: random.Random):
    """dx = 0, dy = r(x) for a random rational r: flow (x, y + t*r(x))."""
    den = random_poly(rng, X, 3, 3)
    while den.is_zero():
        den = random_poly(rng, X, 3, 3)
    r = RatFunc(random_poly(rng, X, 3, 3), den)
    lifted = RatFunc(MPoly(XY, {e + (0,): c for e, c in r.num.terms.items()}),
                     MPoly(XY, {e + (0,): c for e, c in r.den.terms.items()}))
    return Derivation(XY, [RatFunc.zero(XY), lifted])


def toric_integrable(rng: random.Random, rank=2, box=3):
    """to_derivation(p, e) for a random primitive p with <p, e> = +-1."""
    while True:
        p = tuple(rng.randint(-box, box) for _ in range(rank))
        e = tuple(rng.randint(-box, box) for _ in range(rank))
        if is_primitive(p) and abs(dot(p, e)) == 1:
            return to_derivation(HomogDeriv(p, e))


def integrable_derivations(rng: random.Random, count: int):
    """Mixed suite of derivations known to have rational flows."""
    makers = [triangular, shear, toric_integrable, lambda r: toric_integrable(r, 3, 2)]
    return [makers[k % len(makers)](rng) for k in range(count)]


# Acceptance summary: one PASS/FAIL line per criterion at the end of the run.

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    prev = _criteria.get(number, (title, True))
    _criteria[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
