"""Exponential flows exp(t*d) and exact certification of rational integrability.

A rational flow is stored as one element of Q(t, x1, ..., xn) per generator.
Detection proposes a closed form by minimal linear recurrence
(Berlekamp-Massey over the coefficient field Q(x)), but only the flow ODE
with initial condition is accepted as proof: F(0) = x and dF/dt = d(x)|F.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import DegenerateSubstitution, MPoly, RatFunc, VarContext, compose, variables
from .derivation import Derivation, apply

DEFAULT_DETECT_DEGREE = 8

CERTIFIED = "integrable-certified"
NOT_DETECTED = "not-detected-within-degree"
DIVERGENT = "divergent-structure"


class FlowError(ValueError):
    pass


def min_order(detect_degree: int) -> int:
    return 2 * detect_degree + 4


@dataclass(frozen=True, eq=False)
class TruncFlow:
    derivation: Derivation
    order: int
    coeffs: tuple  # coeffs[i][m] = d^m(x_i) / m!

    @property
    def ctx(self) -> VarContext:
        return self.derivation.ctx


@dataclass(frozen=True, eq=False)
class RationalFlow:
    ctx: VarContext
    components: tuple  # elements over ctx.with_time(1)
    certified: bool = False

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.ctx.n:
            raise ValueError("need one flow component per generator")
        ext = self.ctx.with_time(1)
        for c in comps:
            if c.ctx != ext:
                raise ValueError(f"flow components must live over {ext.names}")

    @property
    def ext(self) -> VarContext:
        return self.ctx.with_time(1)

    @classmethod
    def identity(cls, ctx: VarContext, certified=True) -> "RationalFlow":
        ext = ctx.with_time(1)
        return cls(ctx, [x.relabel(ext) for x in variables(ctx)], certified)

    def t_parts(self, i: int):
        """Coefficient lists (a, b) in Q(x) with F_i = a(t) / b(t) and b(0) = 1."""
        F = self.components[i]
        nums = F.num.coeffs_in(0)
        dens = F.den.coeffs_in(0)
        if 0 not in dens:
            raise FlowError(f"component {self.ctx.names[i]!r} has a pole at t = 0")
        d0 = _drop_t(dens[0], self.ctx)

        def seq(parts):
            top = max(parts)
            return [RatFunc(_drop_t(parts[k], self.ctx), d0) if k in parts
                    else RatFunc.zero(self.ctx) for k in range(top + 1)]

        return seq(nums) if nums else [RatFunc.zero(self.ctx)], seq(dens)

    def t_degree(self, i: int) -> tuple:
        F = self.components[i]
        return F.num.degree_in(0), F.den.degree_in(0)


@dataclass(frozen=True, eq=False)
class IntegrabilityVerdict:
    status: str
    flow: RationalFlow | None
    detect_degree: int
    failed_component: str | None = None

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED


def _drop_t(p: MPoly, base: VarContext) -> MPoly:
    return MPoly(base, {e[1:]: c for e, c in p.terms.items()})


def _at_zero(F: RatFunc, base: VarContext) -> RatFunc:
    try:
        return compose(F, [RatFunc.zero(base)] + variables(base), base)
    except DegenerateSubstitution:
        raise FlowError("flow component has a pole at t = 0") from None


def _from_t_poly(coeffs: Sequence[RatFunc], ext: VarContext) -> RatFunc:
    t = RatFunc.var(ext, 0)
    total = RatFunc.zero(ext)
    for k, c in enumerate(coeffs):
        if not c.is_zero():
            total = total + c.relabel(ext) * t**k
    return total


# --- series -------------------------------------------------------------------


def exp_coeffs(d: Derivation, f: RatFunc, order: int) -> list:
    """[f, d(f), d^2(f)/2!, ..., d^order(f)/order!]."""
    if order < 0:
        raise ValueError("order must be non-negative")
    out = [f]
    for m in range(order):
        nxt = apply(d, out[-1])
        out.append(nxt / (m + 1))
    return out


def exp_series(d: Derivation, order: int) -> TruncFlow:
    if order < 1:
        raise ValueError("order must be at least 1")
    coeffs = tuple(tuple(exp_coeffs(d, x, order)) for x in variables(d.ctx))
    return TruncFlow(d, order, coeffs)


def berlekamp_massey(seq: Sequence[RatFunc]):
    """Shortest linear recurrence over the field of the sequence.

    Returns ``(L, C)`` with ``C[0] = 1`` and
    ``sum_i C[i] * seq[n - i] = 0`` for ``L <= n < len(seq)``.
    """
    ctx = seq[0].ctx
    zero, one = RatFunc.zero(ctx), RatFunc.one(ctx)
    C, B = [one], [one]
    L, m, b = 0, 1, one
    for n in range(len(seq)):
        d = seq[n]
        for i in range(1, min(len(C), n + 1)):
            if not C[i].is_zero():
                d = d + C[i] * seq[n - i]
        if d.is_zero():
            m += 1
            continue
        coef = d / b
        new = C + [zero] * max(0, len(B) + m - len(C))
        for j, bj in enumerate(B):
            if not bj.is_zero():
                new[j + m] = new[j + m] - coef * bj
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, C, d, 1
        else:
            m += 1
        C = new
    while len(C) > 1 and C[-1].is_zero():
        C.pop()
    return L, C


def _complexity_over_q(values: Sequence[Fraction]) -> int:
    """Linear complexity of a sequence of rationals (Berlekamp-Massey over Q)."""
    C, B = [Fraction(1)], [Fraction(1)]
    L, m, b = 0, 1, Fraction(1)
    for n, v in enumerate(values):
        d = v + sum(C[i] * values[n - i] for i in range(1, min(len(C), n + 1)))
        if not d:
            m += 1
            continue
        coef = d / b
        new = C + [Fraction(0)] * max(0, len(B) + m - len(C))
        for j, bj in enumerate(B):
            new[j + m] -= coef * bj
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, C, d, 1
        else:
            m += 1
        C = new
    return L


def _specializations(seq: Sequence[RatFunc], count: int = 2, seed: int = 0):
    """Values of the sequence at random rational points where every term is defined."""
    rng = random.Random(seed)
    n = seq[0].ctx.n
    found = 0
    for _ in range(20 * count):
        point = [Fraction(rng.randint(-97, 97), rng.randint(1, 31)) for _ in range(n)]
        try:
            yield [c.evaluate(point) for c in seq]
        except ZeroDivisionError:
            continue
        found += 1
        if found == count:
            return


def rational_candidate(seq: Sequence[RatFunc], detect_degree: int):
    """Propose (P, Q) with Q(0) = 1, deg Q <= detect_degree and S*Q = P mod t^len(seq).

    Returns None when no recurrence short enough to be confirmed by the data exists.
    """
    N = len(seq)
    nonzero = [k for k, c in enumerate(seq) if not c.is_zero()]
    if not nonzero:
        return [seq[0]], [RatFunc.one(seq[0].ctx)]
    top = nonzero[-1]
    if 2 * (top + 1) < N:
        # terminating series: the recurrence Q = 1 of length top+1 is the unique minimal one
        return list(seq[: top + 1]), [RatFunc.one(seq[0].ctx)]
    # A recurrence over Q(x) survives specialization wherever its coefficients are
    # defined, so long recurrences at random points rule out a short generic one
    # and spare the expensive exact run.
    probes = list(_specializations(seq))
    if probes and all(2 * _complexity_over_q(vals) >= N for vals in probes):
        return None
    L, C = berlekamp_massey(seq)
    if 2 * L >= N or len(C) - 1 > detect_degree:
        return None
    P = []
    for k in range(L):
        acc = RatFunc.zero(seq[0].ctx)
        for i in range(min(k, len(C) - 1) + 1):
            if not C[i].is_zero():
                acc = acc + C[i] * seq[k - i]
        P.append(acc)
    return P, C


def detect_rational(s: TruncFlow, detect_degree: int = DEFAULT_DETECT_DEGREE) -> IntegrabilityVerdict:
    if s.order < min_order(detect_degree):
        raise FlowError(
            f"series order {s.order} below the detection margin {min_order(detect_degree)}")
    ctx = s.ctx
    ext = ctx.with_time(1)
    comps = []
    for name, seq in zip(ctx.names, s.coeffs):
        cand = rational_candidate(seq, detect_degree)
        if cand is None:
            return IntegrabilityVerdict(NOT_DETECTED, None, detect_degree, name)
        P, Q = cand
        comps.append((_from_t_poly(P, ext) / _from_t_poly(Q, ext)).reduced(full=True))
    flow = RationalFlow(ctx, comps)
    try:
        ok = verify_flow(s.derivation, flow)
    except DegenerateSubstitution:
        return IntegrabilityVerdict(DIVERGENT, None, detect_degree)
    if not ok:
        return IntegrabilityVerdict(NOT_DETECTED, None, detect_degree)
    return IntegrabilityVerdict(CERTIFIED, RationalFlow(ctx, comps, True), detect_degree)


# --- certificates -------------------------------------------------------------------


def unit_check(f: RationalFlow) -> bool:
    """F(0; x) = x for every component."""
    return all(_at_zero(F, f.ctx) == x for F, x in zip(f.components, variables(f.ctx)))


def ode_check(d: Derivation, f: RationalFlow) -> bool:
    """dF_i/dt = d(x_i) evaluated at F, exactly in Q(t, x)."""
    if d.ctx != f.ctx:
        raise ValueError("derivation and flow over different variables")
    ext = f.ext
    comps = list(f.components)
    for F, img in zip(comps, d.images):
        if not F.partial(0) == compose(img, comps, ext):
            return False
    return True


def verify_flow(d: Derivation, f: RationalFlow) -> bool:
    """Exact proof that ``f`` is exp(t*d): unit axiom plus the flow ODE.

    By uniqueness of formal solutions with given initial value this pins the
    whole series.  Raises :class:`DegenerateSubstitution` if composing the
    images with the flow kills a denominator.
    """
    return unit_check(f) and ode_check(d, f)


def certify(d: Derivation, f: RationalFlow) -> RationalFlow:
    return RationalFlow(f.ctx, f.components, verify_flow(d, f))


def coaction_check(f: RationalFlow) -> bool:
    """Group law F(t + t'; x) = F(t'; F(t; x)) as identities in Q(t, t', x)."""
    ctx2 = f.ctx.with_time(2)
    t, tp = RatFunc.var(ctx2, 0), RatFunc.var(ctx2, 1)
    xs = [x.relabel(ctx2) for x in variables(f.ctx)]
    lifted = [F.relabel(ctx2) for F in f.components]
    for F in f.components:
        lhs = compose(F, [t + tp] + xs, ctx2)
        rhs = compose(F, [tp] + lifted, ctx2)
        if not lhs == rhs:
            return False
    return True


def derivation_from_flow(f: RationalFlow) -> Derivation:
    """Velocity field d(x_i) = dF_i/dt at t = 0."""
    images = []
    for F in f.components:
        _at_zero(F, f.ctx)
        images.append(_at_zero(F.partial(0), f.ctx))
    return Derivation(f.ctx, images)


def series_of_flow(f: RationalFlow, order: int) -> list:
    """Taylor coefficients in t of each component up to ``order``."""
    out = []
    for i in range(f.ctx.n):
        a, b = f.t_parts(i)
        # a = b * s  =>  s_k = a_k - sum_{j>=1} b_j s_{k-j}
        zero = RatFunc.zero(f.ctx)
        s = []
        for k in range(order + 1):
            acc = a[k] if k < len(a) else zero
            for j in range(1, min(k, len(b) - 1) + 1):
                if not b[j].is_zero():
                    acc = acc - b[j] * s[k - j]
            s.append(acc)
        out.append(s)
    return out


# --- slices ----------------------------------------------------------------------


def slice_ok(f: RationalFlow, s: RatFunc) -> bool:
    """s(F(t; x)) = s(x) + t."""
    ext = f.ext
    try:
        moved = compose(s, list(f.components), ext)
    except DegenerateSubstitution:
        return False
    return moved == s.relabel(ext) + RatFunc.var(ext, 0)


def extract_slice(f: RationalFlow, i: int) -> RatFunc | None:
    """Slice from the leading coefficients of F_i = a(t) / (1 + b(t)).

    With m = deg(1 + b) >= 1 the candidate is b_{m-1} / (m b_m); for a
    polynomial component of degree n >= 1 it is a_{n-1} / (n a_n).  A
    candidate is returned only after checking s(F) = s + t.
    """
    if f.components[i].num.degree_in(0) <= 0 and f.components[i].den.degree_in(0) <= 0:
        raise FlowError(f"component {f.ctx.names[i]!r} is constant in t")
    a, b = f.t_parts(i)
    m, n = len(b) - 1, len(a) - 1
    candidates = []
    if m >= 1:
        candidates.append(b[m - 1] / (b[m] * m))
    if n >= 1 and not a[n].is_zero():
        candidates.append(a[n - 1] / (a[n] * n))
    for s in candidates:
        if slice_ok(f, s):
            return s.reduced(full=True)
    return None


def find_slice(f: RationalFlow):
    """First verified slice over the components, as ``(index, s)``, or None."""
    for i in range(f.ctx.n):
        F = f.components[i]
        if F.num.degree_in(0) <= 0 and F.den.degree_in(0) <= 0:
            continue
        s = extract_slice(f, i)
        if s is not None:
            return i, s
    return None


def integrability_check(d: Derivation, detect_degree: int = DEFAULT_DETECT_DEGREE,
                        order: int | None = None) -> IntegrabilityVerdict:
    """exp_series -> detect_rational -> verify_flow.

    Only ``integrable-certified`` is a proof; the other statuses are budget
    or structure reports, never proofs of non-integrability.
    """
    if order is None:
        order = min_order(detect_degree)
    if d.trivial:
        return IntegrabilityVerdict(CERTIFIED, RationalFlow.identity(d.ctx), detect_degree)
    return detect_rational(exp_series(d, order), detect_degree)
