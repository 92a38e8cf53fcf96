"""Exact arithmetic over Q: sparse multivariate polynomials and the field Q(x1, ..., xn).

Coefficients are :class:`fractions.Fraction`.  A polynomial is a map from dense
exponent tuples to nonzero coefficients; a rational function is a pair of such
polynomials kept in a cheap canonical form: common monomial factor and sign
removed, denominator exactly 1 for polynomials, integer content otherwise.
Full GCD cancellation (through sympy's integer polynomial rings) runs only when
one side grows past ``GCD_THRESHOLD`` terms or when explicitly requested, since
equality is always decided by cross multiplication.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from sympy.polys.domains import ZZ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

TIME_VARS = ("t", "tp")
GCD_THRESHOLD = 64
_RINGS = {}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

Exps = tuple
Terms = dict


class ContextMismatch(ValueError):
    pass


class DegenerateSubstitution(ZeroDivisionError):
    """A substitution turned a denominator into the zero polynomial."""


@dataclass(frozen=True)
class VarContext:
    """Ordered variable names.  The first ``time_vars`` names are the
    reserved flow parameters ``t`` (and ``tp``); they never occur in a base
    context."""

    names: tuple
    time_vars: int = 0

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not 0 <= self.time_vars <= len(TIME_VARS):
            raise ValueError("bad number of time variables")
        if names[: self.time_vars] != TIME_VARS[: self.time_vars]:
            raise ValueError("time variables must lead the context")
        base = names[self.time_vars :]
        if not base:
            raise ValueError("a context needs at least one variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in base:
            if not isinstance(name, str) or not _IDENT.match(name):
                raise ValueError(f"invalid variable name {name!r}")
            if name in TIME_VARS:
                raise ValueError(f"{name!r} is reserved for the flow parameter")

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def base(self) -> "VarContext":
        if not self.time_vars:
            return self
        return VarContext(self.names[self.time_vars :])

    def with_time(self, k: int = 1) -> "VarContext":
        return VarContext(TIME_VARS[:k] + self.base.names, k)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def __len__(self):
        return len(self.names)


def grlex_key(e):
    return (sum(e), e)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


# --- raw sparse-dict kernels -------------------------------------------------


def _add(a, b, sign=1):
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + sign * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _mul(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = {}
    for eb, cb in b.items():
        for ea, ca in a.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) + ca * cb
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def _scale(a, c):
    if not c:
        return {}
    return {e: v * c for e, v in a.items()}


def _shift(a, m):
    return {tuple(x + y for x, y in zip(e, m)): c for e, c in a.items()}


def _pow(a, k, n):
    result = {(0,) * n: Fraction(1)}
    base = a
    while k:
        if k & 1:
            result = _mul(result, base)
        k >>= 1
        if k:
            base = _mul(base, base)
    return result


def _leading(a):
    e = max(a, key=grlex_key)
    return e, a[e]


def _deg(a, k):
    return max((e[k] for e in a), default=-1)


def _integer_scale(*polys):
    """Factor making every coefficient integral with joint content 1."""
    den = 1
    num = 0
    for p in polys:
        for c in p.values():
            den = lcm(den, c.denominator)
    for p in polys:
        for c in p.values():
            num = gcd(num, (c * den).numerator)
    return Fraction(den, num or 1)


def _primitive_q(a):
    """Scale to integer coefficients with content 1 and positive leading coefficient."""
    if not a:
        return {}
    s = _integer_scale(a)
    if _leading(a)[1] < 0:
        s = -s
    return _scale(a, s)


def _split(a, k):
    out = {}
    for e, c in a.items():
        out.setdefault(e[k], {})[e[:k] + (0,) + e[k + 1 :]] = c
    return out


def _ring(n):
    ring = _RINGS.get(n)
    if ring is None:
        ring = _RINGS[n] = PolyRing([f"_x{i}" for i in range(max(n, 1))], ZZ, grlex)
    return ring


def _to_ring(ring, a, s, n):
    if n == 0:
        a = {(0,): c for c in a.values()}
    return ring.from_dict({e: ZZ(int(c * s)) for e, c in a.items()})


def _from_ring(p, n, s=1):
    s = Fraction(s)
    if n == 0:
        return {(): Fraction(int(c)) / s for c in p.values()}
    return {e: Fraction(int(c)) / s for e, c in p.items()}


def _cofactors(a, b, n):
    """(gcd, a/gcd, b/gcd) with a shared rational scale on the cofactors."""
    s = _integer_scale(a, b)
    ring = _ring(n)
    g, ca, cb = _to_ring(ring, a, s, n).cofactors(_to_ring(ring, b, s, n))
    return _from_ring(g, n), _from_ring(ca, n, s), _from_ring(cb, n, s)


def _gcd(a, b, n):
    if not a:
        return _primitive_q(b)
    if not b:
        return _primitive_q(a)
    return _primitive_q(_cofactors(a, b, n)[0])


def _exact_div(a, b, n):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return {}
    ring = _ring(n)
    sa, sb = _integer_scale(a), _integer_scale(b)
    q, r = divmod(_to_ring(ring, a, sa, n), _to_ring(ring, b, sb, n))
    if r:
        raise ArithmeticError("polynomial division is not exact")
    return _from_ring(q, n, sa / sb)


def poly_gcd(a: "MPoly", b: "MPoly") -> "MPoly":
    """Gcd with integer content 1 and positive leading coefficient."""
    _check_ctx(a.ctx, b.ctx)
    return MPoly(a.ctx, _gcd(a.terms, b.terms, a.ctx.n), _trusted=True)


# --- polynomials ---------------------------------------------------------------


def _check_ctx(c1, c2):
    if c1 != c2:
        raise ContextMismatch(f"context mismatch: {c1.names} vs {c2.names}")


class MPoly:
    """Sparse polynomial over Q in a fixed :class:`VarContext`."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: VarContext, terms: Mapping | None = None, *, _trusted=False):
        self.ctx = ctx
        if _trusted:
            self.terms = terms
            return
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != ctx.n or min(e, default=0) < 0:
                raise ValueError(f"bad exponent vector {e} for {ctx.names}")
            c = _as_fraction(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def const(cls, ctx, c) -> "MPoly":
        c = _as_fraction(c)
        return cls(ctx, {(0,) * ctx.n: c} if c else {}, _trusted=True)

    @classmethod
    def var(cls, ctx, i) -> "MPoly":
        if isinstance(i, str):
            i = ctx.index(i)
        e = tuple(1 if j == i else 0 for j in range(ctx.n))
        return cls(ctx, {e: Fraction(1)}, _trusted=True)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.ctx.n, Fraction(0))

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i) -> int:
        return _deg(self.terms, i)

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def leading(self):
        return _leading(self.terms)

    def _coerce(self, other):
        if isinstance(other, MPoly):
            _check_ctx(self.ctx, other.ctx)
            return other
        return MPoly.const(self.ctx, other)

    def __add__(self, other):
        other = self._coerce(other)
        return MPoly(self.ctx, _add(self.terms, other.terms), _trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return MPoly(self.ctx, _add(self.terms, other.terms, -1), _trusted=True)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return MPoly(self.ctx, _scale(self.terms, -1), _trusted=True)

    def __mul__(self, other):
        if isinstance(other, MPoly):
            _check_ctx(self.ctx, other.ctx)
            return MPoly(self.ctx, _mul(self.terms, other.terms), _trusted=True)
        return MPoly(self.ctx, _scale(self.terms, _as_fraction(other)), _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        return MPoly(self.ctx, _pow(self.terms, k, self.ctx.n), _trusted=True)

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MPoly.const(self.ctx, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    def exact_div(self, other: "MPoly") -> "MPoly":
        _check_ctx(self.ctx, other.ctx)
        return MPoly(self.ctx, _exact_div(self.terms, other.terms, self.ctx.n), _trusted=True)

    def partial(self, i: int) -> "MPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                out[e[:i] + (e[i] - 1,) + e[i + 1 :]] = c * e[i]
        return MPoly(self.ctx, out, _trusted=True)

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= Fraction(x) ** k
            total += v
        return total

    def coeffs_in(self, i: int) -> dict:
        """Coefficients with respect to variable ``i`` (as polynomials free of it)."""
        return {d: MPoly(self.ctx, p, _trusted=True) for d, p in _split(self.terms, i).items()}

    def relabel(self, target: VarContext) -> "MPoly":
        """Embed into a context containing all of this polynomial's variables."""
        if target == self.ctx:
            return self
        idx = [target.index(name) for name in self.ctx.names]
        out = {}
        for e, c in self.terms.items():
            new = [0] * target.n
            for j, k in zip(idx, e):
                new[j] = k
            out[tuple(new)] = c
        return MPoly(target, out, _trusted=True)

    def __repr__(self):
        return f"MPoly({self.ctx.names}, {self.terms})"


# --- rational functions ----------------------------------------------------------


def _normalize(num, den, n, full):
    if not den:
        raise ZeroDivisionError("rational function with zero denominator")
    zero = (0,) * n
    if not num:
        return {}, {zero: Fraction(1)}
    if full or len(num) > GCD_THRESHOLD or len(den) > GCD_THRESHOLD:
        _, num, den = _cofactors(num, den, n)
    low = [min(e[i] for e in (*num, *den)) for i in range(n)]
    if any(low):
        neg = tuple(-x for x in low)
        num, den = _shift(num, neg), _shift(den, neg)
    if len(den) == 1 and zero in den:
        # Polynomials keep denominator exactly 1.
        c = den[zero]
        return ({e: v / c for e, v in num.items()} if c != 1 else num), {zero: Fraction(1)}
    s = _integer_scale(num, den)
    if _leading(den)[1] < 0:
        s = -s
    if s != 1:
        num, den = _scale(num, s), _scale(den, s)
    return num, den


class RatFunc:
    """Element of Q(x1, ..., xn) as a normalized numerator/denominator pair.

    ``==`` is field equality, decided by cross multiplication, so
    instances are deliberately unhashable.
    """

    __slots__ = ("num", "den")
    __hash__ = None

    def __init__(self, num: MPoly, den: MPoly | None = None, *, full: bool = False):
        ctx = num.ctx
        if den is None:
            den = MPoly.const(ctx, 1)
        _check_ctx(ctx, den.ctx)
        n, d = _normalize(num.terms, den.terms, ctx.n, full)
        self.num = MPoly(ctx, n, _trusted=True)
        self.den = MPoly(ctx, d, _trusted=True)

    @classmethod
    def _raw(cls, num, den):
        obj = cls.__new__(cls)
        obj.num, obj.den = num, den
        return obj

    @property
    def ctx(self) -> VarContext:
        return self.num.ctx

    @classmethod
    def const(cls, ctx, c) -> "RatFunc":
        c = _as_fraction(c)
        num = MPoly.const(ctx, c.numerator)
        return cls._raw(num, MPoly.const(ctx, c.denominator))

    @classmethod
    def zero(cls, ctx) -> "RatFunc":
        return cls.const(ctx, 0)

    @classmethod
    def one(cls, ctx) -> "RatFunc":
        return cls.const(ctx, 1)

    @classmethod
    def var(cls, ctx, i) -> "RatFunc":
        return cls._raw(MPoly.var(ctx, i), MPoly.const(ctx, 1))

    @classmethod
    def monomial(cls, ctx, exps: Sequence[int], coeff=1) -> "RatFunc":
        """Laurent monomial ``coeff * prod x_i^exps[i]``; negative exponents go downstairs."""
        if len(exps) != ctx.n:
            raise ValueError("exponent vector has wrong length")
        up = tuple(max(k, 0) for k in exps)
        down = tuple(max(-k, 0) for k in exps)
        return cls(MPoly(ctx, {up: coeff}), MPoly(ctx, {down: 1}))

    @classmethod
    def from_poly(cls, p: MPoly) -> "RatFunc":
        return cls(p)

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            _check_ctx(self.ctx, other.ctx)
            return other
        if isinstance(other, MPoly):
            _check_ctx(self.ctx, other.ctx)
            return RatFunc(other)
        return RatFunc.const(self.ctx, other)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> MPoly:
        if not self.is_polynomial():
            raise ValueError("not a polynomial")
        return self.num * (1 / self.den.constant_term())

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.constant_term() / self.den.constant_term()

    def __add__(self, other):
        o = self._coerce(other)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num**k, self.den**k)

    def equals(self, other) -> bool:
        o = self._coerce(other)
        return (self.num * o.den - o.num * self.den).is_zero()

    def __eq__(self, other):
        if isinstance(other, (RatFunc, MPoly, int, Fraction)):
            return self.equals(other)
        return NotImplemented

    def reduced(self, full: bool = True) -> "RatFunc":
        return RatFunc(self.num, self.den, full=full)

    def partial(self, i: int) -> "RatFunc":
        dn, dd = self.num.partial(i), self.den.partial(i)
        if dd.is_zero():
            return RatFunc(dn, self.den)
        return RatFunc(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point: Sequence) -> Fraction:
        d = self.den.evaluate(point)
        if not d:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.evaluate(point) / d

    def relabel(self, target: VarContext) -> "RatFunc":
        return RatFunc._raw(self.num.relabel(target), self.den.relabel(target))

    def compose(self, images: Sequence["RatFunc"], target: VarContext) -> "RatFunc":
        """Substitute ``images[i]`` (elements over ``target``) for variable ``i``."""
        return compose(self, images, target)

    def __repr__(self):
        from .parser import render

        return f"RatFunc({render(self)!r})"


def compose(f: RatFunc, images: Sequence[RatFunc], target: VarContext) -> RatFunc:
    """Exact substitution x_i <- images[i].

    Both numerator and denominator are evaluated over the common denominator
    prod b_i^D_i, which cancels, so only polynomial arithmetic is needed.
    Raises :class:`DegenerateSubstitution` when the substituted denominator
    is identically zero.
    """
    if len(images) != f.ctx.n:
        raise ValueError("need one image per variable")
    for g in images:
        _check_ctx(g.ctx, target)
    n = f.ctx.n
    degs = [max(_deg(f.num.terms, i), _deg(f.den.terms, i)) for i in range(n)]
    nums = [g.num.terms for g in images]
    dens = [g.den.terms for g in images]
    cache: dict = {}

    def power(which, i, k):
        key = (which, i, k)
        if key not in cache:
            src = nums[i] if which == 0 else dens[i]
            cache[key] = _pow(src, k, target.n)
        return cache[key]

    def evaluate(p):
        total = {}
        for e, c in p.items():
            term = {(0,) * target.n: c}
            for i, k in enumerate(e):
                if k:
                    term = _mul(term, power(0, i, k))
                if degs[i] - k:
                    term = _mul(term, power(1, i, degs[i] - k))
            total = _add(total, term)
        return total

    num = evaluate(f.num.terms)
    den = evaluate(f.den.terms)
    if not den:
        raise DegenerateSubstitution("substitution sends a denominator to zero")
    return RatFunc(MPoly(target, num, _trusted=True), MPoly(target, den, _trusted=True))


def variables(ctx: VarContext) -> list:
    return [RatFunc.var(ctx, i) for i in range(ctx.n)]


# Function forms of the field operations.


def add(a: RatFunc, b: RatFunc) -> RatFunc:
    _check_ctx(a.ctx, b.ctx)
    return a + b


def sub(a: RatFunc, b: RatFunc) -> RatFunc:
    _check_ctx(a.ctx, b.ctx)
    return a - b


def mul(a: RatFunc, b: RatFunc) -> RatFunc:
    _check_ctx(a.ctx, b.ctx)
    return a * b


def div(a: RatFunc, b: RatFunc) -> RatFunc:
    _check_ctx(a.ctx, b.ctx)
    return a / b


def neg(a: RatFunc) -> RatFunc:
    return -a


def power(a: RatFunc, k: int) -> RatFunc:
    return a**k


def eq(a: RatFunc, b: RatFunc) -> bool:
    _check_ctx(a.ctx, b.ctx)
    return a.equals(b)


def reduce(a: RatFunc, full: bool = True) -> RatFunc:
    return a.reduced(full)


def formal_partial(f: RatFunc, i: int) -> RatFunc:
    if not 0 <= i < f.ctx.n:
        raise IndexError(f"variable index {i} out of range")
    return f.partial(i)


def lin_comb(ctx: VarContext, pairs: Iterable) -> RatFunc:
    total = RatFunc.zero(ctx)
    for c, f in pairs:
        total = total + f * c
    return total
