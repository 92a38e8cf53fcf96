"""Derivations of Q(x1, ..., xn) given by the images of the generators."""

from __future__ import annotations

from dataclasses import dataclass, field

from .arith import ContextMismatch, RatFunc, VarContext

DEFAULT_LND_CAP = 64


class NonPolynomialImage(ValueError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"image of {name!r} is not a polynomial")


@dataclass(frozen=True, eq=False)
class Derivation:
    ctx: VarContext
    images: tuple

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if self.ctx.time_vars:
            raise ValueError("derivations live over a base context")
        if len(images) != self.ctx.n:
            raise ValueError(f"need {self.ctx.n} images, got {len(images)}")
        for img in images:
            if img.ctx != self.ctx:
                raise ContextMismatch("derivation image over a different context")

    @classmethod
    def from_map(cls, ctx: VarContext, images: dict) -> "Derivation":
        """Images keyed by variable name; missing names map to 0."""
        unknown = set(images) - set(ctx.names)
        if unknown:
            raise KeyError(f"images given for undeclared variables {sorted(unknown)}")
        return cls(ctx, [images.get(name, RatFunc.zero(ctx)) for name in ctx.names])

    @property
    def trivial(self) -> bool:
        return all(img.is_zero() for img in self.images)

    def __call__(self, f: RatFunc) -> RatFunc:
        return apply(self, f)

    def equals(self, other: "Derivation") -> bool:
        return self.ctx == other.ctx and all(a == b for a, b in zip(self.images, other.images))


@dataclass(frozen=True)
class LndVerdict:
    status: str  # "nilpotent" | "not-nilpotent-within-cap"
    degrees: tuple = field(default=())
    cap: int = DEFAULT_LND_CAP

    @property
    def nilpotent(self) -> bool:
        return self.status == "nilpotent"


def apply(d: Derivation, f: RatFunc) -> RatFunc:
    """Leibniz extension: sum_i (df/dx_i) * d(x_i)."""
    if f.ctx != d.ctx:
        raise ContextMismatch("function and derivation over different contexts")
    if f.is_constant():
        return RatFunc.zero(d.ctx)
    # One common denominator: d(N/D) = (D dN - N dD) / D^2, images summed over their own dens.
    total = RatFunc.zero(d.ctx)
    for i, img in enumerate(d.images):
        if img.is_zero():
            continue
        dn, dd = f.num.partial(i), f.den.partial(i)
        if dn.is_zero() and dd.is_zero():
            continue
        if dd.is_zero():
            part = RatFunc(dn * img.num, f.den * img.den)
        else:
            part = RatFunc((dn * f.den - f.num * dd) * img.num, f.den * f.den * img.den)
        total = total + part
    return total


def iterate(d: Derivation, f: RatFunc, m: int) -> RatFunc:
    if m < 0:
        raise ValueError("iteration count must be non-negative")
    for _ in range(m):
        if f.is_zero():
            break
        f = apply(d, f)
    return f


def in_kernel(d: Derivation, f: RatFunc) -> bool:
    return apply(d, f).is_zero()


def is_slice(d: Derivation, s: RatFunc) -> bool:
    return apply(d, s) == 1


def lnd_check(d: Derivation, cap: int = DEFAULT_LND_CAP) -> LndVerdict:
    """Semi-decide local nilpotency on Q[x1, ..., xn].

    Nilpotency on every generator is enough by Leibniz.  A negative answer
    only means no generator-killing power was found up to ``cap``.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    for name, img in zip(d.ctx.names, d.images):
        if not img.is_polynomial():
            raise NonPolynomialImage(name)
    degrees = []
    for i in range(d.ctx.n):
        f = RatFunc.var(d.ctx, i)
        for m in range(1, cap + 1):
            f = apply(d, f)
            if f.is_zero():
                degrees.append(m)
                break
        else:
            return LndVerdict("not-nilpotent-within-cap", tuple(degrees), cap)
    return LndVerdict("nilpotent", tuple(degrees), cap)

