"""Fans, cones and homogeneous derivations d_{p,e}: chi^m -> <p, m> chi^(m+e).

Lattice vectors are plain tuples of ints; the pairing between N and M is the
standard dot product.  Cone questions (strong convexity, membership,
extremal rays) are decided exactly by Fourier-Motzkin elimination.
"""

from __future__ import annotations

import random
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key, reduce
from itertools import product
from math import gcd

from .arith import RatFunc, VarContext
from .derivation import Derivation

DEFAULT_SAMPLES = 512
SAMPLE_DENOMINATOR = 16


class FanError(ValueError):
    pass


def dot(a, b) -> int:
    if len(a) != len(b):
        raise ValueError(f"rank mismatch: {len(a)} vs {len(b)}")
    return sum(x * y for x, y in zip(a, b))


def is_primitive(v) -> bool:
    return reduce(gcd, v, 0) == 1


def primitive_part(v) -> tuple:
    g = reduce(gcd, v, 0)
    if g == 0:
        raise ValueError("the zero vector has no primitive part")
    return tuple(x // g for x in v)


# --- Fourier-Motzkin ---------------------------------------------------------------


def fm_feasible(eqs, ineqs, nvars: int) -> bool:
    """Decide whether ``row . x = rhs`` (eqs) and ``row . x <= rhs`` (ineqs) has a
    rational solution.  Rows are ``(coefficients, rhs)`` pairs."""
    eqs = [([Fraction(a) for a in row], Fraction(b)) for row, b in eqs]
    ineqs = [([Fraction(a) for a in row], Fraction(b)) for row, b in ineqs]
    while eqs:
        row, b = eqs.pop()
        j = next((k for k, a in enumerate(row) if a), None)
        if j is None:
            if b:
                return False
            continue

        def sub(r, rb):
            f = r[j] / row[j]
            if not f:
                return r, rb
            return [x - f * y for x, y in zip(r, row)], rb - f * b

        eqs = [sub(r, rb) for r, rb in eqs]
        ineqs = [sub(r, rb) for r, rb in ineqs]
    for j in range(nvars):
        pos, neg, rest = [], [], []
        for r, rb in ineqs:
            (pos if r[j] > 0 else neg if r[j] < 0 else rest).append((r, rb))
        for (rp, bp), (rn, bn) in product(pos, neg):
            fp, fn = 1 / rp[j], -1 / rn[j]
            rest.append(([fp * x + fn * y for x, y in zip(rp, rn)], fp * bp + fn * bn))
        seen = set()
        ineqs = []
        for r, rb in rest:
            key = (tuple(r), rb)
            if key not in seen:
                seen.add(key)
                ineqs.append((r, rb))
    return all(rb >= 0 for _, rb in ineqs)


def in_cone(v, gens) -> bool:
    """v in cone(gens), i.e. v = sum lambda_i g_i with lambda >= 0."""
    k = len(gens)
    if k == 0:
        return not any(v)
    r = len(v)
    eqs = [([g[c] for g in gens], v[c]) for c in range(r)]
    ineqs = [([-1 if i == j else 0 for j in range(k)], 0) for i in range(k)]
    return fm_feasible(eqs, ineqs, k)


# --- cones and fans ------------------------------------------------------------------


@dataclass(frozen=True)
class Cone:
    rays: tuple
    rank: int | None = None

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        object.__setattr__(self, "rays", rays)
        rank = self.rank if self.rank is not None else (len(rays[0]) if rays else None)
        if rank is None:
            raise FanError("the zero cone needs an explicit rank")
        object.__setattr__(self, "rank", rank)
        for r in rays:
            if len(r) != rank:
                raise FanError(f"ray {r} does not have rank {rank}")
            if not is_primitive(r):
                raise FanError(f"ray {r} is not primitive")

    def extremal_rays(self) -> tuple:
        """sigma(1): generators that are not in the cone of the others."""
        uniq = list(dict.fromkeys(self.rays))
        return tuple(r for i, r in enumerate(uniq) if not in_cone(r, uniq[:i] + uniq[i + 1 :]))

    def contains(self, v) -> bool:
        return in_cone(v, self.rays)


def strongly_convex(c: Cone) -> bool:
    """No nonzero lambda >= 0 with sum lambda_i r_i = 0."""
    k = len(c.rays)
    if k == 0:
        return True
    eqs = [([r[j] for r in c.rays], 0) for j in range(c.rank)]
    eqs.append(([1] * k, 1))
    ineqs = [([-1 if i == j else 0 for j in range(k)], 0) for i in range(k)]
    return not fm_feasible(eqs, ineqs, k)


def in_dual(e, c: Cone) -> bool:
    if len(e) != c.rank:
        raise ValueError("rank mismatch")
    return all(dot(e, r) >= 0 for r in c.rays)


def _det(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _strictly_inside_2d(v, u1, u2) -> bool:
    if _det(u1, u2) < 0:
        u1, u2 = u2, u1
    return _det(u1, v) > 0 and _det(v, u2) > 0


def _check_faces_rank2(cones):
    walls = [c.extremal_rays() for c in cones]
    for i, a in enumerate(walls):
        for j, b in enumerate(walls):
            if i == j or len(a) != 2:
                continue
            for r in b:
                if _strictly_inside_2d(r, *a):
                    raise FanError(f"cones {i} and {j} do not meet along a common face")


@dataclass(frozen=True)
class Fan:
    rank: int
    cones: tuple
    rays: tuple = field(default=(), init=False)

    def __post_init__(self):
        cones = tuple(c if isinstance(c, Cone) else Cone(c, self.rank) for c in self.cones)
        object.__setattr__(self, "cones", cones)
        if self.rank < 1:
            raise FanError("rank must be positive")
        seen = {}
        for c in cones:
            if c.rank != self.rank:
                raise FanError(f"cone of rank {c.rank} in a rank-{self.rank} fan")
            if not strongly_convex(c):
                raise FanError(f"cone {c.rays} is not strongly convex")
            for r in c.extremal_rays():
                seen.setdefault(r, None)
        object.__setattr__(self, "rays", tuple(seen))

    @classmethod
    def build(cls, rank: int, cones, trust: bool = False) -> "Fan":
        """Construct and, in rank <= 2 unless ``trust``, check face compatibility."""
        fan = cls(rank, tuple(cones))
        if not trust and rank == 2:
            _check_faces_rank2(fan.cones)
        return fan


@dataclass(frozen=True)
class HomogDeriv:
    p: tuple
    e: tuple

    def __post_init__(self):
        p = tuple(int(x) for x in self.p)
        e = tuple(int(x) for x in self.e)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "e", e)
        if len(p) != len(e):
            raise ValueError("p and e must have the same rank")
        if not is_primitive(p):
            raise ValueError(f"p = {p} is not primitive")

    @classmethod
    def normalized(cls, p, e) -> "HomogDeriv":
        """Replace p by its primitive part (a positive rescaling of the derivation)."""
        if not is_primitive(p):
            q = primitive_part(p)
            warnings.warn(f"p = {tuple(p)} is not primitive; using {q}", stacklevel=2)
            p = q
        return cls(p, e)

    @property
    def rank(self) -> int:
        return len(self.p)

    def pairing(self) -> int:
        return dot(self.p, self.e)


@dataclass(frozen=True)
class RootVerdict:
    integrable: bool
    extends: bool
    lnd: bool
    regular_on_fan: bool
    witness_ray: tuple | None = None
    case: str | None = None  # "dual-cone" | "root"

    def to_json(self) -> dict:
        return {
            "integrable": self.integrable,
            "extends": self.extends,
            "lnd": self.lnd,
            "regular": self.regular_on_fan,
            "witness": list(self.witness_ray) if self.witness_ray is not None else None,
            "case": self.case,
        }


def integrable_criterion(h: HomogDeriv) -> bool:
    """d_{p,e} is rationally integrable iff <p, e> = +-1."""
    return abs(h.pairing()) == 1


def chart_context(rank: int) -> VarContext:
    names = ("x", "y", "z") if rank <= 3 else tuple(f"x{i + 1}" for i in range(rank))
    return VarContext(names[:rank])


def to_derivation(h: HomogDeriv, ctx: VarContext | None = None) -> Derivation:
    """Coordinate form on the torus chart: d(x_j) = p_j * x_j * chi^e."""
    ctx = ctx or chart_context(h.rank)
    images = []
    for j, pj in enumerate(h.p):
        exps = [ek + (1 if k == j else 0) for k, ek in enumerate(h.e)]
        images.append(RatFunc.monomial(ctx, exps, pj))
    return Derivation(ctx, images)


def _root_witness(rays, e, p=None):
    """The ray rho with rho(e) = -1 and rho'(e) >= 0 for all others (and p = +-rho)."""
    values = [dot(r, e) for r in rays]
    hits = [i for i, v in enumerate(values) if v == -1]
    if len(hits) != 1 or any(v < 0 for i, v in enumerate(values) if i != hits[0]):
        return None
    rho = rays[hits[0]]
    if p is not None and tuple(p) != rho and tuple(-x for x in p) != rho:
        return None
    return rho


def extends_to_cone(h: HomogDeriv, c: Cone) -> RootVerdict:
    if h.rank != c.rank:
        raise ValueError("rank mismatch")
    witness = _root_witness(c.extremal_rays(), h.e, h.p)
    dual = in_dual(h.e, c)
    case = "root" if witness is not None else "dual-cone" if dual else None
    lnd = witness is not None
    return RootVerdict(integrable_criterion(h), dual or lnd, lnd, lnd, witness, case)


def regular_on_fan(h: HomogDeriv, fan: Fan) -> RootVerdict:
    """Regular G_a-action on a semi-affine X_fan: some rho_e in fan(1) with p = +-rho_e,
    rho_e(e) = -1 and rho(e) >= 0 for the remaining rays."""
    if h.rank != fan.rank:
        raise ValueError("rank mismatch")
    witness = _root_witness(fan.rays, h.e, h.p)
    per_cone = [extends_to_cone(h, c) for c in fan.cones]
    extends = all(v.extends for v in per_cone)
    regular = witness is not None
    if regular:
        case = "root"
    elif per_cone and all(v.case == "dual-cone" for v in per_cone):
        case = "dual-cone"
    else:
        case = None
    return RootVerdict(integrable_criterion(h), extends, regular, regular, witness, case)


def _grlex(e):
    return (sum(e), e)


def _roots_slice(rays, rank, bound, first):
    out = []
    for rest in product(range(-bound, bound + 1), repeat=rank - 1):
        e = (first,) + rest
        rho = _root_witness(rays, e)
        if rho is not None:
            out.append((e, rho))
    return out


def enumerate_roots(fan: Fan, bound: int, workers: int = 1) -> list:
    """All (e, rho_e) with max-norm of e at most ``bound``, in graded-lex order."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    firsts = range(-bound, bound + 1)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_roots_slice, *zip(*[(fan.rays, fan.rank, bound, f) for f in firsts]))
            found = [x for part in parts for x in part]
    else:
        found = [x for f in firsts for x in _roots_slice(fan.rays, fan.rank, bound, f)]
    return sorted(found, key=lambda pair: _grlex(pair[0]))


# --- semi-affineness ------------------------------------------------------------------


@dataclass(frozen=True)
class SemiAffineVerdict:
    status: str  # "convex" | "not-convex" | "unknown-probabilistic"
    result: str | None = None  # "pass" | "fail" for the probabilistic label
    samples: int = 0
    witness: tuple | None = None

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.status == "unknown-probabilistic":
            out["result"] = self.result
            out["samples"] = self.samples
        if self.witness is not None:
            out["witness"] = [str(x) for x in self.witness]
        return out


def _angle_cmp(a, b):
    ha = 0 if (a[1] > 0 or (a[1] == 0 and a[0] > 0)) else 1
    hb = 0 if (b[1] > 0 or (b[1] == 0 and b[0] > 0)) else 1
    if ha != hb:
        return ha - hb
    d = _det(a, b)
    return -1 if d > 0 else 1 if d < 0 else 0


def _semi_affine_rank2(fan: Fan) -> SemiAffineVerdict:
    rays = sorted(fan.rays, key=cmp_to_key(_angle_cmp))
    k = len(rays)
    if k <= 1:
        return SemiAffineVerdict("convex")
    two_cones = [c for c in fan.cones if len(c.extremal_rays()) == 2]
    gaps = []
    for i in range(k):
        a, b = rays[i], rays[(i + 1) % k]
        d = _det(a, b)
        mid = (a[0] + b[0], a[1] + b[1])
        if d > 0 and any(c.contains(mid) for c in two_cones):
            continue
        gaps.append("narrow" if d > 0 else "flat" if d == 0 else "wide")
    if not gaps:
        return SemiAffineVerdict("convex")
    if len(gaps) == 1 and gaps[0] != "narrow":
        return SemiAffineVerdict("convex")
    if len(gaps) == 2 and gaps == ["flat", "flat"]:
        return SemiAffineVerdict("convex")
    return SemiAffineVerdict("not-convex")


def semi_affine(fan: Fan, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> SemiAffineVerdict:
    """Convexity of the support, which for toric varieties is semi-affineness.

    Exact in rank <= 2.  In higher rank, random rational points of cone(fan(1))
    are tested against the union of the cones; the verdict is labeled
    probabilistic and a failing point is returned as witness.
    """
    if fan.rank == 1:
        return SemiAffineVerdict("convex")
    if fan.rank == 2:
        return _semi_affine_rank2(fan)
    rng = random.Random(seed)
    rays = fan.rays
    if not rays:
        return SemiAffineVerdict("unknown-probabilistic", "pass", 0)
    for _ in range(samples):
        lam = [Fraction(rng.randint(0, SAMPLE_DENOMINATOR), rng.randint(1, SAMPLE_DENOMINATOR))
               for _ in rays]
        point = tuple(sum(l * r[j] for l, r in zip(lam, rays)) for j in range(fan.rank))
        if not any(c.contains(point) for c in fan.cones):
            return SemiAffineVerdict("unknown-probabilistic", "fail", samples, point)
    return SemiAffineVerdict("unknown-probabilistic", "pass", samples)
