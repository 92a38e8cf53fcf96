"""Independent checks used to freeze expected values.

None of these go through the code paths they validate: evaluation at
rational points instead of symbolic identities, Hankel determinants instead
of Berlekamp-Massey, brute-force inequality loops instead of the root search.
"""

import random
from fractions import Fraction
from itertools import product


def random_points(n_vars, count=5, seed=0):
    rng = random.Random(seed)
    return [tuple(Fraction(rng.randint(-40, 40), rng.randint(1, 13)) for _ in range(n_vars))
            for _ in range(count)]


def agree_at_points(f, g, n_vars, count=5, seed=0):
    """f and g (callables on points) agree wherever both are defined."""
    checked = 0
    for pt in random_points(n_vars, count * 4, seed):
        try:
            a, b = f(pt), g(pt)
        except ZeroDivisionError:
            continue
        if a != b:
            return False
        checked += 1
        if checked == count:
            return True
    raise AssertionError("too few admissible evaluation points")


def det(matrix):
    m = [[Fraction(x) for x in row] for row in matrix]
    n = len(m)
    sign = 1
    out = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            sign = -sign
        out *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return sign * out


def hankel_nonsingular_up_to(seq, size):
    """True when every k x k Hankel matrix [seq[i+j]], k = 1..size, is invertible.

    Then no linear recurrence of order < size fits the sequence.
    """
    return all(det([[seq[i + j] for j in range(k)] for i in range(k)]) for k in range(1, size + 1))


def brute_roots(rays, rank, bound):
    out = set()
    for e in product(range(-bound, bound + 1), repeat=rank):
        for rho in rays:
            if sum(a * b for a, b in zip(rho, e)) != -1:
                continue
            others = [r for r in rays if r != rho]
            if all(sum(a * b for a, b in zip(r, e)) >= 0 for r in others):
                out.add((e, tuple(rho)))
    return out


def positive_functional(rays, box=5):
    """Some integer w with <w, r> > 0 for every ray, or None (strong convexity witness)."""
    rank = len(rays[0])
    for w in product(range(-box, box + 1), repeat=rank):
        if all(sum(a * b for a, b in zip(w, r)) > 0 for r in rays):
            return w
    return None
