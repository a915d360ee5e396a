"""Independent reference implementations used by the tests.

Nothing here calls the folding, solving or collection code under test;
each oracle works from definitions with brute force.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from vclosure.words import Word


def naive_reduce(letters):
    """Delete the leftmost cancelling pair until none is left."""
    xs = list(letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(xs) - 1):
            if xs[i] == -xs[i + 1]:
                del xs[i:i + 2]
                changed = True
                break
    return tuple(xs)


def letters_of(rank):
    return [s * i for i in range(1, rank + 1) for s in (1, -1)]


def reduced_tuples(rank, max_len):
    """Every reduced letter tuple of length <= max_len (unordered)."""
    out = [()]
    frontier = [()]
    for _ in range(max_len):
        nxt = []
        for t in frontier:
            for x in letters_of(rank):
                if not t or t[-1] != -x:
                    nxt.append(t + (x,))
        out.extend(nxt)
        frontier = nxt
    return out


def random_word(rng: random.Random, rank: int, length: int) -> Word:
    letters = []
    while len(letters) < length:
        x = rng.choice(letters_of(rank))
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return Word(letters, rank)


def _products_upto(gens, k):
    moves = [g.letters for g in gens] + [tuple(-x for x in reversed(g.letters)) for g in gens]
    seen = {()}
    frontier = [()]
    for _ in range(k):
        nxt = []
        for e in frontier:
            for m in moves:
                p = naive_reduce(e + m)
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
    return seen


def _inv(t):
    return tuple(-x for x in reversed(t))


def nielsen_shorten(gens):
    """Apply length-reducing Nielsen moves until none applies.

    The moves u -> u v^{+-1} and u -> v^{+-1} u keep the generated subgroup,
    and the shorter generating set makes bounded products reach further.
    """
    xs = [g.letters for g in gens if g.letters]
    rank = gens[0].rank if gens else 1
    changed = True
    while changed:
        changed = False
        xs = [x for x in xs if x]
        uniq = []
        for x in xs:
            if x not in uniq and _inv(x) not in uniq:
                uniq.append(x)
        xs = uniq
        for i, u in enumerate(xs):
            for j, v in enumerate(xs):
                if i == j:
                    continue
                for e in (v, _inv(v)):
                    for cand in (naive_reduce(u + e), naive_reduce(e + u)):
                        if len(cand) < len(u):
                            xs[i] = cand
                            changed = True
                            break
                    if changed:
                        break
                if changed:
                    break
            if changed:
                break
    return [Word(x, rank) for x in xs]


def product_closure(gens, rank, max_len, half=4):
    """Reduced products of at most ``2 * half`` factors from gens and inverses,
    keeping those of length <= max_len.

    Meet in the middle: a product p*q is short only if q starts with the
    inverse of a long enough suffix of p, so q is looked up by that prefix.
    """
    gens = [g for g in gens if g.letters]
    halves = _products_upto(gens, half)
    by_prefix = {}
    for q in halves:
        for m in range(len(q) + 1):
            by_prefix.setdefault(q[:m], []).append(q)
    out = set()
    for p in halves:
        for m in range(len(p) + 1):
            need = tuple(-x for x in reversed(p[len(p) - m:]))
            for q in by_prefix.get(need, ()):
                if len(p) + len(q) - 2 * m <= max_len:
                    r = naive_reduce(p + q)
                    if len(r) <= max_len:
                        out.add(r)
    return out


def set_partitions(n):
    """Restricted growth strings of length n."""
    def rec(prefix, m):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(m + 1):
            yield from rec(prefix + [b], max(m, b + 1))
    yield from rec([], 0)


def minors_gcd(m, k):
    rows, cols = len(m), len(m[0]) if m else 0
    g = 0
    for ri in itertools.combinations(range(rows), k):
        for ci in itertools.combinations(range(cols), k):
            g = math.gcd(g, int(_det([[m[i][j] for j in ci] for i in ri])))
    return g


def _det(a):
    a = [[Fraction(x) for x in row] for row in a]
    n = len(a)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            d = -d
        d *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def invariant_factors_oracle(m):
    """d_k = D_k / D_{k-1} with D_k the gcd of the k x k minors."""
    rows, cols = len(m), len(m[0]) if m else 0
    out = []
    prev = 1
    for k in range(1, min(rows, cols) + 1):
        dk = minors_gcd(m, k)
        if dk == 0:
            out.extend([0] * (min(rows, cols) - len(out)))
            break
        out.append(dk // prev)
        prev = dk
    return tuple(out)


def magnus_power_word(letters, rank, degree):
    """Magnus image of a word as a dict monomial -> coefficient, truncated."""
    series = {(): 1}
    for x in letters:
        g = abs(x) - 1
        # (1 + X)^{+-1} truncated
        if x > 0:
            factor = {(): 1, (g,): 1}
        else:
            factor = {(g,) * k: (-1) ** k for k in range(degree + 1)}
        out = {}
        for m1, c1 in series.items():
            for m2, c2 in factor.items():
                if len(m1) + len(m2) <= degree:
                    out[m1 + m2] = out.get(m1 + m2, 0) + c1 * c2
        series = {m: c for m, c in out.items() if c}
    return series
