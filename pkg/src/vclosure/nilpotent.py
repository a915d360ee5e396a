"""Free nilpotent groups N(r, c) = F_r / gamma_{c+1} F_r.

Elements are Mal'cev coordinates over a Hall basis: ``g = c_1^{e_1} ...
c_N^{e_N}`` with basic commutators ordered by weight. Products are formed by
collection from the left. The conjugation tables the collector needs are
computed once per basis through the Magnus embedding ``f_i -> 1 + X_i``
into integer power series in non-commuting X_i truncated above degree c,
which is faithful on N(r, c).

Commutators follow the package-wide convention ``[u, v] = u^-1 v^-1 u v``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import BasisTooLarge, BudgetExceeded
from .words import Word, letter_to_char

DEFAULT_BASIS_CAP = 500
DEFAULT_BUDGET = 10**7

Series = dict  # monomial (tuple of generator indices) -> int


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def witt_count(r: int, w: int) -> int:
    """Number of basic commutators of weight ``w`` on ``r`` generators."""
    return sum(_mobius(d) * r ** (w // d) for d in range(1, w + 1) if w % d == 0) // w


def _s_mul(a: Series, b: Series, c: int) -> Series:
    out: Series = {}
    for ma, ca in a.items():
        room = c - len(ma)
        for mb, cb in b.items():
            if len(mb) <= room:
                m = ma + mb
                v = out.get(m, 0) + ca * cb
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
    return out


def _s_inv(a: Series, c: int) -> Series:
    y = {m: v for m, v in a.items() if m}
    assert a.get((), 0) == 1
    neg = {m: -v for m, v in y.items()}
    out: Series = {(): 1}
    term: Series = {(): 1}
    for _ in range(c):
        term = _s_mul(term, neg, c)
        if not term:
            break
        for m, v in term.items():
            out[m] = out.get(m, 0) + v
    return {m: v for m, v in out.items() if v}


def _s_pow(a: Series, e: int, c: int) -> Series:
    if e < 0:
        a, e = _s_inv(a, c), -e
    out: Series = {(): 1}
    for _ in range(e):
        out = _s_mul(out, a, c)
    return out


def _s_sub(a: Series, b: Series) -> Series:
    out = dict(a)
    for m, v in b.items():
        out[m] = out.get(m, 0) - v
    return {m: v for m, v in out.items() if v}


class HallBasis:
    """Basic commutators of weight <= c on r generators, in collection order.

    ``elements[i]`` is ``("gen", g)`` or ``("br", u, v)`` meaning ``[c_u, c_v]``.
    """

    def __init__(self, r: int, c: int):
        self.rank = r
        self.nclass = c
        elements: list[tuple] = [("gen", i) for i in range(r)]
        weights = [1] * r
        for w in range(2, c + 1):
            new = []
            for u in range(len(elements)):
                for v in range(u):
                    if weights[u] + weights[v] != w:
                        continue
                    if elements[u][0] == "br" and elements[u][2] > v:
                        continue
                    new.append(("br", u, v))
            elements.extend(new)
            weights.extend([w] * len(new))
        self.elements = elements
        self.weights = weights
        self.size = len(elements)
        self.by_weight = [[i for i, wt in enumerate(weights) if wt == w] for w in range(c + 1)]
        self._magnus: list[Series] = []
        self._lie: list[Series] = []
        for e in elements:
            if e[0] == "gen":
                self._magnus.append({(): 1, (e[1],): 1})
                self._lie.append({(e[1],): 1})
            else:
                a, b = self._magnus[e[1]], self._magnus[e[2]]
                self._magnus.append(_s_mul(_s_mul(_s_inv(a, c), _s_inv(b, c), c), _s_mul(a, b, c), c))
                la, lb = self._lie[e[1]], self._lie[e[2]]
                self._lie.append(_s_sub(_s_mul(la, lb, c), _s_mul(lb, la, c)))
        self._solvers = {w: self._make_solver(w) for w in range(1, c + 1)}
        self._conj: dict[tuple[int, int, int, int], tuple[tuple[int, int], ...]] = {}
        # c_j commutes with c_k once weight(j) + weight(k) > c; such j never move
        self._movers = [
            range(k + 1, next((j for j in range(k + 1, self.size) if weights[j] + weights[k] > c), self.size))
            for k in range(self.size)
        ]

    def __eq__(self, other):
        if isinstance(other, HallBasis):
            return (self.rank, self.nclass) == (other.rank, other.nclass)
        return NotImplemented

    def __hash__(self):
        return hash((self.rank, self.nclass))

    def __repr__(self):
        return f"N({self.rank},{self.nclass})"

    def name(self, i: int) -> str:
        e = self.elements[i]
        if e[0] == "gen":
            return letter_to_char(e[1] + 1)
        return f"[{self.name(e[1])},{self.name(e[2])}]"

    def names(self) -> list[str]:
        return [self.name(i) for i in range(self.size)]

    # -- Magnus side --------------------------------------------------------

    def _make_solver(self, w: int):
        cols = self.by_weight[w]
        if not cols:
            return None
        monos = list(itertools.product(range(self.rank), repeat=w))
        matrix = [[self._lie[j].get(m, 0) for j in cols] for m in monos]
        # pick len(cols) independent rows, then invert that square block
        chosen, reduced = [], []
        for i, row in enumerate(matrix):
            vec = [Fraction(x) for x in row]
            for piv, prow in reduced:
                if vec[piv]:
                    f = vec[piv] / prow[piv]
                    vec = [x - f * y for x, y in zip(vec, prow)]
            piv = next((k for k, x in enumerate(vec) if x), None)
            if piv is not None:
                chosen.append(i)
                reduced.append((piv, vec))
                if len(chosen) == len(cols):
                    break
        assert len(chosen) == len(cols), "Lie polynomials of basic commutators must be independent"
        inverse = _rational_inverse([[Fraction(x) for x in matrix[i]] for i in chosen])
        return cols, monos, matrix, chosen, inverse

    def magnus(self, exps: Sequence[int]) -> Series:
        c = self.nclass
        out: Series = {(): 1}
        for i, e in enumerate(exps):
            if e:
                out = _s_mul(out, _s_pow(self._magnus[i], e, c), c)
        return out

    def magnus_word(self, w: Word) -> Series:
        c = self.nclass
        gens = [self._magnus[i] for i in range(self.rank)]
        invs = [_s_inv(g, c) for g in gens]
        out: Series = {(): 1}
        for x in w.letters:
            out = _s_mul(out, gens[x - 1] if x > 0 else invs[-x - 1], c)
        return out

    def coordinates(self, series: Series) -> tuple[int, ...]:
        """Mal'cev coordinates of a group element given by its Magnus series."""
        c = self.nclass
        exps = [0] * self.size
        s = dict(series)
        for w in range(1, c + 1):
            if any(0 < len(m) < w for m in s):
                raise ValueError("series has a stray lower-degree term")
            solver = self._solvers[w]
            if solver is None:
                continue
            cols, monos, matrix, chosen, inverse = solver
            v = [s.get(monos[i], 0) for i in range(len(monos))]
            rhs = [v[i] for i in chosen]
            sol = [sum(inverse[a][b] * rhs[b] for b in range(len(rhs))) for a in range(len(cols))]
            if any(x.denominator != 1 for x in sol):
                raise ValueError("series is not in the image of N(r, c)")
            sol = [int(x) for x in sol]
            for mi, row in enumerate(matrix):
                if sum(a * b for a, b in zip(row, sol)) != v[mi]:
                    raise ValueError("series is not in the image of N(r, c)")
            part = {(): 1}
            for j, e in zip(cols, sol):
                exps[j] = e
                if e:
                    part = _s_mul(part, _s_pow(self._magnus[j], e, c), c)
            s = _s_mul(_s_inv(part, c), s, c)
        if s != {(): 1}:
            raise ValueError("series is not in the image of N(r, c)")
        return tuple(exps)

    # -- collection ---------------------------------------------------------

    def conjugate_table(self, j: int, sj: int, k: int, sk: int) -> tuple[tuple[int, int], ...]:
        """Normal form of ``c_k^-sk c_j^sj c_k^sk`` (j > k) as syllables."""
        key = (j, sj, k, sk)
        hit = self._conj.get(key)
        if hit is None:
            c = self.nclass
            a = _s_pow(self._magnus[k], sk, c)
            series = _s_mul(_s_mul(_s_inv(a, c), _s_pow(self._magnus[j], sj, c), c), a, c)
            exps = self.coordinates(series)
            hit = tuple((i, e) for i, e in enumerate(exps) if e)
            self._conj[key] = hit
        return hit

    def collect_into(self, exps: list[int], syllables: Sequence[tuple[int, int]]) -> list[int]:
        """Multiply the collected word ``exps`` on the right by ``syllables``, in place."""
        movers = self._movers
        stack = list(reversed(syllables))
        while stack:
            k, m = stack.pop()
            if m == 0:
                continue
            # factors commuting with c_k also commute with everything moved
            # past them below, so they stay where they are
            tail = [(j, exps[j]) for j in movers[k] if exps[j]]
            if not tail:
                exps[k] += m
                continue
            s = 1 if m > 0 else -1
            for j, _ in tail:
                exps[j] = 0
            exps[k] += s
            if m != s:
                stack.append((k, m - s))
            for j, e in reversed(tail):
                conj = self.conjugate_table(j, 1 if e > 0 else -1, k, s)
                rev = conj[::-1]
                for _ in range(abs(e)):
                    stack.extend(rev)
        return exps


@lru_cache(maxsize=None)
def _cached_basis(r: int, c: int) -> HallBasis:
    return HallBasis(r, c)


def hall_basis(r: int, c: int, cap: int = DEFAULT_BASIS_CAP) -> HallBasis:
    if r < 1 or c < 1:
        raise ValueError("rank and class must be >= 1")
    size = sum(witt_count(r, w) for w in range(1, c + 1))
    if size > cap:
        raise BasisTooLarge(f"N({r},{c}) has {size} basic commutators, cap is {cap}")
    return _cached_basis(r, c)


def _rational_inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next(i for i in range(col, n) if a[i][col])
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]


@dataclass(frozen=True)
class NilElement:
    basis: HallBasis
    exps: tuple[int, ...]

    @classmethod
    def identity(cls, basis: HallBasis) -> "NilElement":
        return cls(basis, (0,) * basis.size)

    @classmethod
    def generator(cls, basis: HallBasis, i: int, power: int = 1) -> "NilElement":
        """``f_i ** power`` (1-based generator index)."""
        e = [0] * basis.size
        e[i - 1] = power
        return cls(basis, tuple(e))

    def is_identity(self) -> bool:
        return not any(self.exps)

    def in_derived_subgroup(self) -> bool:
        return not any(self.exps[i] for i in self.basis.by_weight[1])

    def syllables(self) -> list[tuple[int, int]]:
        return [(i, e) for i, e in enumerate(self.exps) if e]

    def __mul__(self, other: "NilElement") -> "NilElement":
        return nil_multiply(self, other)

    def to_dict(self) -> dict:
        return {"basis": repr(self.basis), "exps": list(self.exps)}

    @classmethod
    def from_dict(cls, data: dict) -> "NilElement":
        label = data["basis"].strip()
        r, c = (int(x) for x in label[label.index("(") + 1:label.index(")")].split(","))
        basis = hall_basis(r, c)
        exps = tuple(int(x) for x in data["exps"])
        if len(exps) != basis.size:
            raise ValueError(f"{label} needs {basis.size} exponents, got {len(exps)}")
        return cls(basis, exps)


def _same_basis(x: NilElement, y: NilElement) -> HallBasis:
    if x.basis != y.basis:
        raise ValueError(f"elements of {x.basis} and {y.basis}")
    return x.basis


def collect(w: Word, basis: HallBasis) -> NilElement:
    """Normal form of the image of ``w`` in N(r, c)."""
    if w.rank != basis.rank:
        raise ValueError(f"word over rank {w.rank}, basis over rank {basis.rank}")
    syl = [(abs(x) - 1, 1 if x > 0 else -1) for x in w.letters]
    return NilElement(basis, tuple(basis.collect_into([0] * basis.size, syl)))


def nil_multiply(x: NilElement, y: NilElement) -> NilElement:
    basis = _same_basis(x, y)
    return NilElement(basis, tuple(basis.collect_into(list(x.exps), y.syllables())))


def nil_invert(x: NilElement) -> NilElement:
    syl = [(i, -e) for i, e in reversed(x.syllables())]
    return NilElement(x.basis, tuple(x.basis.collect_into([0] * x.basis.size, syl)))


def nil_commutator(x: NilElement, y: NilElement) -> NilElement:
    """``[x, y] = x^-1 y^-1 x y``."""
    basis = _same_basis(x, y)
    exps = list(nil_invert(x).exps)
    basis.collect_into(exps, nil_invert(y).syllables() + x.syllables() + y.syllables())
    return NilElement(basis, tuple(exps))


def nil_power(x: NilElement, n: int) -> NilElement:
    base = x if n >= 0 else nil_invert(x)
    out = NilElement.identity(x.basis)
    for _ in range(abs(n)):
        out = nil_multiply(out, base)
    return out


def magnus_coordinates(w: Word, basis: HallBasis) -> tuple[int, ...]:
    """Coordinates of ``w`` computed through the Magnus embedding alone."""
    return basis.coordinates(basis.magnus_word(w))


def class2_coordinates(w: Word, basis: HallBasis) -> tuple[int, ...]:
    """Closed-form coordinates in N(r, 2).

    Moving ``f_j^s`` right past ``f_i^t`` (j > i) leaves ``[f_j, f_i]^{st}``
    behind, so the coordinate of ``[f_j, f_i]`` counts signed pairs where
    ``f_j`` occurs before ``f_i``.
    """
    if basis.nclass != 2:
        raise ValueError("closed form only for class 2")
    exps = [0] * basis.size
    index = {(e[1], e[2]): i for i, e in enumerate(basis.elements) if e[0] == "br"}
    seen = [0] * basis.rank  # signed count of each generator so far
    for x in w.letters:
        g, s = abs(x) - 1, (1 if x > 0 else -1)
        exps[g] += s
        for j in range(g + 1, basis.rank):
            if seen[j]:
                exps[index[(j, g)]] += seen[j] * s
        seen[g] += s
    return tuple(exps)


# -- commutator width -------------------------------------------------------


@dataclass(frozen=True)
class WidthResult:
    representable: bool
    witness: tuple[tuple[NilElement, NilElement], ...] | None
    commutators: int
    coord_bound: int

    def to_dict(self) -> dict:
        out = {
            "result": "representable" if self.representable else "not-representable-within-bound",
            "commutators": self.commutators,
            "coord_bound": self.coord_bound,
        }
        if self.witness is not None:
            out["witness"] = [[list(x.exps), list(y.exps)] for x, y in self.witness]
        return out


class _Budget:
    def __init__(self, budget):
        self.budget = budget
        self.states = 0

    def tick(self, n=1):
        self.states += n
        if self.states > self.budget:
            raise BudgetExceeded(self.states, self.budget)


def _operands(basis: HallBasis, bound: int, weights=None):
    """Elements with coordinates in [-bound, bound] on the given weights, 0 elsewhere.

    By default every weight below the class: a top-weight factor is central,
    so it never changes a commutator and may be taken to be 0.
    """
    if weights is None:
        weights = range(1, basis.nclass)
    idx = [i for w in weights for i in basis.by_weight[w]]
    rng = [0] + [v for k in range(1, bound + 1) for v in (k, -k)]
    for values in itertools.product(rng, repeat=len(idx)):
        e = [0] * basis.size
        for i, v in zip(idx, values):
            e[i] = v
        yield NilElement(basis, tuple(e))


def _require_derived(g: NilElement):
    if not g.in_derived_subgroup():
        raise ValueError("element is not in the derived subgroup")


def _single_commutator(g: NilElement, bound: int, budget: _Budget):
    basis = g.basis
    c = basis.nclass
    w2 = basis.by_weight[2] if c >= 2 else []
    target2 = tuple(g.exps[i] for i in w2)
    lin = list(_operands(basis, bound, weights=[1]))
    # modulo gamma_3 a commutator depends only on the abelianized operands
    higher = list(_operands(basis, bound, weights=range(2, c))) if c > 2 else [NilElement.identity(basis)]
    for x1 in lin:
        for y1 in lin:
            budget.tick()
            if tuple(nil_commutator(x1, y1).exps[i] for i in w2) != target2:
                continue
            for hx in higher:
                x = nil_multiply(x1, hx)
                for hy in higher:
                    budget.tick()
                    y = nil_multiply(y1, hy)
                    if nil_commutator(x, y) == g:
                        return (x, y)
    return None


def _commutator_values(basis: HallBasis, bound: int, budget: _Budget) -> dict:
    ops = list(_operands(basis, bound))
    values = {}
    for x in ops:
        for y in ops:
            budget.tick()
            values.setdefault(nil_commutator(x, y), (x, y))
    return values


def commutator_width_bounded(g: NilElement, k: int, coord_bound: int, budget: int = DEFAULT_BUDGET) -> WidthResult:
    """Search ``g = [x_1, y_1] ... [x_k, y_k]`` with operand coordinates in [-B, B].

    A negative answer only covers operands within the coordinate bound.
    """
    _require_derived(g)
    if k < 0:
        raise ValueError("k must be >= 0")
    tracker = _Budget(budget)
    if k == 0:
        return WidthResult(g.is_identity(), () if g.is_identity() else None, 0, coord_bound)
    if k == 1:
        pair = _single_commutator(g, coord_bound, tracker)
        return WidthResult(pair is not None, (pair,) if pair else None, 1, coord_bound)
    values = _commutator_values(g.basis, coord_bound, tracker)

    def split(target, left):
        if left == 1:
            pair = values.get(target)
            return [pair] if pair else None
        for value, pair in values.items():
            tracker.tick()
            rest = split(nil_multiply(nil_invert(value), target), left - 1)
            if rest is not None:
                return [pair] + rest
        return None

    found = split(g, k)
    return WidthResult(found is not None, tuple(found) if found else None, k, coord_bound)


@dataclass(frozen=True)
class CommutatorForm:
    """``g = [g_1, z_1] ... [g_r, z_r]`` with z_i the basis generators."""

    factors: tuple[NilElement, ...]

    def product(self) -> NilElement:
        basis = self.factors[0].basis
        out = NilElement.identity(basis)
        for i, gi in enumerate(self.factors, start=1):
            out = nil_multiply(out, nil_commutator(gi, NilElement.generator(basis, i)))
        return out

    def to_dict(self) -> dict:
        return {"factors": [list(f.exps) for f in self.factors]}


def verify_commutator_form(
    g: NilElement, basis: HallBasis | None = None, coord_bound: int = 2, budget: int = DEFAULT_BUDGET
) -> CommutatorForm | None:
    """Find g_1..g_r (coordinates within the bound) with ``g = prod [g_i, z_i]``."""
    basis = basis or g.basis
    if basis != g.basis:
        raise ValueError("element and basis disagree")
    _require_derived(g)
    tracker = _Budget(budget)
    r = basis.rank
    ops = list(_operands(basis, coord_bound))
    tables = []
    for i in range(1, r + 1):
        z = NilElement.generator(basis, i)
        table = {}
        for x in ops:
            tracker.tick()
            table.setdefault(nil_commutator(x, z), x)
        tables.append(table)
    last = tables[-1]
    for prefix in itertools.product(*(list(t.items()) for t in tables[:-1])):
        tracker.tick()
        acc = NilElement.identity(basis)
        for value, _ in prefix:
            acc = nil_multiply(acc, value)
        rest = nil_multiply(nil_invert(acc), g)
        x_last = last.get(rest)
        if x_last is not None:
            form = CommutatorForm(tuple(x for _, x in prefix) + (x_last,))
            assert form.product() == g
            return form
    return None
