"""Bounded exhaustive solving of coefficient equations over subgroups of F_r.

Variables ``x1..xn`` are the generators of a rank-``n`` free group, so the
left-hand side of an equation is an ordinary :class:`Word` over that rank.
Solutions are searched among subgroup elements of length <= ``bound``.

Search order: tuples by increasing total length; ties compare the last
variable first, each coordinate in shortlex order. The first solution in
that order is returned, so results are deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import AlphabetMismatch, BudgetExceeded, DegenerateTuple, InvalidLetter
from .stallings import SubgroupGraph, enumerate_elements, fold, basis_of
from .words import (
    Substitution,
    Word,
    apply,
    conjugate,
    invert,
    multiply,
    power,
    primitive_root,
)

DEFAULT_BUDGET = 10**8

_VAR_TOKEN = re.compile(r"([xX])(\d+)(?:\^(-?\d+))?")


def parse_variables(text: str, num_vars: int) -> Word:
    """Parse ``"x1 x2 X1"`` (``X`` = inverse, optional ``^k`` powers)."""
    letters = []
    pos = 0
    for m in re.finditer(r"\S+", text):
        tok = m.group()
        pos = m.start()
        if tok == "1":
            continue
        mm = _VAR_TOKEN.fullmatch(tok)
        if not mm:
            raise InvalidLetter(f"bad variable token {tok!r} at position {pos}", pos)
        idx = int(mm.group(2))
        if not 1 <= idx <= num_vars:
            raise InvalidLetter(f"variable {tok!r} at position {pos} outside x1..x{num_vars}", pos)
        sign = 1 if mm.group(1) == "x" else -1
        exp = int(mm.group(3)) if mm.group(3) else 1
        letters.extend([sign * idx if exp > 0 else -sign * idx] * abs(exp))
    return Word(letters, num_vars)


def format_variables(w: Word) -> str:
    return " ".join(f"x{x}" if x > 0 else f"X{-x}" for x in w.letters)


@dataclass(frozen=True)
class Equation:
    lhs: Word  # over the variables
    rhs: Word  # constant in F_r

    def variables(self) -> set[int]:
        return {abs(x) for x in self.lhs.letters}


@dataclass(frozen=True)
class CoefficientSystem:
    equations: tuple[Equation, ...]
    num_vars: int
    rank: int

    @classmethod
    def of(cls, pairs: Sequence[tuple[Word, Word]]) -> "CoefficientSystem":
        if not pairs:
            raise ValueError("empty system")
        n = pairs[0][0].rank
        r = pairs[0][1].rank
        eqs = []
        for lhs, rhs in pairs:
            if lhs.rank != n or rhs.rank != r:
                raise AlphabetMismatch("all equations must share the variable count and the ambient rank")
            eqs.append(Equation(lhs, rhs))
        return cls(tuple(eqs), n, r)

    @classmethod
    def from_dict(cls, data: dict, rank: int) -> "CoefficientSystem":
        n = int(data["vars"])
        pairs = [(parse_variables(e["lhs"], n), Word.parse(e["rhs"], rank)) for e in data["eqs"]]
        return cls.of(pairs)

    def to_dict(self) -> dict:
        return {
            "vars": self.num_vars,
            "eqs": [{"lhs": format_variables(e.lhs), "rhs": str(e.rhs)} for e in self.equations],
        }

    def holds(self, assignment: Substitution) -> bool:
        return all(apply(assignment, e.lhs) == e.rhs for e in self.equations)


@dataclass(frozen=True)
class Solution:
    assignment: Substitution
    domain: SubgroupGraph
    system: CoefficientSystem = field(repr=False)

    def verify(self) -> bool:
        return self.system.holds(self.assignment) and all(
            self.domain.read(w) == 0 for w in self.assignment.images
        )

    def to_dict(self) -> dict:
        return {f"x{i + 1}": str(w) for i, w in enumerate(self.assignment.images)}


class _Search:
    def __init__(self, system, domain, bound, budget, relevant, accept):
        if domain.rank != system.rank:
            raise AlphabetMismatch(f"domain rank {domain.rank} != system rank {system.rank}")
        self.system = system
        self.n = system.num_vars
        self.r = system.rank
        self.budget = budget
        self.accept = accept
        self.states = 0
        used = set(relevant or ())
        for e in system.equations:
            used |= e.variables()
        self.free = [i for i in range(1, self.n + 1) if i in used]
        elements = enumerate_elements(domain, bound)
        self.by_length: list[list[Word]] = [[] for _ in range(bound + 1)]
        for w in elements:
            self.by_length[len(w)].append(w)
        self.bound = bound
        # check each equation once its lowest-numbered variable is assigned
        self.checks: dict[int, list[Equation]] = {}
        self.constant: list[Equation] = []
        for e in system.equations:
            vs = e.variables()
            if vs:
                self.checks.setdefault(min(vs), []).append(e)
            else:
                self.constant.append(e)
        self.images = [Word.identity(self.r) for _ in range(self.n)]

    def run(self) -> Substitution | None:
        if any(e.rhs for e in self.constant):
            return None
        order = list(reversed(self.free))
        max_total = self.bound * len(order)
        for total in range(max_total + 1):
            found = self._assign(order, 0, total)
            if found is not None:
                return found
        return None

    def _assign(self, order, pos, remaining):
        if pos == len(order):
            if remaining:
                return None
            sub = Substitution(self.images, self.r)
            if self.accept is not None and not self.accept(sub):
                return None
            return sub
        var = order[pos]
        left = len(order) - pos - 1
        lo = max(0, remaining - self.bound * left)
        hi = min(self.bound, remaining)
        for length in range(lo, hi + 1):
            for w in self.by_length[length]:
                self.states += 1
                if self.states > self.budget:
                    raise BudgetExceeded(self.states, self.budget)
                self.images[var - 1] = w
                if self._consistent(var):
                    found = self._assign(order, pos + 1, remaining - length)
                    if found is not None:
                        return found
        self.images[var - 1] = Word.identity(self.r)
        return None

    def _consistent(self, var):
        eqs = self.checks.get(var)
        if not eqs:
            return True
        sub = Substitution(self.images, self.r)
        return all(apply(sub, e.lhs) == e.rhs for e in eqs)


def _search(system, domain, bound, budget, relevant=None, accept=None) -> Substitution | None:
    if bound < 0:
        raise ValueError("bound must be >= 0")
    return _Search(system, domain, bound, budget, relevant, accept).run()


def solve_in_subgroup(
    system: CoefficientSystem,
    domain: SubgroupGraph,
    bound: int,
    budget: int = DEFAULT_BUDGET,
) -> Solution | None:
    """First solution with every variable in ``domain`` and of length <= bound.

    ``None`` means no solution up to the bound, not that none exists.
    Variables absent from every equation are set to the identity.
    """
    sub = _search(system, domain, bound, budget)
    if sub is None:
        return None
    sol = Solution(sub, domain, system)
    if not sol.verify():
        raise AssertionError(f"solver produced a non-solution {sol}")
    return sol


def solve_verbal(
    w: Word,
    h: Word,
    domain: SubgroupGraph,
    bound: int,
    budget: int = DEFAULT_BUDGET,
) -> Solution | None:
    """Solve ``w(x_1, ..., x_n) = h`` with the x_i in ``domain``."""
    return solve_in_subgroup(CoefficientSystem.of([(w, h)]), domain, bound, budget)


def _conjugator(g: Word, h: Word) -> Word | None:
    """Some ``u`` with ``u^-1 h u == g``, or None."""
    p, hc = h.cyclic_decomposition()
    q, gc = g.cyclic_decomposition()
    if len(hc) != len(gc):
        return None
    n = len(hc)
    xs = hc.letters + hc.letters
    for i in range(max(n, 1)):
        if xs[i:i + n] == gc.letters:
            c = Word._trusted(hc.letters[:i], h.rank)
            # g = q^-1 c^-1 (p h p^-1) c q
            return multiply(multiply(invert(p), c), q)
    return None


def conjugator_of_tuples(g: Sequence[Word], h: Sequence[Word]) -> Word | None:
    """Shortest ``u`` (then shortlex-first) with ``g_i == u^-1 h_i u`` for all i."""
    if len(g) != len(h):
        raise ValueError("tuples must have equal length")
    pivot = next((i for i, w in enumerate(h) if w), None)
    if pivot is None:
        raise DegenerateTuple("every entry of the target tuple is trivial")
    for gi, hi in zip(g, h):
        if bool(gi) != bool(hi):
            return None
    u0 = _conjugator(g[pivot], h[pivot])
    if u0 is None:
        return None
    # all solutions of the pivot equation: root^k * u0, root = primitive root of h_pivot
    root, _ = primitive_root(h[pivot])
    s, core = root.cyclic_decomposition()
    # Conjugating by a large power of the root grows linearly in |k| once k
    # exceeds the combined length of the data, so this window is exhaustive.
    window = sum(len(x) for x in g) + sum(len(x) for x in h) + 2 * len(u0) + 2 * len(s) + 2
    best = None
    for k in range(-window, window + 1):
        u = multiply(power(root, k), u0)
        if all(conjugate(hi, u) == gi for gi, hi in zip(g, h)):
            if best is None or u.shortlex_key() < best.shortlex_key():
                best = u
    return best


@dataclass(frozen=True)
class CTestVerdict:
    """Outcome of checking the C-test / Lee properties on one pair of tuples.

    kind is one of
      ``vacuous``            w(g) != w(v), nothing to check
      ``consistent``         w(g) == w(v) != 1 and the tuples are conjugate
      ``violation``          w(g) == w(v) != 1 but no conjugator exists
      ``lee-consistent``     w(g) == w(v) == 1 and both tuples generate cyclic subgroups
      ``lee-violation``      w vanishes on a tuple generating a non-cyclic subgroup
    """

    kind: str
    value: Word | None = None
    conjugator: Word | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.value is not None:
            out["value"] = str(self.value)
        if self.conjugator is not None:
            out["conjugator"] = str(self.conjugator)
        return out


def _generates_cyclic(ws: Sequence[Word]) -> bool:
    return fold(ws, ws[0].rank).subgroup_rank <= 1


def check_ctest_property(w: Word, tuples: Sequence[tuple[Sequence[Word], Sequence[Word]]]) -> list[CTestVerdict]:
    """Check ``w`` against the C-test definition on each ``(g, v)`` pair.

    For ``w(g) == w(v) != 1`` a conjugator ``s`` with ``s^-1 g_i s == v_i``
    is searched exactly. When both values are trivial, the Lee property
    (``w`` vanishes exactly on tuples generating cyclic subgroups) is checked.
    """
    verdicts = []
    for g, v in tuples:
        if len(g) != w.rank or len(v) != w.rank:
            raise AlphabetMismatch(f"word in {w.rank} variables applied to tuples of length {len(g)}, {len(v)}")
        r = g[0].rank
        wg = apply(Substitution(g, r), w)
        wv = apply(Substitution(v, r), w)
        if wg != wv:
            verdicts.append(CTestVerdict("vacuous"))
        elif wg:
            s = conjugator_of_tuples(v, g)
            verdicts.append(CTestVerdict("consistent" if s is not None else "violation", wg, s))
        else:
            ok = _generates_cyclic(g) and _generates_cyclic(v)
            verdicts.append(CTestVerdict("lee-consistent" if ok else "lee-violation", wg))
    return verdicts


def retraction_system(h: SubgroupGraph) -> CoefficientSystem:
    """The system ``h_i = v_i(x_1, ..., x_r)`` for a basis ``h_i`` of the subgroup."""
    r = h.rank
    pairs = [(Word._trusted(b.letters, r), b) for b in basis_of(h)]
    if not pairs:
        raise ValueError("the trivial subgroup has an empty retraction system")
    return CoefficientSystem.of(pairs)


def find_discriminating_retraction(
    domain: SubgroupGraph,
    targets: Sequence[Word],
    bound: int,
    budget: int = DEFAULT_BUDGET,
) -> Substitution | None:
    """A retraction onto ``domain`` that is injective on ``targets``, searched up to ``bound``."""
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise ValueError("targets must be pairwise distinct")
    r = domain.rank
    relevant = {abs(x) for t in targets for x in t.letters}
    if domain.is_trivial():
        if len(targets) > 1:
            return None
        return Substitution([Word.identity(r)] * r, r)
    system = retraction_system(domain)

    def injective(sub):
        images = [apply(sub, t) for t in targets]
        return len(set(images)) == len(images)

    sub = _search(system, domain, bound, budget, relevant=relevant, accept=injective)
    if sub is not None:
        assert system.holds(sub) and injective(sub)
    return sub
