"""Retract / verbal-closedness decisions and verbal closures in F_r.

For subgroups of a free group of finite rank, being a retract, being
verbally closed and being algebraically closed coincide, so one pipeline
answers all three. Verdicts are ``yes`` (with a retraction that has been
checked), ``no`` (with a certificate that can be re-checked) or ``unknown``
(bounded search exhausted).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abelian import abelian_retract_obstruction, bezout, exponent_vector, vector_gcd
from .equations import (
    DEFAULT_BUDGET,
    CoefficientSystem,
    Equation,
    format_variables,
    retraction_system,
    solve_in_subgroup,
)
from .errors import BudgetExceeded, InconsistencyError
from .stallings import SubgroupGraph, basis_of, contains, fold, fringe, includes, intersect
from .words import Substitution, Word, apply, invert, multiply, power

Endomorphism = Substitution

DEFAULT_BOUND = 4


@dataclass(frozen=True)
class RetractVerdict:
    kind: str  # "yes" | "no" | "unknown"
    witness: Endomorphism | None = None
    certificate: dict | None = None
    bound: int | None = None
    note: str | None = None
    equation: Equation | None = field(default=None, compare=False)

    @property
    def decisive(self) -> bool:
        return self.kind != "unknown"

    def to_dict(self) -> dict:
        out: dict = {"verdict": self.kind}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.bound is not None:
            out["bound"] = self.bound
        if self.note:
            out["note"] = self.note
        if self.equation is not None:
            out["equation"] = {"lhs": format_variables(self.equation.lhs), "rhs": str(self.equation.rhs)}
        return out


def verify_retraction(phi: Endomorphism, h) -> bool:
    """``phi`` fixes every basis word of H and maps F_r into H.

    ``h`` is a :class:`SubgroupGraph` or a list of basis words.
    """
    if isinstance(h, SubgroupGraph):
        graph, basis = h, basis_of(h)
    else:
        basis = list(h)
        graph = fold(basis, phi.target_rank)
    if phi.source_rank != graph.rank or phi.target_rank != graph.rank:
        return False
    return all(apply(phi, w) == w for w in basis) and all(contains(graph, x) for x in phi.images)


def _cyclic_witness(h: Word, k: tuple[int, ...]) -> Endomorphism:
    _, l = bezout(k)
    return Substitution([power(h, li) for li in l], h.rank)


def falsifying_equation(h: Word) -> Equation:
    """``x_1^{k_1} ... x_r^{k_r} h'(x_1, ..., x_r) = h`` for ``h = f_1^{k_1} ... f_r^{k_r} h'``.

    Always solvable in F_r (take x_i = f_i); solvable in the cyclic group
    generated by h exactly when the exponent vector of h is primitive.
    """
    r = h.rank
    k = exponent_vector(h)
    leading = Word.identity(r)
    for i, ki in enumerate(k, start=1):
        leading = multiply(leading, power(Word.generator(i, r), ki))
    remainder = multiply(invert(leading), h)
    as_vars = lambda w: Word._trusted(w.letters, r)  # noqa: E731
    return Equation(multiply(as_vars(leading), as_vars(remainder)), h)


def check_certificate(h: SubgroupGraph, verdict: RetractVerdict) -> bool:
    """Re-derive a ``no`` certificate from scratch."""
    cert = verdict.certificate or {}
    kind = cert.get("type")
    if kind == "rank-exceeds-ambient":
        return h.subgroup_rank > h.rank and cert["rank"] == h.subgroup_rank
    if kind == "proper-full-rank":
        return h.subgroup_rank == h.rank and not h.is_full()
    if kind == "cyclic-non-primitive":
        basis = basis_of(h)
        if len(basis) != 1:
            return False
        k = exponent_vector(basis[0])
        return list(k) == cert["vector"] and vector_gcd(k) == cert["gcd"] != 1
    if kind == "abelian-obstruction":
        vecs = [exponent_vector(w) for w in basis_of(h)]
        return abelian_retract_obstruction(vecs, h.rank).obstructed
    return False


def is_retract(h: SubgroupGraph, bound: int = DEFAULT_BOUND, budget: int = DEFAULT_BUDGET) -> RetractVerdict:
    """Decide whether H is a retract of F_r.

    Steps, in order: rank above r; cyclic subgroups via primitivity of the
    abelianized generator; the abelianized lattice test; a proper subgroup of
    rank r; finally a bounded search for x_1..x_r in H with ``v_i(x) = h_i`` on a
    basis h_i of H.
    """
    r = h.rank
    m = h.subgroup_rank
    if m == 0:
        return RetractVerdict("yes", Substitution([Word.identity(r)] * r, r))
    if m > r:
        return RetractVerdict("no", certificate={"type": "rank-exceeds-ambient", "rank": m, "ambient": r})
    basis = basis_of(h)
    if m == 1:
        g = basis[0]
        k = exponent_vector(g)
        d = vector_gcd(k)
        if d != 1:
            return RetractVerdict("no", certificate={"type": "cyclic-non-primitive", "vector": list(k), "gcd": d})
        phi = _cyclic_witness(g, k)
        assert verify_retraction(phi, h)
        return RetractVerdict("yes", phi)
    if h.is_full():
        return RetractVerdict("yes", Substitution.identity(r))
    vecs = [exponent_vector(w) for w in basis]
    lattice = abelian_retract_obstruction(vecs, r)
    if lattice.obstructed:
        return RetractVerdict(
            "no",
            certificate={"type": "abelian-obstruction", "vectors": [list(v) for v in vecs], "factors": list(lattice.factors)},
        )
    if m == r:
        # F_r is Hopfian, so a retraction onto a rank-r subgroup is an automorphism.
        return RetractVerdict("no", certificate={"type": "proper-full-rank", "rank": m, "ambient": r})
    try:
        sol = solve_in_subgroup(retraction_system(h), h, bound, budget)
    except BudgetExceeded as exc:
        return RetractVerdict("unknown", bound=bound, note=f"budget exceeded after {exc.states} states")
    if sol is None:
        return RetractVerdict("unknown", bound=bound)
    phi = sol.assignment
    if not verify_retraction(phi, h):
        raise AssertionError(f"search returned a map that is not a retraction: {phi}")
    return RetractVerdict("yes", phi, bound=bound)


def is_verbally_closed(h: SubgroupGraph, bound: int = DEFAULT_BOUND, budget: int = DEFAULT_BUDGET) -> RetractVerdict:
    """Same answer as :func:`is_retract`; cyclic ``no`` answers carry a falsifying equation."""
    verdict = is_retract(h, bound, budget)
    if verdict.kind == "no" and verdict.certificate["type"] == "cyclic-non-primitive":
        eq = falsifying_equation(basis_of(h)[0])
        return RetractVerdict(verdict.kind, verdict.witness, verdict.certificate, verdict.bound, verdict.note, eq)
    return verdict


@dataclass
class VerbalClosure:
    closure: SubgroupGraph
    status: str  # "exact" | "conditional"
    minimal: list[SubgroupGraph]
    undecided: list[SubgroupGraph]
    verdicts: dict[SubgroupGraph, RetractVerdict] = field(repr=False)

    def to_dict(self) -> dict:
        out = {
            "closure": [str(w) for w in basis_of(self.closure)],
            "status": self.status,
            "witness": self.verdicts[self.closure].witness.to_dict(),
        }
        if self.status != "exact":
            out["minimal"] = [[str(w) for w in basis_of(g)] for g in self.minimal]
            out["undecided"] = [[str(w) for w in basis_of(g)] for g in self.undecided]
        return out


def vcl(
    h: SubgroupGraph,
    bound: int = DEFAULT_BOUND,
    budget: int = DEFAULT_BUDGET,
    fringe_limit: int | None = None,
) -> VerbalClosure:
    """The least retract (= verbally closed subgroup) of F_r containing H.

    Candidates are the fringe of H plus F_r itself. The answer is ``exact``
    when no undecided candidate sits strictly below the chosen retract.
    """
    candidates = fringe(h) if fringe_limit is None else fringe(h, fringe_limit)
    full = SubgroupGraph.full(h.rank)
    if full not in candidates:
        candidates.append(full)
    verdicts = {k: is_retract(k, bound, budget) for k in candidates}
    retracts = [k for k, v in verdicts.items() if v.kind == "yes"]
    minimal = [k for k in retracts if not any(o != k and includes(k, o) for o in retracts)]
    chosen = minimal[0]
    undecided = [
        k for k, v in verdicts.items() if v.kind == "unknown" and includes(chosen, k) and k != chosen
    ]
    status = "exact" if len(minimal) == 1 and not undecided else "conditional"
    if status == "conditional":
        undecided = [k for k, v in verdicts.items() if v.kind == "unknown"]
    return VerbalClosure(chosen, status, minimal, undecided, verdicts)


@dataclass
class IntersectionReport:
    status: str  # "skipped" | "yes" | "unknown"
    intersection: SubgroupGraph | None
    verdict: RetractVerdict | None

    def to_dict(self) -> dict:
        out = {"status": self.status}
        if self.intersection is not None:
            out["intersection"] = [str(w) for w in basis_of(self.intersection)]
        if self.verdict is not None:
            out["verdict"] = self.verdict.to_dict()
        return out


def intersect_retracts_check(
    h1: SubgroupGraph, h2: SubgroupGraph, bound: int = DEFAULT_BOUND, budget: int = DEFAULT_BUDGET
) -> IntersectionReport:
    """Test that two verified retracts intersect in a retract.

    A decisive ``no`` on the intersection would contradict the fact that retracts of a free group
    are closed under intersection, and raises :class:`InconsistencyError`.
    """
    v1 = is_retract(h1, bound, budget)
    v2 = is_retract(h2, bound, budget)
    if v1.kind != "yes" or v2.kind != "yes":
        return IntersectionReport("skipped", None, None)
    k = intersect(h1, h2)
    if k == h1:
        verdict = v1
    elif k == h2:
        verdict = v2
    else:
        verdict = is_retract(k, bound, budget)
    if verdict.kind == "no":
        raise InconsistencyError(
            f"intersection of retracts {basis_of(h1)} and {basis_of(h2)} is {basis_of(k)}, "
            f"judged not a retract: {verdict.certificate}"
        )
    if verdict.kind == "yes" and not verify_retraction(verdict.witness, k):
        raise InconsistencyError(f"witness for the intersection does not verify: {verdict.witness}")
    return IntersectionReport(verdict.kind, k, verdict)
