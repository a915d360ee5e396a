"""Stallings subgroup graphs for finitely generated subgroups of F_r.

A graph is stored in canonical form: vertices ``0..n-1`` numbered by a
breadth-first walk from the base vertex ``0`` that tries labels in the order
``a, A, b, B, ...``. Two graphs are equal exactly when they represent the
same subgroup.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

from .errors import AlphabetMismatch, FringeTooLarge
from .words import Word, letter_key, letter_to_char, invert

DEFAULT_FRINGE_LIMIT = 12


def _label_order(rank: int) -> list[int]:
    return sorted([i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)], key=letter_key)


def _fold(n: int, edges: Iterable[tuple[int, int, int]]) -> tuple[list[int], list[dict[int, int]]]:
    """Identify vertices until no vertex has two edges with the same label.

    Returns the union-find parent array and the adjacency of root vertices
    (targets may need ``find``).
    """
    parent = list(range(n))
    adj: list[dict[int, int]] = [dict() for _ in range(n)]

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pending = []
    for u, lab, v in edges:
        for x, l, y in ((u, lab, v), (v, -lab, u)):
            t = adj[x].get(l)
            if t is None:
                adj[x][l] = y
            else:
                pending.append((t, y))
    while pending:
        x, y = pending.pop()
        x, y = find(x), find(y)
        if x == y:
            continue
        if len(adj[x]) < len(adj[y]):
            x, y = y, x
        parent[y] = x
        for l, t in adj[y].items():
            s = adj[x].get(l)
            if s is None:
                adj[x][l] = t
            else:
                pending.append((s, t))
        adj[y] = {}
    for v in range(n):
        if parent[v] == v:
            adj[v] = {l: find(t) for l, t in adj[v].items()}
    for v in range(n):
        find(v)
    return parent, adj


def _core_and_canonical(rank: int, base: int, adj: dict[int, dict[int, int]]):
    """Trim hanging trees, then renumber by BFS from ``base``."""
    adj = {v: dict(out) for v, out in adj.items()}
    stack = [v for v in adj if v != base and len(adj[v]) <= 1]
    while stack:
        v = stack.pop()
        if v not in adj or v == base or len(adj[v]) > 1:
            continue
        for l, t in adj.pop(v).items():
            if t in adj:
                adj[t].pop(-l, None)
                if t != base and len(adj[t]) <= 1:
                    stack.append(t)
    order = _label_order(rank)
    number = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for l in order:
            t = adj[v].get(l)
            if t is not None and t not in number:
                number[t] = len(number)
                queue.append(t)
    out = [dict() for _ in range(len(number))]
    for v, i in number.items():
        for l, t in adj[v].items():
            out[i][l] = number[t]
    return out


class SubgroupGraph:
    """Folded, based, core Stallings graph of a subgroup of F_rank."""

    __slots__ = ("rank", "out", "_key")

    def __init__(self, rank: int, out: Sequence[dict[int, int]]):
        # `out` must already be canonical; use the constructors below.
        self.rank = rank
        self.out = tuple(out)
        self._key = (rank, tuple(tuple(sorted(o.items())) for o in self.out))

    @classmethod
    def from_edges(cls, rank: int, num_vertices: int, edges: Iterable[tuple[int, int, int]], base: int = 0):
        """Build from arbitrary (unfolded, non-core) edge data."""
        edges = list(edges)
        for u, l, v in edges:
            if l == 0 or abs(l) > rank:
                raise AlphabetMismatch(f"edge label {l} outside rank {rank}")
        parent, adj = _fold(num_vertices, edges)
        roots = {v: adj[v] for v in range(num_vertices) if parent[v] == v}
        return cls(rank, _core_and_canonical(rank, parent[base], roots))

    @classmethod
    def full(cls, rank: int) -> "SubgroupGraph":
        return fold([Word.generator(i, rank) for i in range(1, rank + 1)], rank)

    @classmethod
    def trivial(cls, rank: int) -> "SubgroupGraph":
        return cls(rank, [{}])

    @property
    def num_vertices(self) -> int:
        return len(self.out)

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        """Positively labelled edges ``(source, label, target)``, sorted."""
        return sorted((u, l, t) for u, o in enumerate(self.out) for l, t in o.items() if l > 0)

    @property
    def num_edges(self) -> int:
        return sum(1 for o in self.out for l in o if l > 0)

    @property
    def subgroup_rank(self) -> int:
        return self.num_edges - self.num_vertices + 1

    def is_full(self) -> bool:
        return self.num_vertices == 1 and len(self.out[0]) == 2 * self.rank

    def is_trivial(self) -> bool:
        return self.num_edges == 0

    def __eq__(self, other):
        if isinstance(other, SubgroupGraph):
            return self._key == other._key
        return NotImplemented

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        gens = ", ".join(str(w) for w in basis_of(self))
        return f"<SubgroupGraph rank={self.rank} <{gens}> |V|={self.num_vertices}>"

    def read(self, w: Word, start: int = 0) -> int | None:
        v = start
        for x in w.letters:
            v = self.out[v].get(x)
            if v is None:
                return None
        return v

    def __contains__(self, w: Word) -> bool:
        return contains(self, w)

    def to_dict(self) -> dict:
        return {
            "vertices": self.num_vertices,
            "base": 0,
            "edges": [{"from": u, "label": letter_to_char(l), "to": v} for u, l, v in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict, rank: int) -> "SubgroupGraph":
        edges = []
        for e in data["edges"]:
            lab = e["label"]
            idx = ord(lab.lower()) - ord("a") + 1
            if lab.isupper():
                edges.append((e["to"], idx, e["from"]))
            else:
                edges.append((e["from"], idx, e["to"]))
        return cls.from_edges(rank, data["vertices"], edges, base=data.get("base", 0))

    def to_dot(self, name: str = "H") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for v in range(self.num_vertices):
            shape = "doublecircle" if v == 0 else "circle"
            lines.append(f"  {v} [shape={shape}];")
        for u, l, v in self.edges:
            lines.append(f'  {u} -> {v} [label="{letter_to_char(l)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def fold(generators: Iterable[Word], rank: int) -> SubgroupGraph:
    """Stallings graph of the subgroup generated by ``generators``."""
    edges = []
    n = 1
    for w in generators:
        if w.rank != rank:
            raise AlphabetMismatch(f"generator {w} is over rank {w.rank}, expected {rank}")
        if not w:
            continue
        prev = 0
        for i, x in enumerate(w.letters):
            nxt = 0 if i == len(w) - 1 else n
            if nxt:
                n += 1
            if x > 0:
                edges.append((prev, x, nxt))
            else:
                edges.append((nxt, -x, prev))
            prev = nxt
    return SubgroupGraph.from_edges(rank, n, edges)


def contains(g: SubgroupGraph, w: Word) -> bool:
    if w.rank != g.rank:
        raise AlphabetMismatch(f"word over rank {w.rank}, graph over rank {g.rank}")
    return g.read(w) == 0


def _tree_paths(g: SubgroupGraph) -> tuple[list[Word], set[tuple[int, int]]]:
    order = _label_order(g.rank)
    paths: list[tuple[int, ...] | None] = [None] * g.num_vertices
    paths[0] = ()
    tree = set()
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for l in order:
            t = g.out[v].get(l)
            if t is not None and paths[t] is None:
                paths[t] = paths[v] + (l,)
                tree.add((v, l))
                tree.add((t, -l))
                queue.append(t)
    return [Word._trusted(p, g.rank) for p in paths], tree


def basis_of(g: SubgroupGraph) -> list[Word]:
    """Free basis read off a BFS spanning tree, one word per non-tree edge."""
    paths, tree = _tree_paths(g)
    basis = []
    for u, l, v in g.edges:
        if (u, l) in tree:
            continue
        basis.append(paths[u] * Word._trusted((l,), g.rank) * invert(paths[v]))
    return basis


def intersect(g1: SubgroupGraph, g2: SubgroupGraph) -> SubgroupGraph:
    """Pullback of the two graphs, cored at the pair of base vertices."""
    if g1.rank != g2.rank:
        raise AlphabetMismatch(f"graphs over ranks {g1.rank} and {g2.rank}")
    index = {(0, 0): 0}
    queue = deque([(0, 0)])
    edges = []
    while queue:
        p = queue.popleft()
        u1, u2 = p
        for l, t1 in g1.out[u1].items():
            t2 = g2.out[u2].get(l)
            if t2 is None:
                continue
            q = (t1, t2)
            if q not in index:
                index[q] = len(index)
                queue.append(q)
            if l > 0:  # each edge is seen again from its target with -l
                edges.append((index[p], l, index[q]))
    return SubgroupGraph.from_edges(g1.rank, len(index), edges)


def includes(g1: SubgroupGraph, g2: SubgroupGraph) -> bool:
    """True iff the subgroup of ``g2`` is contained in that of ``g1``."""
    return all(contains(g1, w) for w in basis_of(g2))


def enumerate_elements(g: SubgroupGraph, max_len: int) -> list[Word]:
    """All subgroup elements of length <= max_len, in shortlex order."""
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    found = []
    stack = [(0, ())]
    while stack:
        v, letters = stack.pop()
        if v == 0:
            found.append(letters)
        if len(letters) == max_len:
            continue
        last = letters[-1] if letters else 0
        for l, t in g.out[v].items():
            if l != -last:
                stack.append((t, letters + (l,)))
    words = [Word._trusted(x, g.rank) for x in found]
    words.sort(key=Word.shortlex_key)
    return words


def fringe(g: SubgroupGraph, limit: int = DEFAULT_FRINGE_LIMIT) -> list[SubgroupGraph]:
    """Distinct folded quotients of ``g`` by identifications of its vertices.

    Only partitions that are already closed under folding are visited: the
    fold of any other partition equals the quotient by its closure, which is
    itself visited.
    """
    n = g.num_vertices
    if n > limit:
        raise FringeTooLarge(n, limit)
    block = [-1] * n
    seen: dict[SubgroupGraph, None] = {}

    def consistent(upto):
        image = {}
        for u in range(upto + 1):
            bu = block[u]
            for l, t in g.out[u].items():
                bt = block[t]
                if bt < 0:
                    continue
                key = (bu, l)
                prev = image.get(key)
                if prev is None:
                    image[key] = bt
                elif prev != bt:
                    return False
        return True

    def visit(v, nblocks):
        if v == n:
            edges = {(block[u], l, block[t]) for u in range(n) for l, t in g.out[u].items() if l > 0}
            seen.setdefault(SubgroupGraph.from_edges(g.rank, nblocks, sorted(edges), base=block[0]), None)
            return
        for b in range(nblocks + 1):
            block[v] = b
            if consistent(v):
                visit(v + 1, max(nblocks, b + 1))
        block[v] = -1

    visit(0, 0)
    result = list(seen)
    result.sort(key=_graph_sort_key)
    return result


def _graph_sort_key(g: SubgroupGraph):
    return (g.num_vertices, g.edges)
