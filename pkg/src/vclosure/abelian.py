"""Abelianization F_r -> Z^r and exact integer-lattice checks."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce as _fold
from math import gcd
from typing import Sequence

from .words import Word

Matrix = list[list[int]]


def exponent_vector(w: Word) -> tuple[int, ...]:
    """Signed letter counts: the image of ``w`` in Z^r."""
    v = [0] * w.rank
    for x in w.letters:
        if x > 0:
            v[x - 1] += 1
        else:
            v[-x - 1] -= 1
    return tuple(v)


def vector_gcd(v: Sequence[int]) -> int:
    return _fold(gcd, v, 0)


def is_primitive(v: Sequence[int]) -> bool:
    return vector_gcd(v) == 1


def bezout(v: Sequence[int]) -> tuple[int, list[int]]:
    """Return ``(g, l)`` with ``sum(v_i * l_i) == g == gcd(v)`` and g >= 0.

    A coordinate whose value is already a multiple of the running gcd gets
    coefficient 0, so ``(1, 1)`` gives ``l = (1, 0)``.
    """
    g = 0
    coeffs: list[int] = []
    for k in v:
        if g == 0:
            if k == 0:
                coeffs.append(0)
                continue
            g = abs(k)
            coeffs = [0] * len(coeffs) + [1 if k > 0 else -1]
            continue
        if k % g == 0:
            coeffs.append(0)
            continue
        d, x, y = _egcd(g, k)
        coeffs = [c * x for c in coeffs] + [y]
        g = d
    return g, coeffs


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def identity_matrix(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def determinant(m: Matrix) -> int:
    """Exact integer determinant (Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithForm:
    factors: tuple[int, ...]
    left: Matrix  # U
    right: Matrix  # V
    diagonal: Matrix  # U @ m @ V


def smith_normal_form(m: Matrix) -> SmithForm:
    """``U m V = D`` with D diagonal, ``d_i | d_{i+1}`` and U, V unimodular."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(r) for r in m]
    U = identity_matrix(rows)
    V = identity_matrix(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst += q * row src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in a:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    for t in range(min(rows, cols)):
        while True:
            pivot = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = a[t][t]
            done = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    done = done and a[i][t] == 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    done = done and a[t][j] == 0
            if not done:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < rows and t < cols and a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
    factors = tuple(a[i][i] for i in range(min(rows, cols)))
    return SmithForm(factors, U, V, a)


def invariant_factors(m: Matrix) -> tuple[int, ...]:
    return smith_normal_form(m).factors


def solve_integer(a: Matrix, b: Sequence[int]) -> list[int] | None:
    """An integer solution ``x`` of ``a x = b``, or None if there is none."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    snf = smith_normal_form(a)
    ub = [sum(snf.left[i][k] * b[k] for k in range(rows)) for i in range(rows)]
    z = [0] * cols
    for i in range(rows):
        d = snf.diagonal[i][i] if i < cols else 0
        if d == 0:
            if ub[i] != 0:
                return None
        elif ub[i] % d:
            return None
        else:
            z[i] = ub[i] // d
    return [sum(snf.right[j][k] * z[k] for k in range(cols)) for j in range(cols)]


@dataclass(frozen=True)
class LatticeCheck:
    """Outcome of the abelianized retraction test.

    ``section`` is an integer r x m matrix P with ``H P = I`` when one
    exists; ``projection = P H`` is then the abelianized retraction written
    with row vectors (rows in the lattice of H, ``v @ projection == v``).
    """

    passes: bool
    factors: tuple[int, ...]
    section: Matrix | None = None
    projection: Matrix | None = None

    @property
    def obstructed(self) -> bool:
        return not self.passes


def abelian_retract_obstruction(h_vectors: Sequence[Sequence[int]], r: int) -> LatticeCheck:
    """Abelianized necessary condition for a retraction F_r -> H.

    ``h_vectors`` are the exponent vectors of a free basis h_1..h_m of H.
    A retraction induces Z^r -> Z^m splitting the inclusion Z^m -> Z^r,
    i.e. an integer P with ``H P = I_m``. If none exists, no retraction does.
    """
    H = [list(v) for v in h_vectors]
    for v in H:
        if len(v) != r:
            raise ValueError(f"vector {v} does not have length {r}")
    m = len(H)
    if m == 0:
        return LatticeCheck(True, (), [[] for _ in range(r)], [[0] * r for _ in range(r)])
    snf = smith_normal_form(H)
    # H P = I  <=>  D (V^-1 P) = U
    if m > r or any(snf.diagonal[i][i] == 0 for i in range(m)):
        return LatticeCheck(False, snf.factors)
    Q = [[0] * m for _ in range(r)]
    for i in range(m):
        d = snf.diagonal[i][i]
        if any(x % d for x in snf.left[i]):
            return LatticeCheck(False, snf.factors)
        Q[i] = [x // d for x in snf.left[i]]
    P = matmul(snf.right, Q)
    assert matmul(H, P) == identity_matrix(m)
    return LatticeCheck(True, snf.factors, P, matmul(P, H))
