import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from vclosure.abelian import (
    abelian_retract_obstruction,
    bezout,
    determinant,
    exponent_vector,
    is_primitive,
    matmul,
    smith_normal_form,
    solve_integer,
    vector_gcd,
)
from vclosure.words import Word

from oracles import _det, invariant_factors_oracle, random_word


def matrices(max_rows=4, max_cols=4, lo=-6, hi=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


@pytest.mark.parametrize("word, vector", [("abAB", (0, 0)), ("aaabb", (3, 2)), ("aBaB", (2, -2)), ("", (0, 0))])
def test_exponent_vector(word, vector):
    assert exponent_vector(Word.parse(word, 2)) == vector


@pytest.mark.parametrize("v, expected", [((2, 3), True), ((2, 2), False), ((0, 0), False), ((0, -1), True), ((6, 10, 15), True)])
def test_is_primitive(v, expected):
    assert is_primitive(v) is expected


def test_bezout():
    for v in [(2, 3), (6, 10, 15), (0, 0, 4), (-3, 5), (0, 0)]:
        g, coeffs = bezout(v)
        assert g == vector_gcd(v)
        assert sum(a * b for a, b in zip(coeffs, v)) == g


@pytest.mark.parametrize(
    "m, factors",
    [([[2, 0], [0, 2]], (2, 2)), ([[1, 0], [0, 1]], (1, 1)), ([[2, 1], [1, 1]], (1, 1)), ([[2, 4, 4], [-6, 6, 12], [10, 4, 16]], (2, 2, 156))],
)
def test_smith_examples(m, factors):
    assert smith_normal_form(m).factors == factors


@settings(max_examples=200)
@given(matrices())
def test_smith_against_minors_oracle(m):
    snf = smith_normal_form(m)
    assert snf.factors == invariant_factors_oracle(m)
    assert matmul(matmul(snf.left, m), snf.right) == snf.diagonal
    assert abs(determinant(snf.left)) == 1 and abs(determinant(snf.right)) == 1
    rows, cols = len(m), len(m[0])
    assert all(snf.diagonal[i][j] == 0 for i in range(rows) for j in range(cols) if i != j)
    nonzero = [d for d in snf.factors if d]
    assert all(d >= 0 for d in snf.factors)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


@settings(max_examples=100)
@given(matrices(), st.randoms(use_true_random=False))
def test_smith_permutation_invariance(m, rnd):
    rows = list(m)
    rnd.shuffle(rows)
    perm = list(range(len(m[0])))
    rnd.shuffle(perm)
    shuffled = [[r[j] for j in perm] for r in rows]
    assert smith_normal_form(shuffled).factors == smith_normal_form(m).factors


@given(matrices(3, 3, -4, 4))
def test_determinant_matches_fraction_elimination(m):
    if len(m) == len(m[0]):
        assert determinant(m) == _det(m)


@settings(max_examples=100)
@given(matrices(3, 3, -5, 5), st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_solve_integer(a, x):
    x = x[: len(a[0])]
    b = [sum(ai * xi for ai, xi in zip(row, x)) for row in a]
    sol = solve_integer(a, b)
    assert sol is not None
    assert [sum(ai * xi for ai, xi in zip(row, sol)) for row in a] == b


def test_solve_integer_infeasible():
    assert solve_integer([[2, 0], [0, 2]], [1, 0]) is None


def _section_oracle(h, r, box=2):
    """Search integer P (r x m) with entries in [-box, box] and H P = I."""
    m = len(h)
    for entries in itertools.product(range(-box, box + 1), repeat=r * m):
        p = [list(entries[i * m:(i + 1) * m]) for i in range(r)]
        if all(sum(h[i][k] * p[k][j] for k in range(r)) == (i == j) for i in range(m) for j in range(m)):
            return True
    return False


@pytest.mark.parametrize(
    "vectors, r, passes",
    [([(2, 0), (0, 2)], 2, False), ([(1, 1)], 2, True), ([(1, 0), (0, 1)], 2, True), ([(0, 0)], 2, False), ([(1, 2, 0), (0, 0, 1)], 3, True), ([(1, 1, 0), (1, -1, 0)], 3, False)],
)
def test_obstruction_examples(vectors, r, passes):
    check = abelian_retract_obstruction(vectors, r)
    assert check.passes is passes
    assert _section_oracle(vectors, r) is passes


def test_obstruction_projection_rows():
    check = abelian_retract_obstruction([(1, 1)], 2)
    assert check.projection == [[1, 1], [0, 0]]
    v = [1, 1]
    assert [sum(v[k] * check.projection[k][j] for k in range(2)) for j in range(2)] == v


def test_even_lattice_has_no_fixing_matrix():
    # no M with entries in [-4, 4], rows in L = 2Z x 2Z, fixes (2,0) and (0,2)
    lattice = [(2, 0), (0, 2)]
    for e in itertools.product(range(-4, 5), repeat=4):
        m = [e[:2], e[2:]]
        if any(x % 2 for x in e):
            continue
        fixes = all([sum(v[k] * m[k][j] for k in range(2)) for j in range(2)] == list(v) for v in lattice)
        assert not fixes
    assert abelian_retract_obstruction(lattice, 2).obstructed


def test_obstruction_random_against_oracle():
    rng = random.Random(9)
    for _ in range(60):
        r = rng.choice([2, 3])
        m = rng.randint(1, 2)
        vecs = [tuple(rng.randint(-2, 2) for _ in range(r)) for _ in range(m)]
        if r * m > 4:
            continue
        assert abelian_retract_obstruction(vecs, r).passes == _section_oracle(vecs, r, 3), vecs


def test_cyclic_agreement_with_primitivity():
    rng = random.Random(10)
    for _ in range(200):
        r = rng.choice([2, 3])
        w = random_word(rng, r, rng.randint(1, 8))
        v = exponent_vector(w)
        assert abelian_retract_obstruction([v], r).passes == is_primitive(v), w
