import random

import pytest

from vclosure.errors import AlphabetMismatch, FringeTooLarge
from vclosure.stallings import (
    SubgroupGraph,
    basis_of,
    contains,
    enumerate_elements,
    fold,
    fringe,
    includes,
    intersect,
)
from vclosure.words import Word

from oracles import nielsen_shorten, product_closure, random_word, reduced_tuples, set_partitions


def G(*gens, rank=2):
    return fold([Word.parse(g, rank) for g in gens], rank)


def W(text, rank=2):
    return Word.parse(text, rank)


def random_subgroup(rng, rank):
    gens = [random_word(rng, rank, rng.randint(1, 5)) for _ in range(rng.randint(1, 3))]
    return gens, fold(gens, rank)


def test_fold_examples():
    g = G("a")
    assert g.num_vertices == 1 and g.edges == [(0, 1, 0)]
    g = G("aa")
    assert g.num_vertices == 2 and sorted(g.edges) == [(0, 1, 1), (1, 1, 0)]
    g = G("abA", "aa")
    assert g.num_vertices == 2 and g.subgroup_rank == 2
    assert g.subgroup_rank == g.num_edges - g.num_vertices + 1


def test_fold_is_canonical():
    assert G("aa", "abA") == G("abA", "AA", "aaaa")
    assert G("a", "b") == SubgroupGraph.full(2)
    assert G("", "1") == SubgroupGraph.trivial(2)
    assert hash(G("ab")) == hash(G("BA"))
    # conjugate subgroups have different based graphs
    assert G("a") != G("bAB")


@pytest.mark.parametrize(
    "gens, word, expected",
    [(["aa"], "aaaa", True), (["aa"], "a", False), (["abA", "aa"], "aaabAAA", True), (["ab"], "ba", False)],
)
def test_contains_examples(gens, word, expected):
    assert contains(G(*gens), W(word)) is expected


def test_contains_rejects_other_rank():
    with pytest.raises(AlphabetMismatch):
        contains(G("a"), W("a", 3))


def test_basis_examples():
    assert [str(w) for w in basis_of(G("aa"))] == ["aa"]
    assert sorted(str(w) for w in basis_of(G("a", "b"))) == ["a", "b"]
    g = G("abA", "aa")
    basis = basis_of(g)
    assert len(basis) == 2
    assert includes(g, fold(basis, 2)) and includes(fold(basis, 2), g)


def test_rank_properties():
    rng = random.Random(2)
    for _ in range(100):
        rank = rng.choice([2, 3])
        gens, g = random_subgroup(rng, rank)
        assert g.subgroup_rank <= len(gens)
        assert g.subgroup_rank == g.num_edges - g.num_vertices + 1
        assert fold(basis_of(g), rank) == g
        assert all(contains(g, s) for s in gens)


def test_membership_against_product_oracle():
    rng = random.Random(3)
    for rank in (2, 3):
        words = [Word(t, rank) for t in reduced_tuples(rank, 5)]
        for _ in range(10):
            gens, g = random_subgroup(rng, rank)
            raw = product_closure(gens, rank, 5)
            oracle = product_closure(nielsen_shorten(gens), rank, 5)
            assert raw <= oracle
            for w in words:
                assert contains(g, w) == (w.letters in oracle), (gens, w)


def test_intersect_examples():
    assert intersect(G("a"), G("b")).is_trivial()
    assert intersect(G("a"), G("aa")) == G("aa")
    g = G("abA", "aa")
    assert intersect(g, g) == g
    assert intersect(G("aa"), G("aaa")) == G("a" * 6)


def test_pullback_correctness():
    rng = random.Random(4)
    words = [Word(t, 2) for t in reduced_tuples(2, 6)]
    for _ in range(15):
        _, g1 = random_subgroup(rng, 2)
        _, g2 = random_subgroup(rng, 2)
        k = intersect(g1, g2)
        for w in words:
            assert contains(k, w) == (contains(g1, w) and contains(g2, w))


def test_includes_examples():
    full = SubgroupGraph.full(2)
    assert includes(full, G("abAB", "bbb"))
    assert includes(G("a"), G("aa"))
    assert not includes(G("aa"), G("a"))
    assert includes(G("aa"), SubgroupGraph.trivial(2))


@pytest.mark.parametrize(
    "gens, n, expected",
    [
        (["a"], 2, ["", "a", "A", "aa", "AA"]),
        (["aa"], 3, ["", "aa", "AA"]),
        (["abA", "aa"], 3, ["", "aa", "AA", "aba", "abA", "aBa", "aBA", "Aba", "AbA", "ABa", "ABA"]),
    ],
)
def test_enumerate_examples(gens, n, expected):
    assert [str(w) for w in enumerate_elements(G(*gens), n)] == expected


def test_enumerate_against_product_oracle():
    rng = random.Random(6)
    for _ in range(20):
        gens, g = random_subgroup(rng, 2)
        got = [w.letters for w in enumerate_elements(g, 6)]
        assert len(got) == len(set(got))
        assert set(got) == product_closure(nielsen_shorten(gens), 2, 6)


def _fringe_oracle(g):
    out = set()
    edges = g.edges
    for p in set_partitions(g.num_vertices):
        quotient = [(p[u], l, p[v]) for u, l, v in edges]
        out.add(SubgroupGraph.from_edges(g.rank, max(p) + 1, quotient, base=p[0]))
    return out


@pytest.mark.parametrize("gens", [["aa"], ["a"], ["abAB"], ["aab"], ["abA", "bb"], ["aaa", "bab"], ["abc"]])
def test_fringe_matches_exhaustive_partitions(gens):
    rank = 3 if any("c" in x for x in gens) else 2
    g = G(*gens, rank=rank)
    got = fringe(g)
    assert set(got) == _fringe_oracle(g)
    assert len(set(got)) == len(got)
    assert g in got
    assert all(includes(k, g) for k in got)


def test_fringe_examples():
    assert set(fringe(G("aa"))) == {G("aa"), G("a")}
    assert fringe(G("a")) == [G("a")]
    members = fringe(G("abAB"))
    assert G("abAB") in members and SubgroupGraph.full(2) in members


def test_fringe_random_against_oracle():
    rng = random.Random(8)
    for _ in range(15):
        _, g = random_subgroup(rng, 2)
        if g.num_vertices > 7:
            continue
        assert set(fringe(g)) == _fringe_oracle(g)


def test_fringe_limit():
    g = G("a" * 13)
    with pytest.raises(FringeTooLarge) as exc:
        fringe(g)
    assert exc.value.vertices == 13 and exc.value.limit == 12
    # 13 is prime, so the only quotients of the 13-cycle are itself and the loop
    assert fringe(g, limit=13) == [G("a"), g]


def test_json_round_trip():
    g = G("abA", "aa", "bab")
    data = g.to_dict()
    assert set(data) == {"vertices", "base", "edges"}
    assert data["base"] == 0
    assert all(set(e) == {"from", "label", "to"} for e in data["edges"])
    assert SubgroupGraph.from_dict(data, 2) == g


def test_dot_export():
    dot = G("aa").to_dot()
    assert dot.startswith("digraph")
    assert "doublecircle" in dot
    assert dot.count("->") == 2
    assert 'label="a"' in dot
