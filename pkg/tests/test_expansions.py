import pytest

from aritylab import corpus
from aritylab.arity import Analyzer
from aritylab.errors import StructureError
from aritylab.expansions import (
    SINGLETON_NOTE,
    expand_finite_range,
    expand_general_algebra,
    expand_singletons,
)
from aritylab.structures import (
    cyclic,
    finite_range_monoid,
    flat_monoid,
    make_structure,
    parse_structure,
    serialize_structure,
)


def test_singletons_z3():
    ex = expand_singletons(cyclic(3))
    assert [n for n, _, _ in ex.added] == ["P_0", "P_1", "P_2"]
    assert Analyzer(ex.combined).theory_arity().theory_arity == 1
    assert SINGLETON_NOTE in ex.notes


def test_singletons_size_one():
    ex = expand_singletons(cyclic(1))
    assert len(ex.added) == 1
    assert Analyzer(ex.combined).theory_arity().theory_arity == 1


def test_singletons_flat_monoid_rigid():
    ex = expand_singletons(flat_monoid(3))
    assert len(ex.added) == 4
    assert Analyzer(flat_monoid(3)).aut.order == 6
    assert Analyzer(ex.combined).aut.order == 1


def test_singletons_never_raise_arity(corpus_structures):
    for s in corpus_structures:
        if s.size > 5:
            continue
        base = Analyzer(s).theory_arity().theory_arity
        assert Analyzer(expand_singletons(s).combined).theory_arity().theory_arity == 1 <= base


def test_finite_range_flat_monoid():
    ex = expand_finite_range(flat_monoid(2))
    assert ex.range_R == (0,)
    assert ex.predicate("D_1") == {(1, 1), (1, 2), (2, 1), (2, 2)}
    assert ex.predicate("R_1") == {(0,)}
    assert [n for n, _, _ in ex.added] == ["D_1", "R_1"]


@pytest.mark.parametrize("k", [3, 4, 5])
def test_finite_range_monoid_binarized(k):
    s = finite_range_monoid(k, 2)
    ex = expand_finite_range(s)
    d = [ex.predicate("D_1"), ex.predicate("D_2")]
    assert not d[0] & d[1]
    assert d[0] | d[1] == {(a, b) for a in range(1, k + 1) for b in range(1, k + 1)}
    assert ex.predicate("R_1") == {(1,)} and ex.predicate("R_2") == {(2,)}
    assert Analyzer(ex.combined).theory_arity().theory_arity <= 2


def test_finite_range_group_input_is_flagged():
    ex = expand_finite_range(cyclic(3))
    assert ex.range_R == (0, 1, 2)
    assert any("does not apply" in n for n in ex.notes)


def test_finite_range_groupoid_variant_partitions_square():
    s = flat_monoid(2)
    ex = expand_finite_range(s, exclude_identity=False)
    union = set().union(*(t for n, _, t in ex.added if n.startswith("D_")))
    assert union == {(a, b) for a in range(3) for b in range(3)}


def test_finite_range_needs_operation():
    with pytest.raises(StructureError):
        expand_finite_range(corpus.load("C5"))


def test_general_constant_range():
    s = make_structure("const", 3, {"f": [0, 0, 0]})
    ex = expand_general_algebra(s)
    assert ex.range_R == (0,)
    assert ex.predicate("D_1_1") == {(0,), (1,), (2,)}
    assert ex.predicate("R_1") == {(0,)}


def test_general_agrees_with_finite_range_modulo_identity():
    s = flat_monoid(2)
    gen = expand_general_algebra(s)
    fr = expand_finite_range(s)
    nonunit = {(a, b) for a in range(1, 3) for b in range(1, 3)}
    for i, c in enumerate(gen.range_R, start=1):
        d = gen.predicate(f"D_{i}_1")
        assert d == {(a, b) for a in range(3) for b in range(3) if s.table("mul")[a, b] == c}
        if c in fr.range_R:
            j = fr.range_R.index(c) + 1
            assert d & nonunit == fr.predicate(f"D_{j}")


def test_general_two_operations():
    s = make_structure("two", 2, {"mul": [[0, 1], [1, 0]], "meet": [[0, 0], [0, 1]]})
    ex = expand_general_algebra(s)
    names = [n for n, _, _ in ex.added]
    assert names == ["D_1_1", "D_2_1", "D_1_2", "D_2_2", "R_1", "R_2"]
    assert ex.predicate("D_2_2") == {(1, 1)}


def test_general_needs_functions():
    with pytest.raises(StructureError):
        expand_general_algebra(corpus.load("P4"))


def test_combined_round_trips(corpus_structures):
    for s in corpus_structures:
        exs = [expand_singletons(s)]
        if s.operation:
            exs += [expand_finite_range(s), expand_general_algebra(s)]
        for ex in exs:
            text = serialize_structure(ex.combined)
            assert parse_structure(text) == ex.combined
            assert ex.combined.name == f"{s.name}_{ex.mode.replace('-', '_')}"


def test_name_clash_rejected():
    s = make_structure("x", 2, relations={"P_0": (1, {(0,)})})
    with pytest.raises(StructureError):
        expand_singletons(s)
