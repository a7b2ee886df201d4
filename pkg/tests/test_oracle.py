import itertools

import pytest

from aritylab import corpus
from aritylab.arity import Analyzer
from aritylab.errors import BudgetExceeded
from aritylab.oracle import (
    AlgebraClosure,
    all_tuples,
    atoms_of_family,
    boolean_closure,
    brute_automorphisms,
    brute_n_ary_atoms,
    brute_orbits,
    brute_relation_arity,
    mask_of,
    n_ary_generators,
    refine_atoms,
)
from aritylab.relations import Relation, graph_of
from aritylab.structures import cyclic, flat_monoid


def as_sets(closure: AlgebraClosure):
    tuples = all_tuples(closure.s, closure.m)
    return sorted(
        sorted(tuples[j] for j in range(len(tuples)) if a >> j & 1) for a in closure.atoms
    )


def test_brute_automorphisms_examples():
    assert brute_automorphisms(cyclic(2)) == [(0, 1)]
    assert brute_automorphisms(cyclic(3)) == [(0, 1, 2), (0, 2, 1)]
    assert len(brute_automorphisms(flat_monoid(2))) == 2
    with pytest.raises(BudgetExceeded):
        brute_automorphisms(cyclic(9))


def test_aut_order_matches_brute_count():
    for s in corpus.load_all(max_size=7):
        assert Analyzer(s).aut.order == len(brute_automorphisms(s)), s.name


def test_atoms_z2_singletons():
    assert len(brute_n_ary_atoms(cyclic(2), 2, 1).atoms) == 4


def test_atoms_z3_m2_n1():
    got = as_sets(brute_n_ary_atoms(cyclic(3), 2, 1))
    assert got == sorted(
        [
            [(0, 0)],
            [(0, 1), (0, 2)],
            [(1, 0), (2, 0)],
            [(1, 1), (2, 2)],
            [(1, 2), (2, 1)],
        ]
    )


@pytest.mark.parametrize("name", ["Z3", "Z4", "flat_monoid_2", "P4"])
def test_atoms_at_full_level_are_orbits(name):
    s = corpus.load(name)
    for m in (1, 2):
        for n in range(m, 3):
            assert sorted(brute_n_ary_atoms(s, m, n).atoms) == sorted(brute_orbits(s, m))


@pytest.mark.parametrize("s, m, n", [(cyclic(3), 2, 1), (flat_monoid(2), 2, 1), (cyclic(2), 2, 1), (cyclic(2), 3, 1), (cyclic(2), 3, 2)])
def test_literal_closure_agrees_with_refinement(s, m, n):
    gens = n_ary_generators(s, m, n)
    ground = (1 << s.size**m) - 1
    family = boolean_closure(gens, ground)
    atoms = atoms_of_family(family)
    assert sorted(atoms) == sorted(refine_atoms(gens, ground))
    # closed under complement and intersection
    for x, y in itertools.combinations(family, 2):
        assert x & y in family
    assert all(ground & ~x in family for x in family)
    assert len(family) == 2 ** len(atoms)


def test_family_enumeration():
    closure = brute_n_ary_atoms(cyclic(3), 2, 1)
    fam = closure.family()
    assert len(fam) == 32
    assert fam == boolean_closure(closure.generators, closure.ground)


def test_closure_budget():
    gens = [mask_of([j], 16) for j in range(16)]
    with pytest.raises(BudgetExceeded):
        boolean_closure(gens, (1 << 16) - 1, budget=100)


def test_brute_relation_arity_examples():
    assert brute_relation_arity(cyclic(3), set(), m=2) == 0
    assert brute_relation_arity(cyclic(2), graph_of(cyclic(2), "mul")) == 1
    assert brute_relation_arity(cyclic(3), Relation.full(3, 2)) == 0


def test_brute_caps():
    with pytest.raises(BudgetExceeded):
        brute_n_ary_atoms(cyclic(5), 2, 1)
    with pytest.raises(BudgetExceeded):
        brute_n_ary_atoms(cyclic(3), 5, 1)
