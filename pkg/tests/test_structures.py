import numpy as np
import pytest
from hypothesis import given, settings

from aritylab import corpus
from aritylab.errors import StructureError, StructureSyntaxError
from aritylab.structures import (
    Signature,
    Symbol,
    canonicalize,
    classify,
    cyclic,
    direct_product,
    finite_range_monoid,
    flat_monoid,
    gen_family,
    make_structure,
    parse_structure,
    relabel,
    serialize_structure,
    symmetric,
)

from conftest import small_structures

Z2_TEXT = """\
structure Z2
universe 2
function mul 2
0 1
1 0
end
"""

FLAT2_TEXT = """\
# truncated flat monoid: 0 = e
structure flat_monoid_2
universe 3
function mul 2
0 1 2   # e row
1 0 0
2 0 0
end
"""


def test_parse_z2():
    z2 = parse_structure(Z2_TEXT)
    assert z2.size == 2
    assert z2.operation == "mul"
    assert z2.table("mul").tolist() == [[0, 1], [1, 0]]
    assert z2 == cyclic(2)


def test_parse_flat_monoid_with_comments():
    m = parse_structure(FLAT2_TEXT)
    assert m.functions["mul"].tolist() == [0, 1, 2, 1, 0, 0, 2, 0, 0]
    assert m == flat_monoid(2)


def test_out_of_range_value_reports_location():
    text = "structure bad\nuniverse 3\nfunction f 1\n0 1 5\nend\n"
    with pytest.raises(StructureSyntaxError) as info:
        parse_structure(text)
    assert (info.value.line, info.value.column) == (4, 5)
    assert "out of range" in str(info.value)


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("structure a\nuniverse 2\nfunction f 1\n0\nend\n", 5, "function table has 1 entries"),
        ("structure a\nuniverse 2\nfunction f 1\n0 1 1\nend\n", 4, "more than 2"),
        ("structure a\nuniverse 2\nconstant c 0\nconstant c 1\nend\n", 4, "duplicate symbol"),
        ("structure a\nuniverse 2\nrelation R 2\ntuples 2\n0 1\n0 1\nend\n", 6, "duplicate tuple"),
        ("structure a\nuniverse 2\nrelation R 2\ntuples 1\n0\nend\n", 5, "expected 2 integers"),
        ("structure a\nuniverse x\nend\n", 2, "expected integer"),
        ("structure a\nuniverse 2\nwidget w 1\nend\n", 3, "unknown keyword"),
        ("structure a\nuniverse 2\n", 3, "unexpected end of file"),
        ("universe 2\nend\n", 1, "expected 'structure'"),
        ("structure a\nuniverse 2\nend\nend\n", 4, "content after 'end'"),
    ],
)
def test_syntax_errors(text, line, fragment):
    with pytest.raises(StructureSyntaxError) as info:
        parse_structure(text)
    assert info.value.line == line
    assert fragment in info.value.message


def test_symbols_in_any_order_and_canonical_form():
    text = """structure mixed
universe 2
relation R 1
tuples 1
1
function g 1 # unary
1 0
constant c 0
function mul 2
0 0
0 1
end
"""
    s = parse_structure(text)
    out = serialize_structure(s)
    assert out.splitlines()[2:] == [
        "constant c 0",
        "function g 1",
        "1 0",
        "function mul 2",
        "0 0",
        "0 1",
        "relation R 1",
        "tuples 1",
        "1",
        "end",
    ]
    # the designated operation is the first binary function either way
    assert s.operation == parse_structure(out).operation == "mul"
    assert canonicalize(out) == out


def test_relation_tuples_sorted_in_canonical_form():
    text = "structure r\nuniverse 3\nrelation E 2\ntuples 3\n2 0\n0 2\n1 1\nend\n"
    lines = serialize_structure(parse_structure(text)).splitlines()
    assert lines[4:7] == ["0 2", "1 1", "2 0"]


@settings(max_examples=60, deadline=None)
@given(small_structures(max_size=5))
def test_round_trip(structure):
    text = serialize_structure(structure)
    again = parse_structure(text)
    assert again == structure
    assert serialize_structure(again) == text
    assert canonicalize(canonicalize(text)) == canonicalize(text)


def test_signature_invariants():
    with pytest.raises(StructureError):
        Symbol("c", "constant", 1)
    with pytest.raises(StructureError):
        Symbol("f", "function", 0)
    with pytest.raises(StructureError):
        Signature((Symbol("f", "function", 1), Symbol("f", "relation", 1)))


def test_table_length_validated():
    with pytest.raises(StructureError):
        make_structure("bad", 3, {"f": [0, 1]})


def test_classify_z3():
    r = classify(cyclic(3))
    assert r.is_group and r.is_monoid and r.is_associative
    assert r.identity == 0
    assert r.range_R == (0, 1, 2)


def test_classify_flat_monoid_is_not_associative():
    r = classify(flat_monoid(2))
    t = flat_monoid(2).table("mul")
    assert t[t[1, 1], 2] == 2 and t[1, t[1, 2]] == 1
    assert not r.is_associative
    assert not r.is_monoid and not r.is_group
    assert r.identity == 0
    assert r.range_R == (0,)
    assert r.kind == "magma with identity"


def test_classify_without_identity_uses_full_product_set():
    m = make_structure("left_zero", 3, {"mul": [[0, 0, 0], [1, 1, 1], [2, 2, 2]]})
    r = classify(m)
    assert r.identity is None
    assert r.is_associative and not r.is_monoid
    assert r.range_R == (0, 1, 2)
    assert r.range_rule == "all"


def test_classify_needs_binary_function():
    with pytest.raises(StructureError):
        classify(make_structure("u", 2, {"f": [1, 0]}))


def test_classify_implications():
    for s in corpus.load_all():
        if s.operation is None:
            continue
        r = classify(s)
        assert not r.is_group or r.is_monoid
        assert not r.is_monoid or (r.is_associative and r.identity is not None)


def test_gen_family_examples():
    assert cyclic(2).table("mul").tolist() == [[0, 1], [1, 0]]
    assert flat_monoid(2).table("mul").tolist() == [[0, 1, 2], [1, 0, 0], [2, 0, 0]]
    frm = finite_range_monoid(3, 2)
    assert frm.size == 4
    t = frm.table("mul")
    assert t[0].tolist() == [0, 1, 2, 3] and t[:, 0].tolist() == [0, 1, 2, 3]
    # independent expansion of the rule: residue of i+j mod 2 taken in {1, 2}
    for i in range(1, 4):
        for j in range(1, 4):
            assert t[i, j] == (2 if (i + j) % 2 == 0 else 1)
    nonunit = {int(t[i, j]) for i in range(1, 4) for j in range(1, 4)}
    assert nonunit == {1, 2}
    assert classify(frm).range_R == (1, 2)


def test_gen_family_dispatch_and_bounds():
    assert gen_family("cyclic", 4) == cyclic(4)
    assert gen_family("direct_product", 2, 2) == direct_product(2, 2)
    assert gen_family("finite_range_monoid", 3, 2) == finite_range_monoid(3, 2)
    with pytest.raises(StructureError):
        gen_family("cyclic", 0)
    with pytest.raises(StructureError):
        gen_family("cyclic", 100)
    with pytest.raises(StructureError):
        finite_range_monoid(2, 3)
    with pytest.raises(StructureError):
        gen_family("quaternion", 8)


@pytest.mark.parametrize("n", range(1, 13))
def test_cyclic_groups_are_groups(n):
    assert classify(cyclic(n)).is_group


@pytest.mark.parametrize("k", range(1, 9))
def test_flat_monoid_range_is_identity(k):
    assert classify(flat_monoid(k)).range_R == (0,)


def test_symmetric_and_products_are_groups():
    s3 = symmetric(3)
    assert s3.size == 6 and classify(s3).is_group and classify(s3).identity == 0
    t = s3.table("mul")
    assert not np.array_equal(t, t.T)
    assert classify(direct_product(2, 3)).is_group


def test_relabel_is_isomorphic_copy():
    s = flat_monoid(2)
    q = [2, 0, 1]
    r = relabel(s, q)
    t, u = s.table("mul"), r.table("mul")
    for a in range(3):
        for b in range(3):
            assert u[q[a], q[b]] == q[t[a, b]]
    assert classify(r).identity == 2


def test_bundled_files_match_builders():
    built = corpus.builders()
    assert sorted(built) == corpus.names()
    for name, s in built.items():
        assert corpus.load(name) == s
        assert corpus.text(name) == f"# bundled corpus: {name}\n" + serialize_structure(s)
