import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from aritylab import corpus
from aritylab.structures import make_structure


def canon(labels):
    """Relabel a sequence by first occurrence."""
    seen = {}
    return [seen.setdefault(x, len(seen)) for x in labels]


def random_magma(rng, s, name="rand"):
    return make_structure(name, s, {"mul": rng.integers(0, s, size=(s, s))})


def random_graph(rng, s, p=0.4, name="graph"):
    edges = [t for t in itertools.product(range(s), repeat=2) if rng.random() < p]
    return make_structure(name, s, relations={"E": (2, edges)})


def random_unary(rng, s, name="unary"):
    return make_structure(name, s, {"f": rng.integers(0, s, size=s)})


@st.composite
def small_structures(draw, max_size=4):
    """Magmas, unary algebras and digraphs; symmetric variants keep
    automorphism groups nontrivial often enough to matter."""
    s = draw(st.integers(1, max_size))
    seed = draw(st.integers(0, 2**32 - 1))
    kind = draw(st.sampled_from(["magma", "commutative", "graph", "symgraph", "unary"]))
    rng = np.random.default_rng(seed)
    if kind == "magma":
        return random_magma(rng, s)
    if kind == "commutative":
        t = rng.integers(0, s, size=(s, s))
        t = np.triu(t) + np.triu(t, 1).T
        return make_structure("comm", s, {"mul": t})
    if kind == "graph":
        return random_graph(rng, s)
    if kind == "symgraph":
        edges = set()
        for a, b in itertools.combinations(range(s), 2):
            if rng.random() < 0.5:
                edges |= {(a, b), (b, a)}
        return make_structure("symgraph", s, relations={"E": (2, edges)})
    return random_unary(rng, s)


@pytest.fixture(scope="session")
def corpus_structures():
    return corpus.load_all()


@pytest.fixture(params=["numpy", "numba"])
def backend(request, monkeypatch):
    if request.param == "numpy":
        monkeypatch.setenv("ARITYLAB_DISABLE_NUMBA", "1")
    else:
        monkeypatch.delenv("ARITYLAB_DISABLE_NUMBA", raising=False)
    return request.param
