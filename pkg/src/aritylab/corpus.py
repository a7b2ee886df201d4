"""Bundled structures (``src/aritylab/corpus/*.struct``)."""

from __future__ import annotations

from importlib import resources

from .structures import (
    FiniteStructure,
    cyclic,
    direct_product,
    finite_range_monoid,
    flat_monoid,
    make_structure,
    parse_structure,
    symmetric,
)


def _cycle_graph(n: int) -> FiniteStructure:
    edges = {(i, (i + 1) % n) for i in range(n)} | {((i + 1) % n, i) for i in range(n)}
    return make_structure(f"C{n}", n, relations={"E": (2, edges)})


def _path_graph(n: int) -> FiniteStructure:
    edges = {(i, i + 1) for i in range(n - 1)} | {(i + 1, i) for i in range(n - 1)}
    return make_structure(f"P{n}", n, relations={"E": (2, edges)})


def builders() -> dict[str, FiniteStructure]:
    """Corpus members keyed by file stem, built from their generators."""
    members = [cyclic(n) for n in range(2, 7)]
    members += [direct_product(2, 2), symmetric(3)]
    members += [flat_monoid(k) for k in range(2, 6)]
    members += [finite_range_monoid(k, 2) for k in range(3, 6)]
    members += [_cycle_graph(5), _path_graph(4)]
    return {s.name: s for s in members}


def names() -> list[str]:
    files = resources.files("aritylab").joinpath("corpus")
    return sorted(p.name[: -len(".struct")] for p in files.iterdir() if p.name.endswith(".struct"))


def text(name: str) -> str:
    return resources.files("aritylab").joinpath("corpus", f"{name}.struct").read_text(encoding="utf-8")


def load(name: str) -> FiniteStructure:
    try:
        return parse_structure(text(name))
    except FileNotFoundError:
        raise KeyError(f"no bundled structure {name!r}; available: {', '.join(names())}") from None


def load_all(max_size: int | None = None) -> list[FiniteStructure]:
    out = [load(n) for n in names()]
    return [s for s in out if max_size is None or s.size <= max_size]
