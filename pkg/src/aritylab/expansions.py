"""Arity-reducing expansions by new predicates.

* singletons: ``P_a = {a}`` for every element; the expansion is rigid, so its
  theory is unary.
* finite range: for a binary operation with range ``R(M) = {c_1 < ... < c_r}``
  of products of non-units, binary ``D_i = {(a, b) : a, b != e, a*b = c_i}``
  and unary ``R_i = {c_i}``.
* general algebra: for every function ``f_j`` of arity ``n_j`` and every value
  ``c_i`` in the union of all ranges, ``D_i_j = f_j^-1(c_i)`` and ``R_i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation, StructureError
from .structures import FiniteStructure, classify, find_identity, nonunit_range, with_relations

SINGLETON_NOTE = (
    "unary-tization realized by singleton unary predicates P_a (not by new binary symbols); "
    "the expansion is rigid, so its theory is unary"
)


@dataclass(frozen=True)
class Expansion:
    mode: str
    base: FiniteStructure
    added: tuple[tuple[str, int, frozenset], ...]
    combined: FiniteStructure
    range_R: tuple[int, ...] = ()
    notes: tuple[str, ...] = ()

    def predicate(self, name: str) -> frozenset:
        for n, _, tuples in self.added:
            if n == name:
                return tuples
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "base": self.base.name,
            "combined": self.combined.name,
            "range_R": list(self.range_R),
            "added": [
                {"name": n, "arity": k, "size": len(t)} for n, k, t in self.added
            ],
            "notes": list(self.notes),
        }


def _fresh(structure: FiniteStructure, name: str) -> str:
    if name in structure.signature:
        raise StructureError(f"{structure.name} already has a symbol named {name}")
    return name


def _build(mode, structure, added, range_R=(), notes=()) -> Expansion:
    added = tuple((_fresh(structure, n), k, frozenset(t)) for n, k, t in added)
    combined = with_relations(structure, added, name=f"{structure.name}_{mode.replace('-', '_')}")
    return Expansion(mode, structure, added, combined, tuple(range_R), tuple(notes))


def expand_singletons(structure: FiniteStructure) -> Expansion:
    added = [(f"P_{a}", 1, {(a,)}) for a in range(structure.size)]
    return _build("singletons", structure, added, notes=(SINGLETON_NOTE,))


def expand_finite_range(structure: FiniteStructure, *, exclude_identity: bool = True) -> Expansion:
    """``exclude_identity=False`` gives the groupoid variant: ``R(M) = M*M``
    and the ``D_i`` partition all of ``M^2``."""
    op = structure.operation
    if op is None:
        raise StructureError(f"{structure.name}: no binary operation")
    table = structure.table(op)
    s = structure.size
    e = find_identity(table) if exclude_identity else None
    values = nonunit_range(table, e)
    domain = [a for a in range(s) if a != e]
    added = []
    for i, c in enumerate(values, start=1):
        pairs = {(a, b) for a in domain for b in domain if table[a, b] == c}
        added.append((f"D_{i}", 2, pairs))
    added += [(f"R_{i}", 1, {(c,)}) for i, c in enumerate(values, start=1)]

    square = {(a, b) for a in domain for b in domain}
    d_sets = [t for n, _, t in added if n.startswith("D_")]
    if set().union(*d_sets) != square or sum(map(len, d_sets)) != len(square):
        raise InvariantViolation("D predicates do not partition the non-unit square")

    notes = []
    if e is None:
        notes.append("no identity used: R(M) = M*M (groupoid variant)")
    if s > 0 and classify(structure).is_group:
        notes.append(
            "group input: the binarity claim for finite R(M) concerns infinite monoids and does not apply"
        )
    return _build("finite-range", structure, added, values, notes)


def expand_general_algebra(structure: FiniteStructure) -> Expansion:
    funcs = structure.signature.of_kind("function")
    if not funcs:
        raise StructureError(f"{structure.name}: no function symbols")
    values = tuple(sorted(set().union(*(set(structure.functions[f.name].tolist()) for f in funcs))))
    s = structure.size
    added = []
    for j, f in enumerate(funcs, start=1):
        table = structure.functions[f.name]
        args = list(itertools.product(range(s), repeat=f.arity))
        for i, c in enumerate(values, start=1):
            hits = np.flatnonzero(table == c)
            added.append((f"D_{i}_{j}", f.arity, {args[r] for r in hits}))
    added += [(f"R_{i}", 1, {(c,)}) for i, c in enumerate(values, start=1)]
    notes = [f"function index j: {j} = {f.name}" for j, f in enumerate(funcs, start=1)]
    return _build("general", structure, added, values, notes)


MODES = {
    "singletons": expand_singletons,
    "finite-range": expand_finite_range,
    "general": expand_general_algebra,
}
