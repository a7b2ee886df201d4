"""Relations on a finite universe as boolean masks over tuple ranks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import StructureError
from .kernels import tuple_digits
from .orbits import tuple_rank, tuple_unrank
from .structures import FiniteStructure


@dataclass(frozen=True, eq=False)
class Relation:
    s: int
    m: int
    mask: np.ndarray
    name: str = ""

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool).reshape(-1)
        if mask.size != self.s**self.m:
            raise StructureError(f"mask of length {mask.size} for {self.s}^{self.m} tuples")
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return (self.s, self.m) == (other.s, other.m) and np.array_equal(self.mask, other.mask)

    def __len__(self):
        return int(self.mask.sum())

    def __contains__(self, tup) -> bool:
        return bool(self.mask[tuple_rank(tup, self.s)])

    @classmethod
    def from_tuples(cls, tuples: Iterable[Sequence[int]], m: int, s: int, name: str = "") -> "Relation":
        mask = np.zeros(s**m, dtype=bool)
        for t in tuples:
            if len(t) != m:
                raise StructureError(f"tuple {tuple(t)} is not of length {m}")
            mask[tuple_rank(t, s)] = True
        return cls(s, m, mask, name)

    @classmethod
    def full(cls, s: int, m: int) -> "Relation":
        return cls(s, m, np.ones(s**m, dtype=bool), "full")

    @classmethod
    def empty(cls, s: int, m: int) -> "Relation":
        return cls(s, m, np.zeros(s**m, dtype=bool), "empty")

    @property
    def is_trivial(self) -> bool:
        """Empty or everything: the relations of arity 0."""
        return not self.mask.any() or bool(self.mask.all())

    def tuples(self) -> list[tuple[int, ...]]:
        return [tuple_unrank(int(r), self.m, self.s) for r in np.flatnonzero(self.mask)]

    def complement(self) -> "Relation":
        return Relation(self.s, self.m, ~self.mask, f"not_{self.name}" if self.name else "")


def relation_of(structure: FiniteStructure, name: str) -> Relation:
    sym = structure.signature.get(name)
    if sym.kind != "relation":
        raise StructureError(f"{name} is a {sym.kind}, not a relation")
    return Relation(structure.size, sym.arity, structure.relation_mask(name), name)


def graph_of(structure: FiniteStructure, fn: str, power: int | None = None) -> Relation:
    """Graph ``{(a_1..a_k, f(a))}`` of a function symbol.

    With ``power=n`` the function must be binary and the graph is that of
    ``y = x_1 * ... * x_n`` (left-associated), a subset of ``M^(n+1)``.
    """
    if fn not in structure.signature:
        raise StructureError(f"no symbol named {fn!r}")
    sym = structure.signature.get(fn)
    if sym.kind != "function":
        raise StructureError(f"{fn} is a {sym.kind}, not a function")
    s = structure.size
    table = structure.functions[fn]
    if power is None:
        k = sym.arity
        values = table
    else:
        if sym.arity != 2:
            raise StructureError(f"--power needs a binary function; {fn} has arity {sym.arity}")
        if power < 1:
            raise StructureError("power must be >= 1")
        k = power
        digits = tuple_digits(s, k)
        values = digits[:, 0].astype(np.int64)
        t2 = structure.table(fn)
        for i in range(1, k):
            values = t2[values, digits[:, i]]
    ranks = np.arange(s**k, dtype=np.int64) * s + values
    mask = np.zeros(s ** (k + 1), dtype=bool)
    mask[ranks] = True
    label = f"graph_{fn}" if power is None else f"graph_{fn}^{power}"
    return Relation(s, k + 1, mask, label)
