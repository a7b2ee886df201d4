"""Automorphism groups of finite structures.

The group is built as a stabilizer chain along the base ``0, 1, ..., s-1``.
Working from the deepest level up, for every point ``b`` not yet in the orbit
of ``i`` under the generators found so far, a backtracking search looks for an
automorphism fixing ``0..i-1`` and sending ``i`` to ``b``; the first hit
(lexicographically least image array) becomes a new generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_AUT_CAP
from .errors import BudgetExceeded, StructureError
from .structures import FiniteStructure

Permutation = tuple[int, ...]


def identity_perm(s: int) -> Permutation:
    return tuple(range(s))


def compose(p: Sequence[int], q: Sequence[int]) -> Permutation:
    """``p`` after ``q``."""
    return tuple(p[x] for x in q)


def inverse(p: Sequence[int]) -> Permutation:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def is_automorphism(p: Sequence[int], structure: FiniteStructure) -> bool:
    s = structure.size
    if len(p) != s:
        raise StructureError(f"permutation of length {len(p)} for a structure of size {s}")
    perm = np.asarray(p, dtype=np.int64)
    if not is_permutation(perm.tolist()):
        raise StructureError("not a permutation")
    for c, value in structure.constants.items():
        if perm[value] != value:
            return False
    for sym in structure.signature:
        if sym.kind == "function":
            t = structure.table(sym.name)
            if not np.array_equal(perm[t], t[np.ix_(*[perm] * sym.arity)]):
                return False
        elif sym.kind == "relation":
            mask = structure.relation_mask(sym.name).reshape((s,) * sym.arity)
            if not np.array_equal(mask, mask[np.ix_(*[perm] * sym.arity)]):
                return False
    return True


@dataclass(frozen=True)
class AutGroup:
    size: int
    generators: tuple[Permutation, ...]
    base: tuple[int, ...]
    chain_orders: tuple[int, ...]

    @property
    def order(self) -> int:
        return math.prod(self.chain_orders)

    @property
    def is_trivial(self) -> bool:
        return not self.generators

    def generator_array(self) -> np.ndarray:
        if not self.generators:
            return np.empty((0, self.size), dtype=np.int64)
        return np.array(self.generators, dtype=np.int64)

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "generators": [list(g) for g in self.generators],
            "base": list(self.base),
            "chain_orders": list(self.chain_orders),
        }


def point_orbit(point: int, gens: Sequence[Permutation]) -> set[int]:
    orbit = {point}
    frontier = [point]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = g[x]
            if y not in orbit:
                orbit.add(y)
                frontier.append(y)
    return orbit


class _Search:
    """Backtracking with forced-image propagation through every table cell
    whose arguments are already mapped."""

    def __init__(self, structure: FiniteStructure):
        self.s = structure.size
        self.constants = sorted(set(structure.constants.values()))
        self.tables = [
            (structure.table(sym.name), sym.arity)
            for sym in structure.signature.of_kind("function")
        ]
        self.masks = [
            (structure.relation_mask(sym.name).reshape((self.s,) * sym.arity), sym.arity)
            for sym in structure.signature.of_kind("relation")
        ]

    def _propagate(self, img: np.ndarray) -> bool:
        s = self.s
        while True:
            dom = np.flatnonzero(img >= 0)
            cod = img[dom]
            forced = False
            for table, k in self.tables:
                vals = table[np.ix_(*[dom] * k)].reshape(-1)
                want = table[np.ix_(*[cod] * k)].reshape(-1)
                have = img[vals]
                known = have >= 0
                if np.any(have[known] != want[known]):
                    return False
                if not known.all():
                    pairs = np.unique(np.stack([vals[~known], want[~known]], axis=1), axis=0)
                    uniq, targets = pairs[:, 0], pairs[:, 1]
                    # one forced image per point, and images stay injective
                    if len(np.unique(uniq)) != len(uniq) or len(np.unique(targets)) != len(targets):
                        return False
                    used = np.zeros(s, dtype=bool)
                    used[img[img >= 0]] = True
                    if used[targets].any():
                        return False
                    img[uniq] = targets
                    forced = True
                    break
            if forced:
                continue
            for mask, k in self.masks:
                if not np.array_equal(mask[np.ix_(*[dom] * k)], mask[np.ix_(*[cod] * k)]):
                    return False
            return True

    def extend(self, prefix: dict[int, int]) -> Permutation | None:
        img = np.full(self.s, -1, dtype=np.int64)
        for c in self.constants:
            img[c] = c
        for x, y in prefix.items():
            if img[x] >= 0 and img[x] != y:
                return None
            img[x] = y
        pts = img[img >= 0]
        if len(np.unique(pts)) != len(pts):
            return None
        return self._dfs(img)

    def _dfs(self, img: np.ndarray) -> Permutation | None:
        if not self._propagate(img):
            return None
        free = np.flatnonzero(img < 0)
        if free.size == 0:
            return tuple(int(v) for v in img)
        x = int(free[0])
        used = np.zeros(self.s, dtype=bool)
        used[img[img >= 0]] = True
        for y in np.flatnonzero(~used):
            trial = img.copy()
            trial[x] = y
            found = self._dfs(trial)
            if found is not None:
                return found
        return None


def automorphisms(structure: FiniteStructure, *, cap: int = DEFAULT_AUT_CAP) -> AutGroup:
    s = structure.size
    if s > cap:
        raise BudgetExceeded(f"structure size {s} exceeds automorphism search cap {cap}", required=s)
    search = _Search(structure)
    gens: list[Permutation] = []
    chain = [1] * s
    for i in reversed(range(s)):
        orbit = point_orbit(i, gens)
        for b in range(i + 1, s):
            if b in orbit:
                continue
            prefix = {x: x for x in range(i)}
            prefix[i] = b
            g = search.extend(prefix)
            if g is not None:
                gens.append(g)
                orbit = point_orbit(i, gens)
        chain[i] = len(orbit)
    return AutGroup(s, tuple(gens), tuple(range(s)), tuple(chain))
