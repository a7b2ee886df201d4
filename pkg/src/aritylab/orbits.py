"""Tuple ranking and automorphism-orbit partitions of ``M^m``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .automorph import AutGroup
from .config import env_max_tuples
from .errors import BudgetExceeded, StructureError
from .structures import FiniteStructure


def tuple_rank(tup: Sequence[int], s: int) -> int:
    r = 0
    for a in tup:
        a = int(a)
        if not 0 <= a < s:
            raise StructureError(f"tuple entry {a} out of range 0..{s - 1}")
        r = r * s + a
    return r


def tuple_unrank(r: int, m: int, s: int) -> tuple[int, ...]:
    if not 0 <= r < s**m:
        raise StructureError(f"rank {r} out of range for m={m}, s={s}")
    out = []
    for _ in range(m):
        r, a = divmod(r, s)
        out.append(a)
    return tuple(reversed(out))


def check_tuple_budget(s: int, m: int, cap: int | None) -> int:
    cap = env_max_tuples() if cap is None else cap
    need = s**m
    if need > cap:
        raise BudgetExceeded(
            f"tuple space {s}^{m} = {need} exceeds cap {cap} (set ARITYLAB_MAX_TUPLES)",
            required=need,
        )
    return need


@dataclass(frozen=True, eq=False)
class OrbitPartition:
    s: int
    m: int
    class_of: np.ndarray
    class_count: int

    def __post_init__(self):
        self.class_of.setflags(write=False)

    def __len__(self):
        return self.class_count

    def orbit_of(self, tup: Sequence[int]) -> int:
        if len(tup) != self.m:
            raise StructureError(f"expected a {self.m}-tuple, got {len(tup)} entries")
        return int(self.class_of[tuple_rank(tup, self.s)])

    def classes(self) -> list[np.ndarray]:
        """Ranks of each class, in class-id order."""
        order = np.argsort(self.class_of, kind="stable")
        bounds = np.cumsum(np.bincount(self.class_of, minlength=self.class_count))[:-1]
        return np.split(order, bounds)

    def representatives(self) -> np.ndarray:
        """Least rank of each class."""
        _, first = np.unique(self.class_of, return_index=True)
        return first


def orbit_partition(
    structure: FiniteStructure | int, aut: AutGroup, m: int, *, cap: int | None = None
) -> OrbitPartition:
    s = structure if isinstance(structure, int) else structure.size
    if m < 0:
        raise StructureError("tuple length must be >= 0")
    check_tuple_budget(s, m, cap)
    if m == 0:
        return OrbitPartition(s, 0, np.zeros(1, dtype=np.int64), 1)
    class_of, count = kernels.orbit_labels(aut.generator_array(), s, m)
    return OrbitPartition(s, m, class_of, count)


def orbit_of(partition: OrbitPartition, tup: Sequence[int]) -> int:
    return partition.orbit_of(tup)
