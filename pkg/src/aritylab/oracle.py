"""Brute-force reference implementations.

Nothing here touches the engine (orbits, kernels, arity): automorphisms come
from filtering all ``s!`` permutations, orbits from applying every
automorphism to every tuple, and the algebra of n-variable definable sets
from closing explicit cylinder sets, stored as Python-int bitmasks, under
complement and intersection.  Bit ``i`` of a mask is the ``i``-th tuple of
``itertools.product(range(s), repeat=m)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .automorph import is_automorphism
from .errors import BudgetExceeded, NotInvariantError
from .structures import FiniteStructure


@dataclass(frozen=True)
class OracleCaps:
    max_size: int = 4
    max_m: int = 4
    max_n: int = 2
    max_family: int = 1 << 16


ATOM_CAPS = OracleCaps()
ARITY_CAPS = OracleCaps(max_size=6, max_m=4, max_n=4)
THEORY_CAPS = OracleCaps(max_size=6, max_m=6, max_n=6)


def _check(what: str, value: int, cap: int):
    if value > cap:
        raise BudgetExceeded(f"oracle {what} {value} exceeds cap {cap}", required=value)


def brute_automorphisms(structure: FiniteStructure, *, cap: int = 8) -> list[tuple[int, ...]]:
    _check("structure size", structure.size, cap)
    return [p for p in itertools.permutations(range(structure.size)) if is_automorphism(p, structure)]


def all_tuples(s: int, m: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(s), repeat=m))


def mask_of(indices: Iterable[int], nbits: int) -> int:
    buf = bytearray((nbits + 7) // 8)
    for j in indices:
        buf[j >> 3] |= 1 << (j & 7)
    return int.from_bytes(buf, "little")


def brute_orbit_lists(structure: FiniteStructure, m: int, auts=None) -> list[list[int]]:
    """Orbits of ``M^m`` as sorted tuple-index lists, ordered by least member."""
    auts = auts if auts is not None else brute_automorphisms(structure)
    tuples = all_tuples(structure.size, m)
    index = {t: i for i, t in enumerate(tuples)}
    seen = [False] * len(tuples)
    out = []
    for i, t in enumerate(tuples):
        if seen[i]:
            continue
        members = {index[tuple(g[a] for a in t)] for g in auts}
        for j in members:
            seen[j] = True
        out.append(sorted(members))
    return out


def brute_orbits(structure: FiniteStructure, m: int, auts=None) -> list[int]:
    """Orbits of ``M^m`` as bitmasks, ordered by least member."""
    n = structure.size**m
    return [mask_of(o, n) for o in brute_orbit_lists(structure, m, auts)]


def fibres(s: int, m: int, index_map: Sequence[int]) -> dict[tuple[int, ...], list[int]]:
    """Tuple indices of ``M^m`` grouped by their projection along ``index_map``."""
    out: dict[tuple[int, ...], list[int]] = {}
    for j, t in enumerate(all_tuples(s, m)):
        out.setdefault(tuple(t[i] for i in index_map), []).append(j)
    return out


def cylinder(members: Iterable[tuple[int, ...]], s: int, m: int, index_map: Sequence[int]) -> int:
    """``{t in M^m : (t[i] for i in index_map) in members}``."""
    fib = fibres(s, m, index_map)
    return mask_of((j for t in members for j in fib.get(tuple(t), ())), s**m)


def diagonal(s: int, m: int, i: int, j: int) -> int:
    return mask_of((k for k, t in enumerate(all_tuples(s, m)) if t[i] == t[j]), s**m)


def boolean_closure(seeds: Iterable[int], ground: int, *, budget: int = 1 << 16) -> set[int]:
    """Close ``seeds`` under complement (relative to ``ground``) and pairwise
    intersection, by worklist."""
    family: set[int] = set()
    work = [ground & x for x in seeds] + [ground, 0]
    while work:
        x = work.pop()
        if x in family:
            continue
        family.add(x)
        if len(family) > budget:
            raise BudgetExceeded(f"closure exceeded {budget} sets", required=len(family))
        work.append(ground & ~x)
        for y in list(family):
            z = x & y
            if z not in family:
                work.append(z)
    return family


def atoms_of_family(family: Iterable[int]) -> list[int]:
    """Minimal nonempty members of a Boolean algebra of sets."""
    fam = [x for x in family if x]
    return sorted(
        (x for x in fam if not any(y != x and (y & x) == y for y in fam)), key=lambda a: (a & -a)
    )


def refine_atoms(generators: Iterable[int], ground: int, stop_at: int | None = None) -> list[int]:
    """Atoms of the Boolean algebra generated by ``generators``: split every
    current atom by each generator and its complement."""
    atoms = [ground] if ground else []
    for g in generators:
        nxt = []
        for a in atoms:
            inside = a & g
            if inside and inside != a:
                nxt.append(inside)
                nxt.append(a & ~g)
            else:
                nxt.append(a)
        atoms = nxt
        if stop_at is not None and len(atoms) >= stop_at:
            break
    return sorted(atoms, key=lambda a: (a & -a))


@dataclass(frozen=True)
class AlgebraClosure:
    """Boolean algebra on ``M^m`` generated by cylinders of n-variable sets."""

    s: int
    m: int
    n: int
    generators: tuple[int, ...]
    atoms: tuple[int, ...]

    @property
    def ground(self) -> int:
        return (1 << (self.s**self.m)) - 1

    def family(self, budget: int = ATOM_CAPS.max_family) -> set[int]:
        """Every member of the algebra (all unions of atoms)."""
        if 2 ** len(self.atoms) > budget:
            raise BudgetExceeded(
                f"algebra has 2^{len(self.atoms)} members, budget {budget}",
                required=2 ** len(self.atoms),
            )
        out = set()
        for bits in itertools.product((0, 1), repeat=len(self.atoms)):
            x = 0
            for b, a in zip(bits, self.atoms):
                if b:
                    x |= a
            out.add(x)
        return out

    def atom_labels(self) -> list[int]:
        """Atom index of every tuple, atoms numbered by least member."""
        labels = [-1] * (self.s**self.m)
        for k, a in enumerate(self.atoms):
            j = 0
            while a:
                if a & 1:
                    labels[j] = k
                a >>= 1
                j += 1
        return labels


def n_ary_generators(structure: FiniteStructure, m: int, n: int, auts=None) -> list[int]:
    """Cylinders of every k-orbit (k <= n) along every index map into
    ``{0..m-1}``, plus the diagonals when ``n == 1``."""
    s = structure.size
    auts = auts if auts is not None else brute_automorphisms(structure)
    gens: list[int] = []
    seen: set[int] = set()
    for k in range(min(n, m), 0, -1):
        tuples = all_tuples(s, k)
        orbits = [[tuples[j] for j in o] for o in brute_orbit_lists(structure, k, auts)]
        for index_map in itertools.product(range(m), repeat=k):
            fib = fibres(s, m, index_map)
            for orbit in orbits:
                c = mask_of((j for t in orbit for j in fib.get(t, ())), s**m)
                if c not in seen:
                    seen.add(c)
                    gens.append(c)
    if n == 1:
        for i, j in itertools.combinations(range(m), 2):
            gens.append(diagonal(s, m, i, j))
    return gens


def brute_n_ary_atoms(
    structure: FiniteStructure, m: int, n: int, *, caps: OracleCaps = ATOM_CAPS, auts=None
) -> AlgebraClosure:
    _check("structure size", structure.size, caps.max_size)
    _check("tuple length", m, caps.max_m)
    _check("level", n, caps.max_n)
    auts = auts if auts is not None else brute_automorphisms(structure)
    gens = n_ary_generators(structure, m, n, auts)
    ground = (1 << (structure.size**m)) - 1
    # the algebra is never finer than the orbits, so stop once it matches them
    n_orbits = len(brute_orbits(structure, m, auts))
    atoms = refine_atoms(gens, ground, stop_at=n_orbits)
    return AlgebraClosure(structure.size, m, n, tuple(gens), tuple(atoms))


def _relation_mask(structure: FiniteStructure, rel, m: int | None) -> tuple[int, int]:
    s = structure.size
    if hasattr(rel, "mask"):
        m = rel.m
        bits = list(rel.mask)
    else:
        members = set(map(tuple, rel))
        if m is None:
            if not members:
                raise ValueError("arity of an empty tuple set must be given")
            m = len(next(iter(members)))
        bits = [t in members for t in all_tuples(s, m)]
    mask = 0
    for j, b in enumerate(bits):
        if b:
            mask |= 1 << j
    return mask, m


def brute_relation_arity(
    structure: FiniteStructure, rel, m: int | None = None, *, caps: OracleCaps = ARITY_CAPS
) -> int:
    """Least n such that ``rel`` is a union of level-n atoms (0 when it is
    empty or everything)."""
    mask, m = _relation_mask(structure, rel, m)
    _check("structure size", structure.size, caps.max_size)
    _check("tuple length", m, caps.max_m)
    ground = (1 << (structure.size**m)) - 1
    if mask in (0, ground):
        return 0
    auts = brute_automorphisms(structure)
    for orbit in brute_orbits(structure, m, auts):
        if mask & orbit not in (0, orbit):
            raise NotInvariantError("relation is not a union of automorphism orbits")
    for n in range(1, m + 1):
        closure = brute_n_ary_atoms(structure, m, n, caps=caps, auts=auts)
        if all(mask & a in (0, a) for a in closure.atoms):
            return n
    raise AssertionError("unreachable: level m atoms are the orbits")  # pragma: no cover


def brute_theory_arity(
    structure: FiniteStructure, max_m: int | None = None, *, caps: OracleCaps = THEORY_CAPS
) -> int:
    """Least n >= 1 with level-n atoms equal to the orbits of ``M^m`` for all
    ``n < m <= max_m``."""
    max_m = max_m or structure.size
    _check("structure size", structure.size, caps.max_size)
    _check("tuple length", max_m, caps.max_m)
    auts = brute_automorphisms(structure)
    orbits = {m: sorted(brute_orbits(structure, m, auts), key=lambda a: a & -a) for m in range(1, max_m + 1)}
    for n in range(1, max_m + 1):
        ok = True
        for m in range(n + 1, max_m + 1):
            closure = brute_n_ary_atoms(structure, m, n, caps=caps, auts=auts)
            if list(closure.atoms) != orbits[m]:
                ok = False
                break
        if ok:
            return n
    return max_m  # pragma: no cover - loop returns at n = max_m


def brute_delta_based(structure: FiniteStructure, delta: Sequence, max_m: int, *, caps: OracleCaps = ARITY_CAPS) -> bool:
    """Whether cylinders of every substitution instance of the ``delta``
    relations, together with equalities, generate the orbits of ``M^m`` for
    every ``m <= max_m``."""
    s = structure.size
    _check("structure size", s, caps.max_size)
    _check("tuple length", max_m, caps.max_m)
    auts = brute_automorphisms(structure)
    members = []
    for rel in delta:
        mask, k = _relation_mask(structure, rel, None)
        tuples = all_tuples(s, k)
        members.append(({tuples[j] for j in range(len(tuples)) if mask >> j & 1}, k))
    for m in range(1, max_m + 1):
        gens = [diagonal(s, m, i, j) for i, j in itertools.combinations(range(m), 2)]
        for tuples, k in members:
            for index_map in itertools.product(range(m), repeat=k):
                fib = fibres(s, m, index_map)
                gens.append(mask_of((j for t in tuples for j in fib.get(t, ())), s**m))
        ground = (1 << (s**m)) - 1
        atoms = refine_atoms(gens, ground)
        if sorted(atoms, key=lambda a: a & -a) != sorted(brute_orbits(structure, m, auts), key=lambda a: a & -a):
            return False
    return True
