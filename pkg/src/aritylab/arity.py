"""Arity engine.

On a finite structure the 0-definable subsets of ``M^m`` are exactly the
unions of automorphism orbits.  The relations expressible as Boolean
combinations of n-variable formulas are the unions of *signature classes*:
two m-tuples share a level-n signature when every increasing n-element
sub-tuple lies in the same n-orbit (level 1 adds the equality pattern of the
coordinates).  A theory is n-ary when these classes coincide with the orbits
for every m.
"""

from __future__ import annotations

import itertools
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .automorph import AutGroup, automorphisms
from .config import RunConfig
from .errors import BudgetExceeded, InvariantViolation, NotInvariantError, StructureError
from .orbits import OrbitPartition, check_tuple_budget, orbit_partition, tuple_rank, tuple_unrank
from .relations import Relation
from .structures import FiniteStructure

Pair = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class SubtypeSignature:
    n: int
    ids: tuple[int, ...]
    equality: tuple[int, ...] | None = None  # restricted-growth string, level 1 only


@dataclass(frozen=True)
class Verdict:
    holds: bool
    counterexample: Pair | None = None
    m: int | None = None  # tuple length at which a counterexample was found

    def __bool__(self):
        return self.holds

    def as_dict(self) -> dict:
        d = {"holds": self.holds}
        if self.counterexample is not None:
            d["m"] = self.m
            d["counterexample"] = [list(t) for t in self.counterexample]
        return d


@dataclass(frozen=True)
class CheckResult:
    n: int
    m: int
    passed: bool
    signature_classes: int
    orbit_classes: int
    counterexample: Pair | None = None
    seconds: float = 0.0

    def as_dict(self, timings: bool = False) -> dict:
        d = {
            "n": self.n,
            "m": self.m,
            "passed": self.passed,
            "signature_classes": self.signature_classes,
            "orbit_classes": self.orbit_classes,
            "counterexample": [list(t) for t in self.counterexample] if self.counterexample else None,
        }
        if timings:
            d["seconds"] = round(self.seconds, 6)
        return d


@dataclass(frozen=True)
class ArityReport:
    structure: str
    size: int
    aut_order: int
    max_m: int
    max_n: int
    checks: tuple[CheckResult, ...]
    theory_arity: int | None  # None: exceeds max_n
    exact: bool
    timings: dict = field(default_factory=dict, compare=False)

    def as_dict(self, timings: bool = False) -> dict:
        d = {
            "structure": self.structure,
            "size": self.size,
            "aut_order": self.aut_order,
            "max_m": self.max_m,
            "max_n": self.max_n,
            "theory_arity": self.theory_arity if self.theory_arity is not None else "exceeds max_n",
            "exact": self.exact,
            "checks": [c.as_dict(timings) for c in self.checks],
        }
        if timings:
            d["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return d


@dataclass(frozen=True)
class HypothesisReport:
    relation: str
    m: int
    sol_bound: int
    cofinite_slack: int
    condition1: bool  # every (m-1)-substitution has between 1 and F completions
    condition2: bool  # every coordinate-deleted projection misses at most C tuples
    min_completions: int
    max_completions: int
    condition1_witness: dict | None  # least violating substitution, if any
    missing_per_coordinate: tuple[int, ...]
    condition2_witness: dict | None

    def as_dict(self) -> dict:
        return {
            "relation": self.relation,
            "m": self.m,
            "sol_bound": self.sol_bound,
            "cofinite_slack": self.cofinite_slack,
            "condition1": self.condition1,
            "condition2": self.condition2,
            "min_completions": self.min_completions,
            "max_completions": self.max_completions,
            "condition1_witness": self.condition1_witness,
            "missing_per_coordinate": list(self.missing_per_coordinate),
            "condition2_witness": self.condition2_witness,
            "conclusion": "not desk-testable: non-aritizability concerns infinite structures",
        }


def _first_occurrence(labels: np.ndarray, count: int) -> np.ndarray:
    first = np.full(count, -1, dtype=np.int64)
    # ids are numbered by first occurrence, so the first rank of id j is increasing in j
    _, idx = np.unique(labels, return_index=True)
    first[: idx.size] = idx
    return first


def least_split_pair(labels: np.ndarray, count: int, key: np.ndarray) -> tuple[int, int] | None:
    """Lexicographically least rank pair ``(a, b)``, ``a < b``, with equal
    ``labels`` and different ``key``."""
    head = _first_occurrence(labels, count)[labels]
    bad = key != key[head]
    if not bad.any():
        return None
    lab = labels[bad].min()
    a = int(np.flatnonzero(labels == lab)[0])
    b = int(np.flatnonzero(bad & (labels == lab))[0])
    return a, b


class Analyzer:
    """Per-structure cache of the automorphism group, orbit partitions and
    signature partitions.  Thread-safe; results are immutable."""

    def __init__(self, structure: FiniteStructure, config: RunConfig | None = None, aut: AutGroup | None = None):
        self.structure = structure
        self.config = config or RunConfig()
        self.s = structure.size
        self._aut = aut
        self._lock = threading.Lock()
        self._partitions: dict[int, OrbitPartition] = {}
        self._signatures: dict[tuple[int, int], tuple[np.ndarray, int]] = {}
        self._digits: dict[int, np.ndarray] = {}

    @cached_property
    def aut(self) -> AutGroup:
        if self._aut is not None:
            return self._aut
        return automorphisms(self.structure, cap=self.config.aut_cap)

    # -- partitions ---------------------------------------------------------

    def partition(self, m: int) -> OrbitPartition:
        with self._lock:
            hit = self._partitions.get(m)
        if hit is not None:
            return hit
        part = orbit_partition(self.s, self.aut, m, cap=self.config.tuple_cap)
        with self._lock:
            return self._partitions.setdefault(m, part)

    def digits(self, m: int) -> np.ndarray:
        with self._lock:
            hit = self._digits.get(m)
        if hit is not None:
            return hit
        check_tuple_budget(self.s, m, self.config.tuple_cap)
        d = kernels.tuple_digits(self.s, m, np.int8 if self.s < 128 else np.int16)
        d.setflags(write=False)
        with self._lock:
            return self._digits.setdefault(m, d)

    def _projection(self, digits: np.ndarray, index: Sequence[int]) -> np.ndarray:
        return kernels.ranks_of(digits[:, list(index)], self.s)

    def signature_columns(self, n: int, m: int) -> list[np.ndarray]:
        """Columns whose row tuples are the level-n signatures of ``M^m``."""
        if n < 1:
            raise StructureError("signature level must be >= 1")
        if n >= m:
            return [self.partition(m).class_of]
        d = self.digits(m)
        if n == 1:
            unary = self.partition(1).class_of
            cols = [unary[d[:, i]] for i in range(m)]
            cols.append(kernels.equality_codes(d))
            return cols
        self._assert_equality_in_pairs()
        part = self.partition(n).class_of
        return [part[self._projection(d, idx)] for idx in itertools.combinations(range(m), n)]

    def signature_partition(self, n: int, m: int) -> tuple[np.ndarray, int]:
        key = (n, m)
        with self._lock:
            hit = self._signatures.get(key)
        if hit is not None:
            return hit
        if n >= m:
            p = self.partition(m)
            result = (p.class_of, p.class_count)
        else:
            result = kernels.partition_by_columns(self.signature_columns(n, m), self.s**m)
            self._assert_coarser(result[0], self.partition(m), f"level {n} on M^{m}")
        with self._lock:
            return self._signatures.setdefault(key, result)

    def _assert_coarser(self, labels: np.ndarray, orbits: OrbitPartition, what: str):
        reps = orbits.representatives()
        if not np.array_equal(labels, labels[reps][orbits.class_of]):
            raise InvariantViolation(f"{what}: signature partition splits an orbit")

    def _assert_equality_in_pairs(self):
        p2 = self.partition(2).class_of
        diag = np.arange(self.s) * (self.s + 1)
        off = np.ones(self.s**2, dtype=bool)
        off[diag] = False
        if np.intersect1d(p2[diag], p2[off]).size:
            raise InvariantViolation("a 2-orbit mixes diagonal and off-diagonal pairs")

    def signature_of(self, tup: Sequence[int], n: int) -> SubtypeSignature:
        m = len(tup)
        tuple_rank(tup, self.s)  # range check
        if n < 1:
            raise StructureError("signature level must be >= 1")
        if n >= m:
            return SubtypeSignature(n, (self.partition(m).orbit_of(tup),))
        if n == 1:
            p1 = self.partition(1)
            ids = tuple(p1.orbit_of((a,)) for a in tup)
            first: dict[int, int] = {}
            rgs = tuple(first.setdefault(a, len(first)) for a in tup)
            return SubtypeSignature(1, ids, rgs)
        pn = self.partition(n)
        ids = tuple(
            pn.orbit_of(tuple(tup[i] for i in idx)) for idx in itertools.combinations(range(m), n)
        )
        return SubtypeSignature(n, ids)

    # -- relations ----------------------------------------------------------

    def _check_relation(self, rel: Relation):
        if rel.s != self.s:
            raise StructureError(f"relation over {rel.s} elements, structure has {self.s}")

    def check_invariant(self, rel: Relation, what: str = "relation"):
        """Raise :class:`NotInvariantError` unless ``rel`` is a union of orbits."""
        self._check_relation(rel)
        if rel.m == 0:
            return
        part = self.partition(rel.m)
        pair = least_split_pair(part.class_of, part.class_count, rel.mask)
        if pair is not None:
            a, b = (tuple_unrank(r, rel.m, self.s) for r in pair)
            raise NotInvariantError(
                f"{what} {rel.name or ''} is not automorphism-invariant: it separates {a} and {b} "
                f"of orbit {int(part.class_of[pair[0]])}".replace("  ", " "),
                orbit=(a, b),
            )

    def _relation_pair(self, rel: Relation, pair: tuple[int, int]) -> Pair:
        a, b = pair
        if not rel.mask[a]:
            a, b = b, a
        return tuple_unrank(a, rel.m, self.s), tuple_unrank(b, rel.m, self.s)

    def is_n_ary_relation(self, rel: Relation, n: int) -> Verdict:
        self.check_invariant(rel)
        m = rel.m
        if n < 0:
            raise StructureError("n must be >= 0")
        if n == 0:
            if rel.is_trivial:
                return Verdict(True)
            zeros = np.zeros(self.s**m, dtype=np.int64)
            return Verdict(False, self._relation_pair(rel, least_split_pair(zeros, 1, rel.mask)), m)
        if n >= m:
            return Verdict(True)
        labels, count = self.signature_partition(n, m)
        pair = least_split_pair(labels, count, rel.mask)
        if pair is None:
            return Verdict(True)
        return Verdict(False, self._relation_pair(rel, pair), m)

    def relation_arity(self, rel: Relation) -> int:
        self.check_invariant(rel)
        if rel.is_trivial:
            return 0
        for n in range(1, rel.m + 1):
            if self.is_n_ary_relation(rel, n):
                return n
        raise InvariantViolation("relation arity exceeded tuple length")  # pragma: no cover

    # -- theories -----------------------------------------------------------

    def check_level(self, n: int, m: int) -> CheckResult:
        t0 = time.perf_counter()
        orbits = self.partition(m)
        labels, count = self.signature_partition(n, m)
        pair = None
        if count != orbits.class_count:
            a, b = least_split_pair(labels, count, orbits.class_of)
            pair = (tuple_unrank(a, m, self.s), tuple_unrank(b, m, self.s))
        return CheckResult(
            n, m, pair is None, count, orbits.class_count, pair, time.perf_counter() - t0
        )

    def _map(self, fn, items, threads: int):
        items = list(items)
        if threads <= 1 or len(items) <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))

    def theory_arity(
        self, max_m: int | None = None, max_n: int | None = None, threads: int | None = None
    ) -> ArityReport:
        t_start = time.perf_counter()
        s = self.s
        max_m = max_m or self.config.max_m or s
        max_n = max_n or self.config.max_n or s
        threads = threads or self.config.threads
        _ = self.aut
        t_aut = time.perf_counter() - t_start
        checks: list[CheckResult] = []
        arity = None
        frontier = None
        for n in range(1, max_n + 1):
            ms = range(n + 1, max_m + 1)
            try:
                self._map(self.partition, [n, *ms], threads)
                level = self._map(lambda m: self.check_level(n, m), ms, threads)
            except BudgetExceeded as exc:
                raise BudgetExceeded(
                    f"{exc} (frontier reached: {frontier or 'none'})",
                    required=exc.required,
                    frontier=frontier,
                ) from exc
            # a failure at m persists for larger m: keep up to the first failure
            for res in level:
                checks.append(res)
                frontier = (res.n, res.m)
                if not res.passed:
                    break
            if all(r.passed for r in level):
                arity = n
                break
        return ArityReport(
            structure=self.structure.name,
            size=s,
            aut_order=self.aut.order,
            max_m=max_m,
            max_n=max_n,
            checks=tuple(checks),
            theory_arity=arity,
            exact=arity is not None and max_m >= s,
            timings={"automorphisms": t_aut, "total": time.perf_counter() - t_start},
        )

    def _substitution_bits(self, rels: Iterable[Relation], m: int) -> list[np.ndarray]:
        d = self.digits(m)
        cols = []
        for rel in rels:
            for idx in itertools.product(range(m), repeat=rel.m):
                cols.append(rel.mask[self._projection(d, idx)].astype(np.int64))
        return cols

    def _extended_check(self, cols: list[np.ndarray], m: int) -> Pair | None:
        orbits = self.partition(m)
        labels, count = kernels.partition_by_columns(cols, self.s**m)
        self._assert_coarser(labels, orbits, f"extended signature on M^{m}")
        if count == orbits.class_count:
            return None
        a, b = least_split_pair(labels, count, orbits.class_of)
        return tuple_unrank(a, m, self.s), tuple_unrank(b, m, self.s)

    def almost_arity_check(self, witnesses: Sequence[Relation], n: int, max_m: int | None = None) -> Verdict:
        max_m = max_m or self.config.max_m or self.s
        if n < 1:
            raise StructureError("n must be >= 1")
        for w in witnesses:
            self.check_invariant(w, "witness")
            if w.m > max_m:
                raise StructureError(f"witness of arity {w.m} exceeds max_m={max_m}")
        for m in range(n + 1, max_m + 1):
            cols = self.signature_columns(n, m) + self._substitution_bits(witnesses, m)
            pair = self._extended_check(cols, m)
            if pair is not None:
                return Verdict(False, pair, m)
        return Verdict(True)

    def delta_based_check(self, delta: Sequence[Relation], max_m: int | None = None) -> Verdict:
        max_m = max_m or self.config.max_m or self.s
        for rel in delta:
            self.check_invariant(rel, "delta member")
        for m in range(1, max_m + 1):
            cols = [kernels.equality_codes(self.digits(m))] + self._substitution_bits(delta, m)
            pair = self._extended_check(cols, m)
            if pair is not None:
                return Verdict(False, pair, m)
        return Verdict(True)


def check_arit_hypotheses(rel: Relation, sol_bound: int = 1, cofinite_slack: int = 0) -> HypothesisReport:
    """Finite shadow of the two hypotheses on a relation ``R`` of ``M^m``:
    every substitution of m-1 coordinates leaves between 1 and ``sol_bound``
    completions, and every projection deleting one coordinate misses at most
    ``cofinite_slack`` tuples of ``M^(m-1)``."""
    if not rel.mask.any():
        raise StructureError("relation must be nonempty")
    s, m = rel.s, rel.m
    if m < 1:
        raise StructureError("relation must have arity >= 1")
    arr = rel.mask.reshape((s,) * m)
    lo, hi = None, None
    witness1 = None
    missing = []
    witness2 = None
    for i in range(m):
        counts = np.asarray(arr.sum(axis=i)).reshape(-1)
        c_lo, c_hi = int(counts.min()), int(counts.max())
        lo = c_lo if lo is None else min(lo, c_lo)
        hi = c_hi if hi is None else max(hi, c_hi)
        bad = np.flatnonzero((counts < 1) | (counts > sol_bound))
        if witness1 is None and bad.size:
            r = int(bad[0])
            rest = tuple_unrank(r, m - 1, s) if m > 1 else ()
            witness1 = {
                "coordinate": i,
                "substitution": list(rest[:i]) + [None] + list(rest[i:]),
                "completions": int(counts[r]),
            }
        n_missing = int(counts.size - np.count_nonzero(counts))
        missing.append(n_missing)
        if witness2 is None and n_missing > cofinite_slack:
            r = int(np.flatnonzero(counts == 0)[0])
            witness2 = {"coordinate": i, "missed": list(tuple_unrank(r, m - 1, s)), "missing": n_missing}
    return HypothesisReport(
        relation=rel.name,
        m=m,
        sol_bound=sol_bound,
        cofinite_slack=cofinite_slack,
        condition1=witness1 is None,
        condition2=witness2 is None,
        min_completions=lo,
        max_completions=hi,
        condition1_witness=witness1,
        missing_per_coordinate=tuple(missing),
        condition2_witness=witness2,
    )


# -- functional wrappers ------------------------------------------------------


def _analyzer(structure, analyzer):
    if analyzer is not None:
        return analyzer
    return Analyzer(structure)


def signature_of(structure: FiniteStructure, tup: Sequence[int], n: int, analyzer: Analyzer | None = None):
    return _analyzer(structure, analyzer).signature_of(tup, n)


def is_n_ary_relation(structure: FiniteStructure, rel: Relation, n: int, analyzer: Analyzer | None = None) -> Verdict:
    return _analyzer(structure, analyzer).is_n_ary_relation(rel, n)


def relation_arity(structure: FiniteStructure, rel: Relation, analyzer: Analyzer | None = None) -> int:
    return _analyzer(structure, analyzer).relation_arity(rel)


def theory_arity(
    structure: FiniteStructure,
    max_m: int | None = None,
    max_n: int | None = None,
    *,
    config: RunConfig | None = None,
    analyzer: Analyzer | None = None,
) -> ArityReport:
    an = analyzer or Analyzer(structure, config)
    return an.theory_arity(max_m, max_n)


def almost_arity_check(structure, witnesses, n, max_m=None, analyzer=None) -> Verdict:
    return _analyzer(structure, analyzer).almost_arity_check(witnesses, n, max_m)


def delta_based_check(structure, delta, max_m=None, analyzer=None) -> Verdict:
    return _analyzer(structure, analyzer).delta_based_check(delta, max_m)


def orbit_relations(analyzer: Analyzer, m: int) -> list[Relation]:
    """Every orbit of ``M^m`` as a relation."""
    part = analyzer.partition(m)
    return [
        Relation(analyzer.s, m, part.class_of == c, f"orbit{m}_{c}") for c in range(part.class_count)
    ]
