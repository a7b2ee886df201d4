"""Finite structures: signatures, tables, the text file format, and families.

Universe elements are always ``0..s-1``.  Function tables are flat arrays of
length ``s**k`` indexed by the big-endian rank of the argument tuple (first
argument most significant), which is also the order used on disk.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

from .errors import StructureError, StructureSyntaxError

Kind = Literal["constant", "function", "relation"]
KIND_ORDER: dict[str, int] = {"constant": 0, "function": 1, "relation": 2}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

DEFAULT_FAMILY_SIZE_CAP = 64


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: Kind
    arity: int

    def __post_init__(self):
        if not _IDENT.match(self.name):
            raise StructureError(f"invalid symbol name {self.name!r}")
        if self.kind not in KIND_ORDER:
            raise StructureError(f"unknown symbol kind {self.kind!r}")
        if self.kind == "constant" and self.arity != 0:
            raise StructureError(f"constant {self.name} must have arity 0")
        if self.kind != "constant" and self.arity < 1:
            raise StructureError(f"{self.kind} {self.name} must have arity >= 1")


@dataclass(frozen=True)
class Signature:
    symbols: tuple[Symbol, ...] = ()

    def __post_init__(self):
        names = [sym.name for sym in self.symbols]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise StructureError(f"duplicate symbol {sorted(dup)[0]!r}")

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, name: str) -> bool:
        return any(sym.name == name for sym in self.symbols)

    def get(self, name: str) -> Symbol:
        for sym in self.symbols:
            if sym.name == name:
                return sym
        raise KeyError(name)

    def of_kind(self, kind: Kind) -> tuple[Symbol, ...]:
        return tuple(sym for sym in self.symbols if sym.kind == kind)

    def canonical(self) -> "Signature":
        # stable within a kind: the first binary function stays the designated operation
        return Signature(tuple(sorted(self.symbols, key=lambda sym: KIND_ORDER[sym.kind])))


def tuple_rank_of(tup: Sequence[int], s: int) -> int:
    r = 0
    for a in tup:
        r = r * s + int(a)
    return r


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    """A finite structure with universe ``{0..size-1}``.

    Immutable: tables are stored as read-only arrays and relations as
    frozensets of tuples.
    """

    name: str
    size: int
    signature: Signature
    functions: Mapping[str, np.ndarray] = field(default_factory=dict)
    relations: Mapping[str, frozenset] = field(default_factory=dict)
    constants: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not _IDENT.match(self.name):
            raise StructureError(f"invalid structure name {self.name!r}")
        if self.size < 1:
            raise StructureError("universe size must be >= 1")
        s = self.size
        funcs: dict[str, np.ndarray] = {}
        rels: dict[str, frozenset] = {}
        consts: dict[str, int] = {}
        for sym in self.signature:
            if sym.kind == "function":
                if sym.name not in self.functions:
                    raise StructureError(f"missing table for function {sym.name}")
                table = np.asarray(self.functions[sym.name], dtype=np.int64).reshape(-1).copy()
                if table.size != s**sym.arity:
                    raise StructureError(
                        f"function {sym.name}: expected {s**sym.arity} entries, got {table.size}"
                    )
                if table.size and (table.min() < 0 or table.max() >= s):
                    raise StructureError(f"function {sym.name}: value out of range 0..{s - 1}")
                table.setflags(write=False)
                funcs[sym.name] = table
            elif sym.kind == "relation":
                if sym.name not in self.relations:
                    raise StructureError(f"missing tuples for relation {sym.name}")
                tuples = frozenset(tuple(int(a) for a in t) for t in self.relations[sym.name])
                for t in tuples:
                    if len(t) != sym.arity:
                        raise StructureError(f"relation {sym.name}: tuple {t} has wrong length")
                    if any(a < 0 or a >= s for a in t):
                        raise StructureError(f"relation {sym.name}: tuple {t} out of range")
                rels[sym.name] = tuples
            else:
                if sym.name not in self.constants:
                    raise StructureError(f"missing value for constant {sym.name}")
                value = int(self.constants[sym.name])
                if not 0 <= value < s:
                    raise StructureError(f"constant {sym.name}: value {value} out of range")
                consts[sym.name] = value
        extra = (set(self.functions) | set(self.relations) | set(self.constants)) - {
            sym.name for sym in self.signature
        }
        if extra:
            raise StructureError(f"tables for undeclared symbols: {sorted(extra)}")
        object.__setattr__(self, "functions", funcs)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", consts)

    def __eq__(self, other):
        if not isinstance(other, FiniteStructure):
            return NotImplemented
        return serialize_structure(self) == serialize_structure(other)

    def __hash__(self):
        return hash(serialize_structure(self))

    def __repr__(self):
        syms = ", ".join(f"{s.kind} {s.name}/{s.arity}" for s in self.signature)
        return f"FiniteStructure({self.name!r}, size={self.size}, [{syms}])"

    @property
    def binary_functions(self) -> tuple[str, ...]:
        return tuple(sym.name for sym in self.signature.of_kind("function") if sym.arity == 2)

    @property
    def operation(self) -> str | None:
        """Name of the designated binary operation (first binary function)."""
        ops = self.binary_functions
        return ops[0] if ops else None

    def table(self, name: str) -> np.ndarray:
        """Function table reshaped to ``(s,)*k``."""
        k = self.signature.get(name).arity
        return self.functions[name].reshape((self.size,) * k)

    def relation_mask(self, name: str) -> np.ndarray:
        return self._masks[name]

    @cached_property
    def _masks(self) -> dict[str, np.ndarray]:
        out = {}
        for sym in self.signature.of_kind("relation"):
            mask = np.zeros(self.size**sym.arity, dtype=bool)
            for t in self.relations[sym.name]:
                mask[tuple_rank_of(t, self.size)] = True
            mask.setflags(write=False)
            out[sym.name] = mask
        return out


# ---------------------------------------------------------------------------
# text format


def _tokenize(text: str):
    """Yield ``(lineno, [(col, token), ...])`` for non-empty logical lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]
        if toks:
            yield lineno, toks


def _int_token(tok, lineno: int) -> int:
    col, text = tok
    if not re.fullmatch(r"-?\d+", text):
        raise StructureSyntaxError(f"expected integer, got {text!r}", lineno, col)
    return int(text)


def _ident_token(tok, lineno: int, what: str) -> str:
    col, text = tok
    if not _IDENT.match(text):
        raise StructureSyntaxError(f"invalid {what} {text!r}", lineno, col)
    return text


def parse_structure(text: str) -> FiniteStructure:
    """Parse a structure file.

    Raises :class:`StructureSyntaxError` carrying the 1-based line and column
    of the offending token.
    """
    lines = list(_tokenize(text))
    pos = 0

    def next_line():
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 1
            raise StructureSyntaxError("unexpected end of file (missing 'end'?)", last + 1, 1)
        item = lines[pos]
        pos += 1
        return item

    def expect_header(keyword: str, n_tokens: int):
        lineno, toks = next_line()
        if toks[0][1] != keyword:
            raise StructureSyntaxError(f"expected '{keyword}', got {toks[0][1]!r}", lineno, toks[0][0])
        if len(toks) != n_tokens:
            col = toks[min(len(toks), n_tokens) - 1][0] if len(toks) > n_tokens else toks[-1][0]
            raise StructureSyntaxError(
                f"'{keyword}' takes {n_tokens - 1} argument(s), got {len(toks) - 1}", lineno, col
            )
        return lineno, toks

    lineno, toks = expect_header("structure", 2)
    name = _ident_token(toks[1], lineno, "structure name")
    lineno, toks = expect_header("universe", 2)
    s = _int_token(toks[1], lineno)
    if s < 1:
        raise StructureSyntaxError("universe size must be >= 1", lineno, toks[1][0])

    symbols: list[Symbol] = []
    functions: dict[str, np.ndarray] = {}
    relations: dict[str, frozenset] = {}
    constants: dict[str, int] = {}
    seen: set[str] = set()

    def declare(tok, lineno, kind, arity) -> str:
        sym_name = _ident_token(tok, lineno, "symbol name")
        if sym_name in seen:
            raise StructureSyntaxError(f"duplicate symbol {sym_name!r}", lineno, tok[0])
        seen.add(sym_name)
        symbols.append(Symbol(sym_name, kind, arity))
        return sym_name

    def check_value(value, tok, lineno):
        if not 0 <= value < s:
            raise StructureSyntaxError(f"value {value} out of range 0..{s - 1}", lineno, tok[0])

    while True:
        lineno, toks = next_line()
        keyword = toks[0][1]
        if keyword == "end":
            if len(toks) != 1:
                raise StructureSyntaxError("unexpected tokens after 'end'", lineno, toks[1][0])
            break
        if keyword == "constant":
            if len(toks) != 3:
                raise StructureSyntaxError("'constant' takes a name and a value", lineno, toks[0][0])
            value = _int_token(toks[2], lineno)
            check_value(value, toks[2], lineno)
            constants[declare(toks[1], lineno, "constant", 0)] = value
        elif keyword in ("function", "relation"):
            if len(toks) != 3:
                raise StructureSyntaxError(f"'{keyword}' takes a name and an arity", lineno, toks[0][0])
            k = _int_token(toks[2], lineno)
            if k < 1:
                raise StructureSyntaxError(f"{keyword} arity must be >= 1", lineno, toks[2][0])
            header_line, name_tok = lineno, toks[1]
            if keyword == "function":
                need = s**k
                values: list[int] = []
                while len(values) < need:
                    lineno, toks = next_line()
                    if not re.fullmatch(r"-?\d+", toks[0][1]):
                        raise StructureSyntaxError(
                            f"function table has {len(values)} entries, expected {need}",
                            lineno,
                            toks[0][0],
                        )
                    for tok in toks:
                        if len(values) == need:
                            raise StructureSyntaxError(
                                f"function table has more than {need} entries", lineno, tok[0]
                            )
                        value = _int_token(tok, lineno)
                        check_value(value, tok, lineno)
                        values.append(value)
                functions[declare(name_tok, header_line, "function", k)] = np.array(
                    values, dtype=np.int64
                )
            else:
                sym_name = declare(name_tok, header_line, "relation", k)
                lineno, toks = next_line()
                if toks[0][1] != "tuples" or len(toks) != 2:
                    raise StructureSyntaxError("expected 'tuples <count>'", lineno, toks[0][0])
                count = _int_token(toks[1], lineno)
                if count < 0:
                    raise StructureSyntaxError("tuple count must be >= 0", lineno, toks[1][0])
                tuples: set[tuple[int, ...]] = set()
                for _ in range(count):
                    lineno, toks = next_line()
                    if len(toks) != k:
                        raise StructureSyntaxError(
                            f"relation {sym_name}: expected {k} integers per tuple, got {len(toks)}",
                            lineno,
                            toks[0][0],
                        )
                    t = tuple(_int_token(tok, lineno) for tok in toks)
                    for tok, value in zip(toks, t):
                        check_value(value, tok, lineno)
                    if t in tuples:
                        raise StructureSyntaxError(
                            f"relation {sym_name}: duplicate tuple {t}", lineno, toks[0][0]
                        )
                    tuples.add(t)
                relations[sym_name] = frozenset(tuples)
        else:
            raise StructureSyntaxError(f"unknown keyword {keyword!r}", lineno, toks[0][0])

    if pos != len(lines):
        lineno, toks = lines[pos]
        raise StructureSyntaxError("content after 'end'", lineno, toks[0][0])

    return FiniteStructure(name, s, Signature(tuple(symbols)), functions, relations, constants)


def serialize_structure(structure: FiniteStructure) -> str:
    """Canonical text form: constants, functions, relations (declaration order
    kept within each kind), one table row per line, tuples sorted."""
    s = structure.size
    out = [f"structure {structure.name}", f"universe {s}"]
    for sym in structure.signature.canonical():
        if sym.kind == "constant":
            out.append(f"constant {sym.name} {structure.constants[sym.name]}")
        elif sym.kind == "function":
            out.append(f"function {sym.name} {sym.arity}")
            rows = structure.functions[sym.name].reshape(-1, s)
            out.extend(" ".join(str(int(v)) for v in row) for row in rows)
        else:
            tuples = sorted(structure.relations[sym.name])
            out.append(f"relation {sym.name} {sym.arity}")
            out.append(f"tuples {len(tuples)}")
            out.extend(" ".join(map(str, t)) for t in tuples)
    out.append("end")
    return "\n".join(out) + "\n"


def canonicalize(text: str) -> str:
    return serialize_structure(parse_structure(text))


def read_structure(path) -> FiniteStructure:
    with open(path, encoding="utf-8") as fh:
        return parse_structure(fh.read())


def write_structure(structure: FiniteStructure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_structure(structure))


# ---------------------------------------------------------------------------
# construction helpers


def make_structure(
    name: str,
    size: int,
    functions: Mapping[str, np.ndarray | Sequence] | None = None,
    relations: Mapping[str, tuple[int, Iterable[Sequence[int]]]] | None = None,
    constants: Mapping[str, int] | None = None,
) -> FiniteStructure:
    """Build a structure from plain tables.

    Function arity is inferred from the table length; relations are given as
    ``name -> (arity, tuples)``.
    """
    functions = dict(functions or {})
    relations = dict(relations or {})
    constants = dict(constants or {})
    symbols = [Symbol(c, "constant", 0) for c in constants]
    tables = {}
    for fname, table in functions.items():
        arr = np.asarray(table, dtype=np.int64).reshape(-1)
        k = round(np.log(arr.size) / np.log(size)) if size > 1 else int(np.asarray(table).ndim)
        if size > 1 and size**k != arr.size:
            raise StructureError(f"function {fname}: table length {arr.size} is not a power of {size}")
        symbols.append(Symbol(fname, "function", max(k, 1)))
        tables[fname] = arr
    rels = {}
    for rname, (k, tuples) in relations.items():
        symbols.append(Symbol(rname, "relation", k))
        rels[rname] = frozenset(tuple(t) for t in tuples)
    return FiniteStructure(name, size, Signature(tuple(symbols)), tables, rels, constants)


def with_relations(
    structure: FiniteStructure,
    added: Sequence[tuple[str, int, Iterable[Sequence[int]]]],
    name: str | None = None,
) -> FiniteStructure:
    """Expansion of ``structure`` by new relation symbols."""
    symbols = list(structure.signature.symbols)
    relations = dict(structure.relations)
    for rname, k, tuples in added:
        symbols.append(Symbol(rname, "relation", k))
        relations[rname] = frozenset(tuple(int(a) for a in t) for t in tuples)
    return FiniteStructure(
        name or structure.name,
        structure.size,
        Signature(tuple(symbols)),
        structure.functions,
        relations,
        structure.constants,
    )


def relabel(structure: FiniteStructure, q: Sequence[int], name: str | None = None) -> FiniteStructure:
    """Isomorphic copy in which element ``a`` is renamed ``q[a]``."""
    q = np.asarray(q, dtype=np.int64)
    s = structure.size
    if sorted(q.tolist()) != list(range(s)):
        raise StructureError("relabeling must be a permutation of the universe")
    functions = {}
    for sym in structure.signature.of_kind("function"):
        old = structure.table(sym.name)
        new = np.empty_like(old)
        for args in itertools.product(range(s), repeat=sym.arity):
            new[tuple(q[list(args)])] = q[old[args]]
        functions[sym.name] = new.reshape(-1)
    relations = {
        name_: frozenset(tuple(int(q[a]) for a in t) for t in tuples)
        for name_, tuples in structure.relations.items()
    }
    constants = {c: int(q[v]) for c, v in structure.constants.items()}
    return FiniteStructure(
        name or structure.name, s, structure.signature, functions, relations, constants
    )


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ClassReport:
    operation: str
    magma_ops: dict[str, bool]
    is_associative: bool
    identity: int | None
    is_monoid: bool
    is_group: bool
    range_R: tuple[int, ...]
    range_rule: str  # "non-units" when an identity exists, else "all"

    @property
    def kind(self) -> str:
        if self.is_group:
            return "group"
        if self.is_monoid:
            return "monoid"
        if self.is_associative:
            return "semigroup"
        if self.identity is not None:
            return "magma with identity"
        return "magma"

    def as_dict(self) -> dict:
        return {
            "operation": self.operation,
            "kind": self.kind,
            "is_associative": self.is_associative,
            "identity": self.identity,
            "is_monoid": self.is_monoid,
            "is_group": self.is_group,
            "range_R": list(self.range_R),
            "range_rule": self.range_rule,
            "magma_ops": dict(self.magma_ops),
        }


def find_identity(table: np.ndarray) -> int | None:
    s = table.shape[0]
    idx = np.arange(s)
    for e in range(s):
        if np.array_equal(table[e], idx) and np.array_equal(table[:, e], idx):
            return e
    return None


def nonunit_range(table: np.ndarray, identity: int | None) -> tuple[int, ...]:
    """``{a*b : a, b != e}`` with an identity, else ``M*M``."""
    if identity is None:
        return tuple(int(v) for v in np.unique(table))
    keep = np.arange(table.shape[0]) != identity
    sub = table[np.ix_(keep, keep)]
    return tuple(int(v) for v in np.unique(sub))


def classify(structure: FiniteStructure) -> ClassReport:
    op = structure.operation
    if op is None:
        raise StructureError(f"{structure.name}: no binary function symbol to classify")
    t = structure.table(op)
    s = structure.size
    a, b, c = np.meshgrid(np.arange(s), np.arange(s), np.arange(s), indexing="ij")
    assoc = bool(np.all(t[t[a, b], c] == t[a, t[b, c]]))
    e = find_identity(t)
    is_monoid = assoc and e is not None
    is_group = False
    if is_monoid:
        has_inv = (t == e) & (t.T == e)
        is_group = bool(np.all(has_inv.any(axis=1)))
    return ClassReport(
        operation=op,
        magma_ops={name: True for name in structure.binary_functions},
        is_associative=assoc,
        identity=e,
        is_monoid=is_monoid,
        is_group=is_group,
        range_R=nonunit_range(t, e),
        range_rule="non-units" if e is not None else "all",
    )


# ---------------------------------------------------------------------------
# families


def _check_params(size: int, cap: int, *params: int):
    if any(p < 1 for p in params):
        raise StructureError("family parameters must be >= 1")
    if size > cap:
        raise StructureError(f"family member of size {size} exceeds size cap {cap}")


def cyclic(n: int, *, cap: int = DEFAULT_FAMILY_SIZE_CAP) -> FiniteStructure:
    _check_params(n, cap, n)
    x = np.arange(n)
    return make_structure(f"Z{n}", n, {"mul": (x[:, None] + x[None, :]) % n})


def direct_product(a: int, b: int, *, cap: int = DEFAULT_FAMILY_SIZE_CAP) -> FiniteStructure:
    """Z_a x Z_b; the pair (x, y) is element ``x*b + y``."""
    _check_params(a * b, cap, a, b)
    xs, ys = np.divmod(np.arange(a * b), b)
    table = ((xs[:, None] + xs[None, :]) % a) * b + (ys[:, None] + ys[None, :]) % b
    return make_structure(f"Z{a}xZ{b}", a * b, {"mul": table})


def symmetric(n: int, *, cap: int = DEFAULT_FAMILY_SIZE_CAP) -> FiniteStructure:
    """S_n as a composition table; permutations in lexicographic order, so
    element 0 is the identity.  ``(p*q)(x) = p(q(x))``."""
    import math

    _check_params(math.factorial(n), cap, n)
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[x]] for x in range(n))] for q in perms] for p in perms]
    return make_structure(f"S{n}", len(perms), {"mul": table})


def flat_monoid(k: int, *, cap: int = DEFAULT_FAMILY_SIZE_CAP) -> FiniteStructure:
    """Identity 0 and ``k`` non-units whose pairwise products are all 0."""
    _check_params(k + 1, cap, k)
    table = np.zeros((k + 1, k + 1), dtype=np.int64)
    table[0, :] = np.arange(k + 1)
    table[:, 0] = np.arange(k + 1)
    return make_structure(f"flat_monoid_{k}", k + 1, {"mul": table})


def finite_range_monoid(k: int, r: int, *, cap: int = DEFAULT_FAMILY_SIZE_CAP) -> FiniteStructure:
    """Identity 0, non-units ``1..k``; for non-units ``i*j = c_{(i+j) mod r}``
    with ``c_t = t`` and residues taken in ``1..r``."""
    _check_params(k + 1, cap, k, r)
    if r > k:
        raise StructureError(f"range size r={r} exceeds number of non-units k={k}")
    idx = np.arange(k + 1)
    table = ((idx[:, None] + idx[None, :] - 1) % r) + 1
    table[0, :] = idx
    table[:, 0] = idx
    return make_structure(f"finite_range_{k}_{r}", k + 1, {"mul": table})


FAMILIES = {
    "cyclic": (cyclic, ("n",)),
    "direct-product": (direct_product, ("a", "b")),
    "symmetric": (symmetric, ("n",)),
    "flat-monoid": (flat_monoid, ("k",)),
    "finite-range": (finite_range_monoid, ("k", "r")),
}


def gen_family(kind: str, *params: int, cap: int = DEFAULT_FAMILY_SIZE_CAP) -> FiniteStructure:
    kind = kind.replace("_", "-")
    if kind == "finite-range-monoid":
        kind = "finite-range"
    if kind not in FAMILIES:
        raise StructureError(f"unknown family {kind!r}; choose from {sorted(FAMILIES)}")
    fn, names = FAMILIES[kind]
    if len(params) != len(names):
        raise StructureError(f"family {kind} takes parameters {names}")
    return fn(*params, cap=cap)
