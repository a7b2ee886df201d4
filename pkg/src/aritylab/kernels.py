"""Hot loops over tuple spaces.

Two interchangeable implementations of every kernel: numba ``@njit`` and pure
numpy.  Set ``ARITYLAB_DISABLE_NUMBA=1`` (or run without numba installed) to
use the numpy path.  Both return identical arrays; tests check this.

Ranks are big-endian: tuple ``(a_1..a_m)`` has rank ``sum a_i * s**(m-i)``.
"""

from __future__ import annotations

import os

import numpy as np

DISABLE_ENV = "ARITYLAB_DISABLE_NUMBA"

try:
    from numba import njit, types
    from numba.typed import Dict

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def _numba_wanted() -> bool:
    return HAVE_NUMBA and os.environ.get(DISABLE_ENV, "").lower() not in ("1", "true", "yes")


# ---------------------------------------------------------------------------
# shared numpy helpers


def tuple_digits(s: int, m: int, dtype=np.int64) -> np.ndarray:
    """All m-tuples over ``range(s)`` in rank order, shape ``(s**m, m)``."""
    n = s**m
    ranks = np.arange(n, dtype=np.int64)
    out = np.empty((n, m), dtype=dtype)
    for i in range(m):
        out[:, i] = (ranks // s ** (m - 1 - i)) % s
    return out


def ranks_of(digits: np.ndarray, s: int) -> np.ndarray:
    r = np.zeros(digits.shape[0], dtype=np.int64)
    for i in range(digits.shape[1]):
        r = r * s + digits[:, i]
    return r


def image_ranks(perm: np.ndarray, s: int, m: int) -> np.ndarray:
    """Rank of ``g(t)`` for every rank ``t`` under coordinatewise action."""
    perm = np.asarray(perm, dtype=np.int64)
    img = np.zeros(s**m, dtype=np.int64)
    ranks = np.arange(s**m, dtype=np.int64)
    for i in range(m):
        img = img * s + perm[(ranks // s ** (m - 1 - i)) % s]
    return img


def equality_codes(digits: np.ndarray) -> np.ndarray:
    """Restricted-growth string of each row's equality pattern, packed base m."""
    n, m = digits.shape
    rgs = np.zeros((n, m), dtype=np.int64)
    top = np.zeros(n, dtype=np.int64)
    for i in range(1, m):
        done = np.zeros(n, dtype=bool)
        for j in range(i):
            hit = ~done & (digits[:, i] == digits[:, j])
            rgs[hit, i] = rgs[hit, j]
            done |= hit
        top[~done] += 1
        rgs[~done, i] = top[~done]
    code = np.zeros(n, dtype=np.int64)
    for i in range(m):
        code = code * max(m, 1) + rgs[:, i]
    return code


def first_occurrence_ids(keys: np.ndarray) -> tuple[np.ndarray, int]:
    """Dense ids numbered by first occurrence in array order."""
    if keys.size == 0:
        return np.zeros(0, dtype=np.int64), 0
    _, first, inv = np.unique(keys, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty(order.size, dtype=np.int64)
    remap[order] = np.arange(order.size, dtype=np.int64)
    return remap[inv.reshape(-1)], int(order.size)


# ---------------------------------------------------------------------------
# numpy backend


def orbit_labels_numpy(perms: np.ndarray, s: int, m: int) -> tuple[np.ndarray, int]:
    """Orbit ids of M^m by min-label propagation with pointer jumping."""
    n = s**m
    labels = np.arange(n, dtype=np.int64)
    if n == 0:
        return labels, 0
    maps = []
    for p in np.asarray(perms, dtype=np.int64).reshape(-1, s):
        inv = np.empty(s, dtype=np.int64)
        inv[p] = np.arange(s)
        maps.append(image_ranks(p, s, m))
        maps.append(image_ranks(inv, s, m))
    while True:
        new = labels
        for img in maps:
            new = np.minimum(new, new[img])
        while True:
            jumped = new[new]
            if np.array_equal(jumped, new):
                break
            new = jumped
        if np.array_equal(new, labels):
            break
        labels = new
    roots = labels == np.arange(n)
    ids = np.cumsum(roots) - 1
    return ids[labels], int(roots.sum())


def refine_labels_numpy(labels: np.ndarray, column: np.ndarray) -> tuple[np.ndarray, int]:
    """Partition by the pair ``(labels[r], column[r])``, ids by first occurrence."""
    width = int(column.max()) + 1 if column.size else 1
    return first_occurrence_ids(labels.astype(np.int64) * width + column.astype(np.int64))


# ---------------------------------------------------------------------------
# numba backend

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _find(parent, x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            nxt = parent[x]
            parent[x] = root
            x = nxt
        return root

    @njit(cache=True, nogil=True)
    def _orbit_labels_nb(perms, s, m):
        n = 1
        for _ in range(m):
            n *= s
        parent = np.arange(n)
        size = np.ones(n, dtype=np.int64)
        for g in range(perms.shape[0]):
            p = perms[g]
            for r in range(n):
                img = 0
                rest = r
                scale = 1
                for _ in range(m):
                    img += p[rest % s] * scale
                    rest //= s
                    scale *= s
                a = _find(parent, r)
                b = _find(parent, img)
                if a != b:
                    if size[a] < size[b]:
                        a, b = b, a
                    parent[b] = a
                    size[a] += size[b]
        ids = np.full(n, -1, dtype=np.int64)
        out = np.empty(n, dtype=np.int64)
        count = 0
        for r in range(n):
            root = _find(parent, r)
            if ids[root] < 0:
                ids[root] = count
                count += 1
            out[r] = ids[root]
        return out, count

    @njit(cache=True, nogil=True)
    def _refine_labels_nb(labels, column, n_labels):
        n = labels.shape[0]
        width = 0
        for r in range(n):
            if column[r] + 1 > width:
                width = column[r] + 1
        out = np.empty(n, dtype=np.int64)
        count = 0
        if n_labels * width <= 4 * n + 1024:
            table = np.full(n_labels * width, -1, dtype=np.int64)
            for r in range(n):
                key = labels[r] * width + column[r]
                if table[key] < 0:
                    table[key] = count
                    count += 1
                out[r] = table[key]
        else:
            seen = Dict.empty(key_type=types.int64, value_type=types.int64)
            for r in range(n):
                key = labels[r] * width + column[r]
                v = seen.get(key, -1)
                if v < 0:
                    v = count
                    seen[key] = v
                    count += 1
                out[r] = v
        return out, count

    def orbit_labels_numba(perms: np.ndarray, s: int, m: int) -> tuple[np.ndarray, int]:
        perms = np.ascontiguousarray(np.asarray(perms, dtype=np.int64).reshape(-1, s))
        out, count = _orbit_labels_nb(perms, s, m)
        return out, int(count)

    def refine_labels_numba(labels: np.ndarray, column: np.ndarray) -> tuple[np.ndarray, int]:
        labels = np.ascontiguousarray(labels, dtype=np.int64)
        column = np.ascontiguousarray(column, dtype=np.int64)
        n_labels = int(labels.max()) + 1 if labels.size else 0
        out, count = _refine_labels_nb(labels, column, n_labels)
        return out, int(count)

else:  # pragma: no cover
    orbit_labels_numba = orbit_labels_numpy
    refine_labels_numba = refine_labels_numpy


BACKENDS = {
    "numpy": (orbit_labels_numpy, refine_labels_numpy),
    "numba": (orbit_labels_numba, refine_labels_numba),
}


def backend_name() -> str:
    return "numba" if _numba_wanted() else "numpy"


def orbit_labels(perms: np.ndarray, s: int, m: int) -> tuple[np.ndarray, int]:
    return BACKENDS[backend_name()][0](perms, s, m)


def refine_labels(labels: np.ndarray, column: np.ndarray) -> tuple[np.ndarray, int]:
    return BACKENDS[backend_name()][1](labels, column)


def partition_by_columns(columns, n: int) -> tuple[np.ndarray, int]:
    """Partition ranks ``0..n-1`` by the tuple of column values; ids by first
    occurrence."""
    labels = np.zeros(n, dtype=np.int64)
    count = 1 if n else 0
    for col in columns:
        labels, count = refine_labels(labels, np.asarray(col, dtype=np.int64))
    return labels, count
