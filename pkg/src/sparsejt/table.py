"""Sparse tables: a cell matrix of level tuples plus a value vector.

A :class:`SparseTable` over labels ``V`` stores only its nonzero cells.
``cells`` has one row per label and one column per stored cell, holding
1-based levels; ``vals[j]`` is the value of column ``j``.  Column order
carries no meaning, so table comparison goes through :func:`equiv`.

Multiplication is a hash join on the shared labels (a separator lookup
maps each separator key to the columns carrying it), marginalization
streams the columns into a key -> (witness column, running sum) lookup.
Keys are mixed-radix integers over the key labels' state counts; when
that radix overflows int64 the distinct key columns are ranked instead.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dense import DenseTable, check_dense_size
from .domain import MAX_INDEXABLE, Domain
from .errors import CapacityError, DomainError, NormalizationError

LEVEL_DTYPE = np.int32


class SparseTable:
    """Immutable sparse table ``(cells, vals)`` over ``domain``."""

    __slots__ = ("domain", "cells", "vals")

    def __init__(self, domain: Domain, cells, vals, *, validate: bool = True):
        cells = np.asarray(cells, dtype=LEVEL_DTYPE)
        vals = np.asarray(vals, dtype=np.float64).ravel()
        if cells.ndim == 1 and len(domain) == 0:
            cells = cells.reshape(0, vals.size)
        if cells.ndim != 2 or cells.shape[0] != len(domain):
            raise DomainError(
                f"cell matrix must have {len(domain)} rows, got shape {cells.shape}"
            )
        if cells.shape[1] != vals.size:
            raise DomainError("number of cell columns differs from number of values")
        if validate:
            _validate(domain, cells, vals)
        cells.setflags(write=False)
        vals.setflags(write=False)
        self.domain = domain
        self.cells = cells
        self.vals = vals

    @classmethod
    def _build(cls, domain: Domain, cells: np.ndarray, vals: np.ndarray) -> "SparseTable":
        # Trusted path for operation results: unique columns guaranteed by
        # construction, only values that underflowed to 0.0 are removed.
        keep = vals != 0.0
        if not keep.all():
            cells, vals = cells[:, keep], vals[keep]
        return cls(domain, np.ascontiguousarray(cells), vals, validate=False)

    @classmethod
    def from_items(
        cls, domain: Domain, items: Mapping[Sequence[str], float] | Iterable
    ) -> "SparseTable":
        """Build from ``{(state, state, ...): value}`` with states in label order.

        Zero values are skipped.
        """
        if isinstance(items, Mapping):
            items = items.items()
        cols, vals = [], []
        for cell, v in items:
            if v == 0:
                continue
            if len(cell) != len(domain):
                raise DomainError(f"cell {cell!r} does not match {domain}")
            cols.append([domain.level(l, s) for l, s in zip(domain.labels, cell)])
            vals.append(v)
        cells = np.array(cols, dtype=LEVEL_DTYPE).reshape(len(cols), len(domain)).T
        return cls(domain, cells, vals)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.domain.labels

    @property
    def ncells(self) -> int:
        return self.vals.size

    def __len__(self) -> int:
        return self.vals.size

    def rows(self, labels: Iterable[str]) -> np.ndarray:
        return self.cells[[self.domain.index(l) for l in labels]]

    # Operator sugar mirroring the module-level algebra.
    def __mul__(self, other):
        if isinstance(other, UnityTable):
            return mult_unity(self, other)
        if isinstance(other, SparseTable):
            return mult(self, other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, SparseTable):
            return div(self, other)
        return NotImplemented

    def marg(self, drop: Iterable[str]) -> "SparseTable":
        return marg(self, drop)

    def slice(self, assignment: Mapping[str, str], drop_sliced: bool = False) -> "SparseTable":
        return slice_table(self, assignment, drop_sliced)

    def sum(self) -> float:
        return float(self.vals.sum())

    def __repr__(self) -> str:
        return f"SparseTable(labels={list(self.labels)}, ncells={self.ncells})"

    def __str__(self) -> str:
        header = list(self.labels) + ["val"]
        lines = [" ".join(header)]
        for j in range(self.ncells):
            names = [self.domain.state(l, int(self.cells[i, j]))
                     for i, l in enumerate(self.labels)]
            lines.append(" ".join(names + [f"{self.vals[j]:.6g}"]))
        return "\n".join(lines)


class UnityTable:
    """The all-ones table over ``domain``; nothing but the domain is stored."""

    __slots__ = ("domain",)

    def __init__(self, domain: Domain):
        self.domain = domain

    @property
    def labels(self) -> tuple[str, ...]:
        return self.domain.labels

    def __repr__(self) -> str:
        return f"UnityTable(labels={list(self.labels)})"


def _validate(domain: Domain, cells: np.ndarray, vals: np.ndarray) -> None:
    if np.any(vals == 0.0):
        raise DomainError("sparse tables may not store zero values")
    if not np.all(np.isfinite(vals)):
        raise DomainError("sparse table values must be finite")
    sizes = np.array(domain.sizes, dtype=np.int64).reshape(-1, 1)
    if cells.size and (np.any(cells < 1) or np.any(cells > sizes)):
        raise DomainError("cell level outside the variable's level set")
    keys = _keys(cells, domain.sizes)
    if np.unique(keys).size != keys.size:
        raise DomainError("duplicate cells in sparse table")


# ---------------------------------------------------------------------------
# key encoding

def _strides(sizes: Sequence[int]) -> np.ndarray:
    strides = np.ones(len(sizes), dtype=np.int64)
    for i in range(1, len(sizes)):
        strides[i] = strides[i - 1] * sizes[i - 1]
    return strides


def _shared_keys(sub_a: np.ndarray, sub_b: np.ndarray, sizes: Sequence[int]):
    """Integer keys for the columns of two level matrices over the same labels."""
    if math.prod(sizes) <= MAX_INDEXABLE:
        strides = _strides(sizes).reshape(-1, 1)
        ka = ((sub_a.astype(np.int64) - 1) * strides).sum(axis=0, dtype=np.int64)
        kb = ((sub_b.astype(np.int64) - 1) * strides).sum(axis=0, dtype=np.int64)
        return ka, kb
    both = np.hstack([sub_a, sub_b])
    _, inv = np.unique(both, axis=1, return_inverse=True)
    inv = inv.ravel().astype(np.int64)
    return inv[: sub_a.shape[1]], inv[sub_a.shape[1]:]


def _keys(sub: np.ndarray, sizes: Sequence[int]) -> np.ndarray:
    return _shared_keys(sub, sub[:, :0], sizes)[0]


class SeparatorIndex:
    """Lookup from a key over ``labels`` to the columns of ``table`` carrying it.

    Internally the columns are grouped by sorting their integer keys;
    :attr:`lookup` materializes the ``{level tuple: [column, ...]}`` map.
    """

    def __init__(self, table: SparseTable, labels: Sequence[str], keys=None):
        self.labels = tuple(labels)
        self._sub = table.rows(self.labels)
        if keys is None:
            keys = _keys(self._sub, [table.domain.size(l) for l in self.labels])
        self.order = np.argsort(keys, kind="stable")
        self.keys, self.starts, self.counts = np.unique(
            keys[self.order], return_index=True, return_counts=True
        )

    def __len__(self) -> int:
        return self.keys.size

    def columns(self, i: int) -> np.ndarray:
        return self.order[self.starts[i]: self.starts[i] + self.counts[i]]

    @property
    def lookup(self) -> dict[tuple[int, ...], list[int]]:
        out = {}
        for i in range(len(self)):
            cols = self.columns(i)
            out[tuple(int(x) for x in self._sub[:, cols[0]])] = [int(c) for c in cols]
        return out


class MarginalIndex:
    """Lookup from a key over the kept ``labels`` to ``(witness column, summed value)``."""

    def __init__(self, table: SparseTable, labels: Sequence[str]):
        self.labels = tuple(labels)
        self._sub = table.rows(self.labels)
        keys = _keys(self._sub, [table.domain.size(l) for l in self.labels])
        self.keys, self.witness, inverse = np.unique(
            keys, return_index=True, return_inverse=True
        )
        self.sums = np.bincount(inverse.ravel(), weights=table.vals, minlength=self.keys.size)

    def __len__(self) -> int:
        return self.keys.size

    @property
    def lookup(self) -> dict[tuple[int, ...], tuple[int, float]]:
        return {
            tuple(int(x) for x in self._sub[:, j]): (int(j), float(v))
            for j, v in zip(self.witness, self.sums)
        }


# ---------------------------------------------------------------------------
# conversions

def from_dense(t: DenseTable) -> SparseTable:
    nz = np.flatnonzero(t.values)
    if len(t.domain):
        cells = np.vstack(np.unravel_index(nz, t.domain.sizes, order="F")) + 1
    else:
        cells = np.zeros((0, nz.size))
    return SparseTable(t.domain, cells.astype(LEVEL_DTYPE), t.values[nz], validate=False)


def to_dense(s: SparseTable) -> DenseTable:
    n = check_dense_size(s.domain)
    values = np.zeros(n)
    values[_keys(s.cells, s.domain.sizes)] = s.vals
    return DenseTable(s.domain, values)


# ---------------------------------------------------------------------------
# algebra

def product_size(a: SparseTable, b: SparseTable) -> int:
    """Number of columns of ``mult(a, b)`` before any underflow removal."""
    sep = [l for l in a.labels if l in b.domain]
    ka, kb = _shared_keys(a.rows(sep), b.rows(sep), [a.domain.size(l) for l in sep])
    ma, mb = SeparatorIndex(a, sep, ka), SeparatorIndex(b, sep, kb)
    _, ia, ib = np.intersect1d(ma.keys, mb.keys, assume_unique=True, return_indices=True)
    return int((ma.counts[ia] * mb.counts[ib]).sum())


def mult(a: SparseTable, b: SparseTable) -> SparseTable:
    """Product over ``a.labels`` followed by the new labels of ``b``."""
    dom = a.domain.union(b.domain)
    sep = [l for l in a.labels if l in b.domain]
    new = [l for l in b.labels if l not in a.domain]
    ka, kb = _shared_keys(a.rows(sep), b.rows(sep), [a.domain.size(l) for l in sep])
    ma, mb = SeparatorIndex(a, sep, ka), SeparatorIndex(b, sep, kb)
    _, ia, ib = np.intersect1d(ma.keys, mb.keys, assume_unique=True, return_indices=True)
    ca, cb = ma.counts[ia], mb.counts[ib]
    per_key = ca * cb
    n = int(per_key.sum())
    # Enumerate, per mutual key, every (column of a, column of b) pair.
    block = np.repeat(np.arange(ia.size), per_key)
    offset = np.arange(n, dtype=np.int64) - np.repeat(np.cumsum(per_key) - per_key, per_key)
    ja = ma.order[ma.starts[ia][block] + offset // cb[block]]
    jb = mb.order[mb.starts[ib][block] + offset % cb[block]]
    cells = np.vstack([a.cells[:, ja], b.rows(new)[:, jb]])
    return SparseTable._build(dom, cells, a.vals[ja] * b.vals[jb])


def div(a: SparseTable, b: SparseTable) -> SparseTable:
    """Quotient ``a / b`` on the support of ``a``; requires ``b.labels`` within ``a.labels``.

    Cells of ``a`` whose key is absent from ``b`` get ``0/0 := 0`` and vanish.
    """
    a.domain.check_compatible(b.domain)
    missing = [l for l in b.labels if l not in a.domain]
    if missing:
        raise DomainError(f"divisor labels {missing} are not labels of the dividend")
    sep = list(b.labels)
    ka, kb = _shared_keys(a.rows(sep), b.cells, b.domain.sizes)
    order = np.argsort(kb)
    sorted_kb = kb[order]
    pos = np.searchsorted(sorted_kb, ka)
    found = np.zeros(ka.size, dtype=bool)
    inside = pos < sorted_kb.size
    found[inside] = sorted_kb[pos[inside]] == ka[inside]
    vals = a.vals[found] / b.vals[order[pos[found]]]
    return SparseTable._build(a.domain, a.cells[:, found], vals)


def marg(s: SparseTable, drop: Iterable[str]) -> SparseTable:
    """Sum out the labels in ``drop``.

    Dropping every label yields a zero-label table holding the total.
    """
    drop = set(drop)
    for l in drop:
        s.domain.index(l)
    if not drop:
        return s
    kept = [l for l in s.labels if l not in drop]
    h = MarginalIndex(s, kept)
    cells = s.rows(kept)[:, h.witness]
    return SparseTable._build(s.domain.subdomain(kept), cells, h.sums)


def slice_table(
    s: SparseTable, assignment: Mapping[str, str], drop_sliced: bool = False
) -> SparseTable:
    """Keep the columns consistent with ``assignment`` (label -> state name)."""
    keep = np.ones(s.ncells, dtype=bool)
    for lab, st in assignment.items():
        keep &= s.cells[s.domain.index(lab)] == s.domain.level(lab, st)
    cells = s.cells[:, keep]
    dom = s.domain
    if drop_sliced and assignment:
        dom = s.domain.without(assignment)
        cells = cells[[s.domain.index(l) for l in dom.labels]]
    return SparseTable(dom, cells, s.vals[keep], validate=False)


def _unity_expand(s: SparseTable, u: UnityTable):
    s.domain.check_compatible(u.domain)
    new = [l for l in u.labels if l not in s.domain]
    sizes = [u.domain.size(l) for l in new]
    n_new = math.prod(sizes)
    if n_new * s.ncells > MAX_INDEXABLE:
        raise CapacityError("unity product too large")
    levels = np.vstack(np.unravel_index(np.arange(n_new), sizes, order="F")) + 1 if new \
        else np.zeros((0, 1), dtype=np.int64)
    cells = np.vstack([
        np.repeat(s.cells, n_new, axis=1),
        np.tile(levels.astype(LEVEL_DTYPE), s.ncells),
    ])
    return s.domain.union(u.domain), cells, n_new


def mult_unity(s: SparseTable, u: UnityTable) -> SparseTable:
    """Multiply by the all-ones table of ``u``: columns are replicated, no arithmetic."""
    dom, cells, n_new = _unity_expand(s, u)
    return SparseTable._build(dom, cells, np.repeat(s.vals, n_new))


def div_unity(u: UnityTable, s: SparseTable) -> SparseTable:
    """``unity / s`` on the support of ``s``: replicated reciprocals."""
    dom, cells, n_new = _unity_expand(s, u)
    return SparseTable._build(dom, cells, np.repeat(1.0 / s.vals, n_new))


def normalize(s: SparseTable) -> SparseTable:
    total = s.vals.sum()
    if s.ncells == 0 or total == 0:
        raise NormalizationError("cannot normalize a table with zero total mass")
    return SparseTable._build(s.domain, s.cells, s.vals / total)


def as_cpt(s: SparseTable, given: Iterable[str]) -> SparseTable:
    """Divide by the marginal over ``given`` so each ``given`` slice sums to one."""
    given = set(given)
    for l in given:
        s.domain.index(l)
    if not given:
        return normalize(s)
    return div(s, marg(s, set(s.labels) - given))


# ---------------------------------------------------------------------------
# inspection

def table_sum(s: SparseTable) -> float:
    return float(s.vals.sum())


def _levels_of(s: SparseTable, cell) -> np.ndarray:
    if isinstance(cell, Mapping):
        states = [cell[l] for l in s.labels]
    else:
        states = list(cell)
    if len(states) != len(s.labels):
        raise DomainError(f"cell {cell!r} does not match labels {list(s.labels)}")
    return np.array([s.domain.level(l, st) for l, st in zip(s.labels, states)])


def get_val(s: SparseTable, cell) -> float:
    """Value of a named cell (mapping or state tuple in label order); 0 if absent."""
    levels = _levels_of(s, cell).reshape(-1, 1)
    hit = np.flatnonzero(np.all(s.cells == levels, axis=0))
    return float(s.vals[hit[0]]) if hit.size else 0.0


def get_cell_name(s: SparseTable, column: int) -> dict[str, str]:
    """Named cell stored in (0-based) ``column``."""
    if not 0 <= column < s.ncells:
        raise IndexError(f"column {column} out of range for {s.ncells} cells")
    return {l: s.domain.state(l, int(s.cells[i, column])) for i, l in enumerate(s.labels)}


def _nonempty(s: SparseTable) -> None:
    if s.ncells == 0:
        raise ValueError("table has no stored cells")


def table_max(s: SparseTable) -> float:
    _nonempty(s)
    return float(s.vals.max())


def table_min(s: SparseTable) -> float:
    _nonempty(s)
    return float(s.vals.min())


def which_max_cell(s: SparseTable) -> int:
    _nonempty(s)
    return int(np.argmax(s.vals))


def which_min_cell(s: SparseTable) -> int:
    _nonempty(s)
    return int(np.argmin(s.vals))


def which_max_idx(s: SparseTable) -> dict[str, str]:
    return get_cell_name(s, which_max_cell(s))


def which_min_idx(s: SparseTable) -> dict[str, str]:
    return get_cell_name(s, which_min_cell(s))


def equiv(a: SparseTable, b: SparseTable, atol: float = 0.0) -> bool:
    """Same variables, same support and values up to column (and row) permutation."""
    if not a.domain.same_variables(b.domain) or a.ncells != b.ncells:
        return False
    ka, kb = _shared_keys(a.cells, b.rows(a.labels), a.domain.sizes)
    oa, ob = np.argsort(ka), np.argsort(kb)
    if not np.array_equal(ka[oa], kb[ob]):
        return False
    return bool(np.all(np.abs(a.vals[oa] - b.vals[ob]) <= atol))


def sparsity(s: SparseTable) -> float:
    return 1.0 - s.ncells / s.domain.statespace_size()


def mem_estimate(domain: Domain, n_nonzero: int | float, kind: str = "sparse") -> float:
    """Bytes needed by a dense array (8 per cell) or a sparse table (4 per level + 8 per value)."""
    if kind == "dense":
        n = domain.statespace_size()
        if n > 2**63 - 1:
            raise CapacityError(f"dense state space of {n} cells overflows")
        return 8 * n
    if kind == "sparse":
        return n_nonzero * (4 * len(domain) + 8)
    raise ValueError(f"unknown kind {kind!r}; use 'dense' or 'sparse'")
