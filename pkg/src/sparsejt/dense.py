"""Dense tables and their brute-force algebra.

The dense operations here are the reference semantics for the sparse
algebra and the baseline of the benchmark.  Values are stored flat with
the first listed variable varying fastest (Fortran order).
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from .domain import Domain
from .errors import CapacityError, DomainError

# Refuse to allocate dense arrays beyond this many cells (8 GB of doubles).
MAX_DENSE_CELLS = 2**30


class DenseTable:
    __slots__ = ("domain", "values")

    def __init__(self, domain: Domain, values):
        values = np.asarray(values, dtype=np.float64).ravel()
        n = domain.statespace_size()
        if values.size != n:
            raise DomainError(f"expected {n} values for {domain}, got {values.size}")
        values.setflags(write=False)
        self.domain = domain
        self.values = values

    @classmethod
    def from_array(cls, domain: Domain, array) -> "DenseTable":
        array = np.asarray(array, dtype=np.float64)
        if array.shape != domain.sizes:
            raise DomainError(f"array shape {array.shape} does not match {domain.sizes}")
        return cls(domain, array.ravel(order="F"))

    @classmethod
    def zeros(cls, domain: Domain) -> "DenseTable":
        return cls(domain, np.zeros(check_dense_size(domain)))

    @property
    def array(self) -> np.ndarray:
        """N-dimensional view, axis ``i`` indexing ``domain.labels[i]``."""
        return self.values.reshape(self.domain.sizes, order="F")

    def value(self, cell: Mapping[str, str]) -> float:
        idx = tuple(self.domain.level(l, cell[l]) - 1 for l in self.domain.labels)
        return float(self.array[idx])

    def sum(self) -> float:
        return float(self.values.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTable):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"DenseTable({list(self.domain.labels)}, {self.values.tolist()})"


def check_dense_size(domain: Domain, labels: Iterable[str] | None = None) -> int:
    n = domain.statespace_size(labels)
    if n > MAX_DENSE_CELLS:
        raise CapacityError(f"dense table with {n} cells exceeds the allocation limit")
    return n


def aligned(t: DenseTable, domain: Domain) -> np.ndarray:
    """Array of ``t`` broadcastable against ``domain`` (singleton axes for missing labels)."""
    domain.check_compatible(t.domain)
    order = sorted(range(len(t.domain)), key=lambda i: domain.index(t.domain.labels[i]))
    arr = np.transpose(t.array, order)
    shape = [domain.size(l) if l in t.domain else 1 for l in domain.labels]
    return arr.reshape(shape)


def dense_mult(a: DenseTable, b: DenseTable) -> DenseTable:
    dom = a.domain.union(b.domain)
    check_dense_size(dom)
    return DenseTable.from_array(dom, aligned(a, dom) * aligned(b, dom))


def dense_div(a: DenseTable, b: DenseTable) -> DenseTable:
    """Cell-wise quotient with ``x/0 := 0``."""
    dom = a.domain.union(b.domain)
    check_dense_size(dom)
    num = np.broadcast_to(aligned(a, dom), dom.sizes)
    den = np.broadcast_to(aligned(b, dom), dom.sizes)
    out = np.zeros(dom.sizes)
    np.divide(num, den, out=out, where=den != 0)
    return DenseTable.from_array(dom, out)


def dense_marg(t: DenseTable, drop: Iterable[str]) -> DenseTable:
    drop = set(drop)
    for l in drop:
        t.domain.index(l)
    axes = tuple(i for i, l in enumerate(t.domain.labels) if l in drop)
    kept = t.domain.without(drop)
    return DenseTable.from_array(kept, t.array.sum(axis=axes))


def dense_slice(t: DenseTable, assignment: Mapping[str, str], drop_sliced=False) -> DenseTable:
    """Zero every cell inconsistent with ``assignment``; optionally drop the sliced axes."""
    idx = [slice(None)] * len(t.domain)
    for lab, st in assignment.items():
        idx[t.domain.index(lab)] = t.domain.level(lab, st) - 1
    if drop_sliced:
        return DenseTable.from_array(t.domain.without(assignment), t.array[tuple(idx)])
    mask = np.zeros(t.domain.sizes, dtype=bool)
    mask[tuple(idx)] = True
    return DenseTable.from_array(t.domain, np.where(mask, t.array, 0.0))


def dense_normalize(t: DenseTable) -> DenseTable:
    return DenseTable(t.domain, t.values / t.values.sum())
