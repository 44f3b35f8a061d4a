"""Sparse vs dense multiplication/marginalization benchmark.

Random table pairs are drawn so that the dense product stays below a cell
cap and its sparsity falls in a requested band.  Both implementations run
on identical inputs, their results are cross-checked, and one CSV row per
(operation, implementation) is emitted.  Memory is reported with the
analytical byte model (8 bytes per dense cell; 4 bytes per level plus 8
per value for a sparse cell), not allocator introspection.
"""

from __future__ import annotations

import csv
import math
import statistics
import time
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import IO, Iterable, Sequence

import numpy as np

from .dense import dense_marg, dense_mult
from .domain import Domain
from .errors import SparseJTError
from .table import (LEVEL_DTYPE, SparseTable, equiv, from_dense, marg, mult,
                    product_size, to_dense)

DEFAULT_BANDS = ((0.0, 0.0), (0.01, 0.75), (0.75, 0.99))
CSV_HEADER = ["op", "impl", "dense_product_cells", "achieved_sparsity",
              "elapsed_seconds", "result_bytes"]
MODEL_HEADER = ["k", "sparsity", "dense_cells", "dense_bytes", "sparse_cells", "sparse_bytes"]


class BenchValidationError(SparseJTError, RuntimeError):
    """Sparse and dense results disagree."""


def dense_bytes(x: int) -> int:
    return 8 * x


def sparse_bytes(y, k: int):
    return y * (4 * k + 8)


@dataclass
class BenchConfig:
    max_product_cells: int = 10**6
    sparsity_bands: Sequence[tuple[float, float]] = field(default_factory=lambda: list(DEFAULT_BANDS))
    reps: int = 3
    seed: int = 0
    min_vars: int = 2
    max_vars: int = 8
    min_states: int = 2
    max_states: int = 5

    def __post_init__(self):
        if self.max_product_cells < 1:
            raise ValueError("max_product_cells must be at least 1")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        for lo, hi in self.sparsity_bands:
            if not (0.0 <= lo <= hi < 1.0):
                raise ValueError(f"invalid sparsity band ({lo}, {hi}]")


@dataclass
class BenchRecord:
    op: str
    impl: str
    dense_product_cells: int
    achieved_sparsity: float
    elapsed_seconds: float
    result_bytes: int

    def row(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]


def in_band(s: float, band: tuple[float, float]) -> bool:
    """``[lo, lo]`` when the band is a point, otherwise ``(lo, hi]``."""
    lo, hi = band
    if lo == hi:
        return s == lo
    return lo < s <= hi


def _random_domains(rng: np.random.Generator, cap: int, cfg: BenchConfig):
    n = int(rng.integers(cfg.min_vars, cfg.max_vars + 1))
    sizes = [int(x) for x in rng.integers(cfg.min_states, cfg.max_states + 1, size=n)]
    while math.prod(sizes) > cap:
        if len(sizes) > 2:
            sizes.pop()
        else:
            i = int(np.argmax(sizes))
            if sizes[i] == 1:
                break
            sizes[i] -= 1
    labels = [f"V{i}" for i in range(len(sizes))]
    full = Domain(labels, [[f"s{j + 1}" for j in range(m)] for m in sizes])
    n_shared = int(rng.integers(1, len(labels) + 1))
    shared = list(labels[:n_shared])
    rest = labels[n_shared:]
    to_a = rng.random(len(rest)) < 0.5
    a_labels = shared + [l for l, t in zip(rest, to_a) if t]
    b_labels = [l for l, t in zip(rest, to_a) if not t] + shared
    return full.subdomain(a_labels), full.subdomain(b_labels)


def random_table(rng: np.random.Generator, domain: Domain, density: float) -> SparseTable:
    """Table with ``max(1, round(density * cells))`` random cells, values in (0, 1]."""
    n = domain.statespace_size()
    k = min(n, max(1, int(round(density * n))))
    flat = np.sort(rng.choice(n, size=k, replace=False))
    cells = np.vstack(np.unravel_index(flat, domain.sizes, order="F")) + 1 if len(domain) \
        else np.zeros((0, k))
    vals = 1.0 - rng.random(k)
    return SparseTable(domain, cells.astype(LEVEL_DTYPE), vals, validate=False)


def gen_table_pair(
    seed,
    band: tuple[float, float] = (0.0, 0.0),
    max_product_cells: int = 10**6,
    config: BenchConfig | None = None,
    max_tries: int = 500,
) -> tuple[SparseTable, SparseTable]:
    """Two tables sharing at least one variable whose product sparsity lies in ``band``."""
    cfg = config or BenchConfig(max_product_cells=max_product_cells)
    rng = np.random.default_rng(seed)
    lo, hi = band
    for _ in range(max_tries):
        da, db = _random_domains(rng, max_product_cells, cfg)
        target = lo if lo == hi else rng.uniform(lo, hi)
        density = math.sqrt(1.0 - target)
        a = random_table(rng, da, density)
        b = random_table(rng, db, density)
        cells = da.union(db).statespace_size()
        if in_band(1.0 - product_size(a, b) / cells, band):
            return a, b
    raise ValueError(f"could not generate a table pair in sparsity band {band}")


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def _check(op: str, sparse: SparseTable, dense, atol: float = 1e-12) -> None:
    if not equiv(sparse, from_dense(dense), atol=atol):
        raise BenchValidationError(
            f"{op}: sparse result ({sparse.ncells} cells over {list(sparse.labels)}) "
            f"differs from the dense result ({np.count_nonzero(dense.values)} nonzero cells)"
        )


def run_bench(config: BenchConfig) -> list[BenchRecord]:
    records = []
    seeds = np.random.SeedSequence(config.seed)
    for band in config.sparsity_bands:
        for child in seeds.spawn(config.reps):
            rng = np.random.default_rng(child)
            a, b = gen_table_pair(rng, band, config.max_product_cells, config)
            da, db = to_dense(a), to_dense(b)

            sp, t_sparse = _timed(mult, a, b)
            dp, t_dense = _timed(dense_mult, da, db)
            _check("mult", sp, dp)
            cells = sp.domain.statespace_size()
            achieved = 1.0 - sp.ncells / cells
            records.append(BenchRecord("mult", "sparse", cells, achieved, t_sparse,
                                       sparse_bytes(sp.ncells, len(sp.domain))))
            records.append(BenchRecord("mult", "dense", cells, achieved, t_dense,
                                       dense_bytes(cells)))

            n_drop = int(rng.integers(1, len(sp.labels))) if len(sp.labels) > 1 else 0
            drop = list(rng.choice(sp.labels, size=n_drop, replace=False))
            sm, t_sparse = _timed(marg, sp, drop)
            dm, t_dense = _timed(dense_marg, dp, drop)
            _check("marg", sm, dm)
            records.append(BenchRecord("marg", "sparse", cells, achieved, t_sparse,
                                       sparse_bytes(sm.ncells, len(sm.domain))))
            records.append(BenchRecord("marg", "dense", cells, achieved, t_dense,
                                       dense_bytes(sm.domain.statespace_size())))
    return records


def write_records(records: Iterable[BenchRecord], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r.op, r.impl, r.dense_product_cells, repr(r.achieved_sparsity),
                    repr(r.elapsed_seconds), r.result_bytes])


def summarize(records: Sequence[BenchRecord]) -> list[dict]:
    """Median time and bytes per (op, impl)."""
    groups: dict[tuple[str, str], list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.op, r.impl), []).append(r)
    return [
        {
            "op": op, "impl": impl, "n": len(rs),
            "median_seconds": statistics.median(r.elapsed_seconds for r in rs),
            "median_bytes": statistics.median(r.result_bytes for r in rs),
        }
        for (op, impl), rs in sorted(groups.items())
    ]


def memory_model_rows(
    dense_sizes: Iterable[int] = tuple(10**e for e in range(2, 10)),
    ks: Iterable[int] = (4, 6, 8),
    sparsities: Iterable[float] = (0.5, 0.75, 0.9, 0.99),
) -> list[dict]:
    """Bytes of dense vs sparse storage for ``y = (1 - sparsity) * x`` stored cells."""
    rows = []
    for k in ks:
        for s in sparsities:
            keep = 1 - Fraction(str(s))
            for x in dense_sizes:
                y = keep * x
                rows.append({
                    "k": k, "sparsity": s, "dense_cells": x,
                    "dense_bytes": dense_bytes(x),
                    "sparse_cells": int(y) if y.denominator == 1 else float(y),
                    "sparse_bytes": int(sparse_bytes(y, k)) if y.denominator == 1
                    else float(sparse_bytes(y, k)),
                })
    return rows


def write_model(rows: Iterable[dict], fh: IO[str]) -> None:
    w = csv.DictWriter(fh, fieldnames=MODEL_HEADER, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
