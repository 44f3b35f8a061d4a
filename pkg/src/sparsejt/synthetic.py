"""Random Bayesian networks for tests, reports and stress runs."""

from __future__ import annotations

import itertools

import numpy as np

from .dense import DenseTable
from .domain import Domain
from .inference import NetworkSpec, validate_cpt_list
from .table import SparseTable, from_dense


def random_cpt(
    rng: np.random.Generator, domain: Domain, zero_prob: float = 0.0
) -> SparseTable:
    """CPT over ``domain`` (child first) with each child column renormalized.

    Each child state is zeroed with probability ``zero_prob``; at least one
    state per parent configuration stays positive.
    """
    k = domain.sizes[0]
    n_cfg = domain.statespace_size() // k
    w = 1.0 - rng.random((k, n_cfg))
    if zero_prob > 0:
        dead = rng.random((k, n_cfg)) < zero_prob
        keep = rng.integers(0, k, n_cfg)
        dead[keep, np.arange(n_cfg)] = False
        w[dead] = 0.0
    w /= w.sum(axis=0, keepdims=True)
    return from_dense(DenseTable(domain, w.ravel(order="F")))


def random_network(
    seed,
    n_vars: int = 8,
    max_parents: int = 3,
    min_states: int = 2,
    max_states: int = 3,
    zero_prob: float = 0.0,
    window: int | None = None,
    edge_prob: float = 0.5,
) -> NetworkSpec:
    """Random DAG over ``X0..X{n-1}`` (parents drawn from earlier nodes).

    ``window`` limits parents to the preceding ``window`` nodes, which keeps
    cliques local in large networks.
    """
    rng = np.random.default_rng(seed)
    names = [f"X{i}" for i in range(n_vars)]
    sizes = rng.integers(min_states, max_states + 1, n_vars)
    full = Domain(names, [[f"s{j}" for j in range(m)] for m in sizes])
    tables = []
    for i, v in enumerate(names):
        lo = 0 if window is None else max(0, i - window)
        pool = names[lo:i]
        n_pa = int(min(len(pool), rng.binomial(max_parents, edge_prob)))
        parents = sorted(rng.choice(pool, n_pa, replace=False).tolist(),
                         key=names.index) if n_pa else []
        tables.append(random_cpt(rng, full.subdomain([v] + parents), zero_prob))
    return validate_cpt_list(tables)


def random_evidence(rng: np.random.Generator, spec: NetworkSpec, max_vars: int = 3) -> dict:
    n = int(rng.integers(0, max_vars + 1))
    chosen = rng.choice(spec.domain.labels, size=min(n, len(spec.domain)), replace=False)
    return {v: spec.domain.states(v)[int(rng.integers(spec.domain.size(v)))] for v in chosen}


def grid_network(rows: int, cols: int, n_states: int = 2, seed=0) -> NetworkSpec:
    """Grid DAG with arcs right and down; triangulation cost grows with the width."""
    rng = np.random.default_rng(seed)
    name = lambda r, c: f"G{r}_{c}"
    states = [f"s{j}" for j in range(n_states)]
    nodes = [name(r, c) for r, c in itertools.product(range(rows), range(cols))]
    full = Domain(nodes, [states] * len(nodes))
    tables = []
    for r, c in itertools.product(range(rows), range(cols)):
        parents = ([name(r - 1, c)] if r else []) + ([name(r, c - 1)] if c else [])
        tables.append(random_cpt(rng, full.subdomain([name(r, c)] + parents)))
    return validate_cpt_list(tables)


def forward_sample(spec: NetworkSpec, rng: np.random.Generator) -> dict[str, str]:
    """One joint configuration drawn in topological order."""
    x: dict[str, str] = {}
    for v in spec.dag.topological_order():
        t = spec.cpt(v)
        parents = t.labels[1:]
        keep = np.ones(t.ncells, dtype=bool)
        for i, p in enumerate(parents, 1):
            keep &= t.cells[i] == spec.domain.level(p, x[p])
        probs = t.vals[keep]
        pick = rng.choice(probs.size, p=probs / probs.sum())
        x[v] = spec.domain.state(v, int(t.cells[0, keep][pick]))
    return x


def heuristic_contrast_network() -> NetworkSpec:
    """40 variables on which min_fill and min_nei give different largest cliques."""
    return random_network(0, n_vars=40, max_parents=3, max_states=4, window=10, edge_prob=0.6)


def large_sparse_network(seed: int = 3, n_vars: int = 220) -> NetworkSpec:
    """Sparse-CPT network whose min_nei cliques need several GB as dense tables."""
    return random_network(seed, n_vars=n_vars, max_parents=4, min_states=2, max_states=4,
                          zero_prob=0.85, window=16, edge_prob=0.6)
