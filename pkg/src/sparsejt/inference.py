"""Bayesian-network compilation and Lauritzen-Spiegelhalter propagation.

Workflow::

    spec = validate_cpt_list(tables)
    state = compile_network(spec, {"tub": "yes"}, heuristic="min_fill")
    propagate(state)
    query_marginal(state, ["xray"])

Clique potentials are sparse tables whose labels may be a subset of the
clique (a potential is constant along the missing variables).  A clique
that receives no CPT holds a :class:`UnityTable` marker until the first
message reaches it, at which point it is replaced by that message.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .domain import Domain
from .errors import (DomainError, ImpossibleEvidenceError, NetworkError,
                     NormalizationError, PhaseError)
from .graph import (Dag, JunctionTreeSkeleton, Triangulation, build_junction_tree,
                    moralize, triangulate)
from .table import SparseTable, UnityTable, div, marg, mult, mult_unity, slice_table

Potential = SparseTable | UnityTable

PHASES = ("initialized", "collected", "distributed")


@dataclass
class NetworkSpec:
    """Variables, DAG and one CPT per variable (child is the CPT's first label)."""

    domain: Domain
    cpts: list[SparseTable]
    dag: Dag

    def cpt(self, variable: str) -> SparseTable:
        for t in self.cpts:
            if t.labels[0] == variable:
                return t
        raise DomainError(f"no CPT for variable {variable!r}")

    def __str__(self) -> str:
        lines = [" List of CPTs", " " + "-" * 25]
        for t in self.cpts:
            child, parents = t.labels[0], t.labels[1:]
            if parents:
                lines.append(f"  P( {child} | {', '.join(parents)} )")
            else:
                lines.append(f"  P( {child} )")
        return "\n".join(lines)


@dataclass(frozen=True)
class Evidence:
    assignments: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def coerce(cls, ev) -> "Evidence":
        if ev is None:
            return cls({})
        if isinstance(ev, Evidence):
            return ev
        return cls(dict(ev))

    def validate(self, domain: Domain) -> None:
        for var, st in self.assignments.items():
            domain.level(var, st)

    def restrict(self, labels: Iterable[str]) -> dict[str, str]:
        return {l: self.assignments[l] for l in labels if l in self.assignments}

    def __len__(self) -> int:
        return len(self.assignments)


@dataclass
class Charge:
    clique_potentials: list[Potential]
    separator_potentials: dict[tuple[int, int], Potential]

    def copy(self) -> "Charge":
        return Charge(list(self.clique_potentials), dict(self.separator_potentials))


@dataclass
class JunctionTreeState:
    spec: NetworkSpec
    triangulation: Triangulation
    skeleton: JunctionTreeSkeleton
    charge: Charge
    evidence: Evidence
    phase: str = "initialized"
    log_p_evidence: float | None = None
    initial_charge: Charge | None = None

    @property
    def cliques(self) -> list[tuple[str, ...]]:
        return self.skeleton.cliques

    def describe(self) -> str:
        sizes = [len(c) for c in self.cliques]
        lines = [
            " Compiled network",
            " " + "-" * 25,
            f"  Nodes: {len(self.spec.domain)}",
            f"  Cliques: {len(sizes)}",
            f"   - max: {max(sizes)}",
            f"   - min: {min(sizes)}",
            f"   - avg: {sum(sizes) / len(sizes):.2f}",
        ]
        if len(self.evidence):
            lines.append("  Evidence:")
            lines += [f"   - {v}: {s}" for v, s in self.evidence.assignments.items()]
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# network validation

def validate_cpt_list(
    tables: Sequence[SparseTable], dag: Dag | None = None, tol: float = 1e-9
) -> NetworkSpec:
    """Infer (or check) the DAG from CPTs whose first label is the child.

    Every parent configuration with nonzero mass must sum to one within ``tol``.
    """
    if not tables:
        raise NetworkError("empty CPT list")
    domain = tables[0].domain
    for t in tables[1:]:
        domain = domain.union(t.domain)
    children = [t.labels[0] for t in tables]
    dupes = sorted({c for c in children if children.count(c) > 1})
    if dupes:
        raise NetworkError(f"more than one CPT for {dupes}")
    missing = [v for v in domain.labels if v not in children]
    if missing:
        raise NetworkError(f"variables without a CPT: {missing}")
    parents = {t.labels[0]: list(t.labels[1:]) for t in tables}
    if dag is not None:
        for v in children:
            if set(dag.parents.get(v, [])) != set(parents[v]):
                raise NetworkError(
                    f"CPT parents of {v!r} {parents[v]} disagree with the DAG "
                    f"{dag.parents.get(v, [])}"
                )
    built = Dag(children, parents)
    for t in tables:
        check_cpt(t, tol)
    return NetworkSpec(domain.subdomain(children), list(tables), built)


def check_cpt(t: SparseTable, tol: float = 1e-9) -> None:
    child = t.labels[0]
    sums = marg(t, [child]).vals
    if t.ncells == 0 or np.any(np.abs(sums - 1.0) > tol):
        bad = sums[np.abs(sums - 1.0) > tol]
        shown = float(bad[0]) if bad.size else 0.0
        raise NormalizationError(
            f"CPT of {child!r} is not normalized (a parent configuration sums to {shown:.6g})"
        )


# ---------------------------------------------------------------------------
# compilation

def compile_network(
    spec: NetworkSpec,
    evidence=None,
    heuristic: str = "min_fill",
    root_node: str | None = None,
) -> JunctionTreeState:
    """Moralize, triangulate, build the junction tree and initialize the charge.

    Evidence slices every CPT mentioning an observed variable before the
    clique products are formed, keeping the observed rows.
    """
    ev = Evidence.coerce(evidence)
    ev.validate(spec.domain)
    if root_node is not None:
        spec.domain.index(root_node)
    cpts = [slice_table(t, ev.restrict(t.labels)) for t in spec.cpts]
    sizes = dict(zip(spec.domain.labels, spec.domain.sizes))
    tri = triangulate(moralize(spec.dag), sizes, heuristic)
    skel = build_junction_tree(tri, root_node)

    assigned: list[list[SparseTable]] = [[] for _ in skel.cliques]
    clique_sets = [set(c) for c in skel.cliques]
    for t in cpts:
        home = next((i for i, c in enumerate(clique_sets) if set(t.labels) <= c), None)
        # Moralization puts every family inside some clique.
        assert home is not None, f"no clique holds the family of {t.labels[0]!r}"
        assigned[home].append(t)

    potentials: list[Potential] = []
    for i, tabs in enumerate(assigned):
        if not tabs:
            potentials.append(UnityTable(spec.domain.subdomain(skel.cliques[i])))
            continue
        pot = tabs[0]
        for t in tabs[1:]:
            pot = mult(pot, t)
        potentials.append(pot)
    seps = {
        e: UnityTable(spec.domain.subdomain(s)) for e, s in skel.separators.items()
    }
    charge = Charge(potentials, seps)
    return JunctionTreeState(spec, tri, skel, charge, ev, initial_charge=charge.copy())


def set_evidence(state: JunctionTreeState, evidence) -> JunctionTreeState:
    """Fresh initialized state with extra evidence sliced into the initial charge."""
    new = Evidence.coerce(evidence)
    new.validate(state.spec.domain)
    merged = dict(state.evidence.assignments)
    for v, s in new.assignments.items():
        if merged.get(v, s) != s:
            raise DomainError(f"evidence {v}={s} conflicts with compiled evidence {v}={merged[v]}")
        merged[v] = s
    base = state.initial_charge
    pots = [
        p if isinstance(p, UnityTable) else slice_table(p, new.restrict(p.labels))
        for p in base.clique_potentials
    ]
    charge = Charge(pots, dict(base.separator_potentials))
    return JunctionTreeState(
        state.spec, state.triangulation, state.skeleton, charge, Evidence(merged),
        initial_charge=base,
    )


# ---------------------------------------------------------------------------
# propagation

MessageHook = Callable[[JunctionTreeState, str, int, int], None]


def propagate_collect(state: JunctionTreeState, on_message: MessageHook | None = None):
    """Leaves-to-root pass; normalizes the root and records p(evidence)."""
    if state.phase != "initialized":
        raise PhaseError(f"collect requires an initialized tree, phase is {state.phase!r}")
    skel, pots = state.skeleton, state.charge.clique_potentials
    for child in reversed(skel.order[1:]):
        parent = skel.parent[child]
        sep = set(skel.separator(child, parent))
        cp = pots[child]
        if isinstance(cp, UnityTable):
            # An all-ones potential sends a constant message.
            if on_message:
                on_message(state, "collect", child, parent)
            continue
        msg = marg(cp, [l for l in cp.labels if l not in sep])
        pp = pots[parent]
        pots[parent] = msg if isinstance(pp, UnityTable) else mult(pp, msg)
        pots[child] = div(cp, msg)
        if on_message:
            on_message(state, "collect", child, parent)

    root = pots[skel.root]
    total = 0.0 if isinstance(root, UnityTable) else root.sum()
    if not total > 0:
        raise ImpossibleEvidenceError()
    pots[skel.root] = SparseTable._build(root.domain, root.cells, root.vals / total)
    state.log_p_evidence = math.log(total)
    state.phase = "collected"
    if on_message:
        on_message(state, "normalize", skel.root, skel.root)
    return state


def propagate_distribute(state: JunctionTreeState, on_message: MessageHook | None = None):
    """Root-to-leaves pass; afterwards every clique holds its conditional marginal.

    The collect pass already divided each child by its inward message, so
    the child is multiplied by the parent's separator marginal directly.
    """
    if state.phase != "collected":
        raise PhaseError(f"distribute requires a collected tree, phase is {state.phase!r}")
    skel, charge = state.skeleton, state.charge
    pots = charge.clique_potentials
    for child in skel.order[1:]:
        parent = skel.parent[child]
        sep = set(skel.separator(parent, child))
        pp = pots[parent]
        msg = marg(pp, [l for l in pp.labels if l not in sep])
        cp = pots[child]
        pots[child] = msg if isinstance(cp, UnityTable) else mult(cp, msg)
        edge = (parent, child) if (parent, child) in skel.separators else (child, parent)
        charge.separator_potentials[edge] = msg
        if on_message:
            on_message(state, "distribute", parent, child)
    state.phase = "distributed"
    return state


def propagate(state: JunctionTreeState, prop: str = "full") -> JunctionTreeState:
    """``prop`` is ``"full"`` (collect then distribute) or ``"collect"``."""
    if prop not in ("full", "collect"):
        raise ValueError(f"unknown propagation mode {prop!r}")
    propagate_collect(state)
    if prop == "full":
        propagate_distribute(state)
    return state


def prob_of_evidence(state: JunctionTreeState) -> float:
    if state.phase == "initialized":
        raise PhaseError("probability of evidence is known only after collect")
    return math.exp(state.log_p_evidence)


# ---------------------------------------------------------------------------
# queries

def _home_clique(state: JunctionTreeState, nodes: Iterable[str]) -> int:
    nodes = set(nodes)
    for n in nodes:
        state.spec.domain.index(n)
    if state.phase == "initialized":
        raise PhaseError("queries require a propagated tree")
    skel = state.skeleton
    if state.phase == "collected":
        if nodes <= set(skel.cliques[skel.root]):
            return skel.root
        raise PhaseError(
            f"after collect only root clique variables {list(skel.cliques[skel.root])} "
            "can be queried; run distribute"
        )
    for i in skel.order:
        if nodes <= set(skel.cliques[i]):
            return i
    raise DomainError(f"variables {sorted(nodes)} are not contained in a single clique")


def clique_marginal(state: JunctionTreeState, clique: int, nodes: Sequence[str]) -> SparseTable:
    """Marginal over ``nodes`` (in that order) taken from one clique potential."""
    pot = state.charge.clique_potentials[clique]
    missing = [n for n in nodes if n not in pot.labels]
    if missing:
        # The potential is constant along variables it does not carry.
        pot = mult_unity(pot, UnityTable(state.spec.domain.subdomain(missing)))
    m = marg(pot, [l for l in pot.labels if l not in nodes])
    return reorder(m, nodes)


def reorder(s: SparseTable, labels: Sequence[str]) -> SparseTable:
    labels = list(labels)
    if list(s.labels) == labels:
        return s
    return SparseTable(s.domain.subdomain(labels), s.rows(labels), s.vals, validate=False)


def query_marginal(state: JunctionTreeState, nodes: Sequence[str]) -> dict[str, dict[str, float]]:
    """Per node, the evidence-conditional distribution as ``{state: probability}``."""
    out = {}
    for node in nodes:
        i = _home_clique(state, [node])
        m = clique_marginal(state, i, [node])
        states = state.spec.domain.states(node)
        probs = np.zeros(len(states))
        probs[m.cells[0] - 1] = m.vals
        out[node] = dict(zip(states, probs.tolist()))
    return out


def query_joint(state: JunctionTreeState, nodes: Sequence[str]) -> SparseTable:
    """Joint conditional distribution over ``nodes``, which must share a clique."""
    if state.phase != "distributed" and state.phase != "collected":
        raise PhaseError("queries require a propagated tree")
    i = _home_clique(state, nodes)
    return clique_marginal(state, i, list(nodes))
