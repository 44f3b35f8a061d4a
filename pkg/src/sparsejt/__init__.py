"""Sparse probability tables and exact junction-tree inference."""

from .dense import DenseTable, dense_div, dense_marg, dense_mult, dense_slice
from .domain import Domain
from .errors import (CapacityError, DomainError, ImpossibleEvidenceError, NetworkError,
                     NormalizationError, PhaseError, SparseJTError)
from .graph import (Dag, JunctionTreeSkeleton, Triangulation, UndirectedGraph,
                    build_junction_tree, is_chordal, moralize, statespace_report, triangulate)
from .inference import (Charge, Evidence, JunctionTreeState, NetworkSpec, compile_network,
                        prob_of_evidence, propagate, propagate_collect, propagate_distribute,
                        query_joint, query_marginal, set_evidence, validate_cpt_list)
from .io import load_asia, load_network, parse_evidence, parse_network, serialize_network
from .table import (MarginalIndex, SeparatorIndex, SparseTable, UnityTable, as_cpt, div,
                    div_unity, equiv, from_dense, get_cell_name, get_val, marg, mem_estimate,
                    mult, mult_unity, normalize, product_size, slice_table, sparsity, to_dense)

__version__ = "0.1.0"

__all__ = [
    "DenseTable",
    "dense_div",
    "dense_marg",
    "dense_mult",
    "dense_slice",
    "Domain",
    "CapacityError",
    "DomainError",
    "ImpossibleEvidenceError",
    "NetworkError",
    "NormalizationError",
    "PhaseError",
    "SparseJTError",
    "Dag",
    "JunctionTreeSkeleton",
    "Triangulation",
    "UndirectedGraph",
    "build_junction_tree",
    "is_chordal",
    "moralize",
    "statespace_report",
    "triangulate",
    "Charge",
    "Evidence",
    "JunctionTreeState",
    "NetworkSpec",
    "compile_network",
    "prob_of_evidence",
    "propagate",
    "propagate_collect",
    "propagate_distribute",
    "query_joint",
    "query_marginal",
    "set_evidence",
    "validate_cpt_list",
    "load_asia",
    "load_network",
    "parse_evidence",
    "parse_network",
    "serialize_network",
    "MarginalIndex",
    "SeparatorIndex",
    "SparseTable",
    "UnityTable",
    "as_cpt",
    "div",
    "div_unity",
    "equiv",
    "from_dense",
    "get_cell_name",
    "get_val",
    "marg",
    "mem_estimate",
    "mult",
    "mult_unity",
    "normalize",
    "product_size",
    "slice_table",
    "sparsity",
    "to_dense",
]

