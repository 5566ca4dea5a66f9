"""Semi shift invariant graph filters: banks, their lattice, subgraph learning and SemiGCN."""

__version__ = "0.1.0"

from .graph import (Graph, adjacency, d_hop_neighborhood, extended_laplacian, hop_distance,
                    induced_subgraph, laplacian, make_graph, normalized_adjacency_selfloops,
                    read_graph)
from .spectral import (NonNormalShiftError, ShiftOperator, build_shift,
                       generic_perturbed_laplacian, genericity_check, gft, igft,
                       perturbed_laplacian, random_signal_gft)
from .filters import (BankSpec, SsiFilter, bank_dimension, is_essential, is_refinement,
                      is_subspace, locality_equivalent, materialize, numerical_rank,
                      spanning_set)
from .lattice import BankLattice, build_lattice, dedup_banks, enumerate_banks, join, meet
from .subgraph import (LearnConfig, LearnResult, ObservationSet, aggregate_trials,
                       baseline_gi, baseline_subgraph_si, build_support, learn,
                       recovery_error, run_trial)
from .gnn import (SemiGcnLayer, TypedGraph, gcn_layer, heterogeneous_support,
                  homophily_score, kmeans, semigcn_layer, train_node_classifier)

__all__ = [name for name in dir() if not name.startswith("_")]
