"""Multiphoton interference in sparse linear-optical interferometers.

Exact coincidence rates for partially distinguishable photons, the
constant-depth 2n-mode sparse design, output-configuration classification,
collective-phase estimation and permanent-bound checks.
"""
from ._backend import BACKEND
from .appendix import (ConjectureSweepResult, carlen_bound, conjecture_statistic, conjecture_sweep,
                       fourier_matrix, haar_random_unitary, ryser_permanent)
from .classify import ConfigClassification, classify, classify_design, parity
from .design import SparseDesign, build_sparse_unitary, canonical_cycle, resource_comparison
from .engine import (CoincidenceReport, CountsReport, ScatteringMatrix, all_rates, coincidence_rate,
                     distinguishable_oracle, indistinguishable_oracle, sample_counts, validate_unitary)
from .errors import NumericalConsistencyError, SparsePhaseError, ValidationError
from .estimate import (EstimateReport, collective_phase, estimate, genuine_check, overlap_amplitude,
                       pairwise_overlaps, rates_from_counts)
from .graphs import (ConnectivityGraph, EDGraph, connectivity_graph, enhanced_graph, minor_graph,
                     output_sets, pure_cycle_check, to_dot)
from .photons import (GramMatrix, InternalState, Permutation, collective_phase_of_cycle,
                      cycle_decompose, gram_from_states, overlap_r, validate_gram)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CoincidenceReport", "ConfigClassification", "ConjectureSweepResult",
    "ConnectivityGraph", "CountsReport", "EDGraph", "EstimateReport", "GramMatrix", "InternalState",
    "NumericalConsistencyError", "Permutation", "ScatteringMatrix", "SparseDesign",
    "SparsePhaseError", "ValidationError", "all_rates", "build_sparse_unitary", "canonical_cycle",
    "carlen_bound", "classify", "classify_design", "coincidence_rate", "collective_phase",
    "collective_phase_of_cycle", "conjecture_statistic", "conjecture_sweep", "connectivity_graph",
    "cycle_decompose", "distinguishable_oracle", "enhanced_graph", "estimate", "fourier_matrix",
    "genuine_check", "gram_from_states", "haar_random_unitary", "indistinguishable_oracle",
    "minor_graph", "output_sets", "overlap_amplitude", "overlap_r", "pairwise_overlaps", "parity",
    "pure_cycle_check", "rates_from_counts", "resource_comparison", "ryser_permanent",
    "sample_counts", "to_dot", "validate_gram", "validate_unitary",
]
