"""Cycle mutation, permutation distances, benchmark problems and landscape analysis."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:
    __version__ = "0.1.0"

from .distances import DistanceMeasure, diameter_formula, paired_distance, parse_distance
from .landscape import (FdcReport, NeighborhoodEnumerator, bfs_diameter, enumerate_permutations,
                        exhaustive_optima, fdc, fdc_many, landscape_delta, neighborhood)
from .metaheuristics import RunConfig, RunTrace, one_plus_one_ea, run_batch, simulated_annealing
from .mutation import CycleLengthSampler, MutationOperator, expected_cycle_length, parse_operator
from .permutation import as_permutation, create_cycle, cycle_decomposition, identity, random_permutation
from .problems import (Graph, LcsInstance, QapInstance, TspInstance, generalized_petersen, make_problem,
                       parse_problem, qap_planted_instance, tsp_circle_instance)
from .sampling import sample
from .stats import pearson, summarize, wilcoxon_rank_sum
from .tables import ExperimentTable

__all__ = [
    "CycleLengthSampler", "DistanceMeasure", "ExperimentTable", "FdcReport", "Graph", "LcsInstance",
    "MutationOperator", "NeighborhoodEnumerator", "QapInstance", "RunConfig", "RunTrace", "TspInstance",
    "as_permutation", "bfs_diameter", "create_cycle", "cycle_decomposition", "diameter_formula",
    "enumerate_permutations", "exhaustive_optima", "expected_cycle_length", "fdc", "fdc_many",
    "generalized_petersen", "identity", "landscape_delta", "make_problem", "neighborhood", "one_plus_one_ea",
    "paired_distance", "parse_distance", "parse_operator", "parse_problem", "pearson", "qap_planted_instance",
    "random_permutation", "run_batch", "sample", "simulated_annealing", "summarize", "tsp_circle_instance",
    "wilcoxon_rank_sum",
]
