"""Iterated local search whose inner local search learns a weighted
variable-interaction graph for free, plus a graph-guided perturbation
operator and brute-force validation oracles."""

from .core import (
    EPS,
    RNG_ALGORITHM,
    TOOL_VERSION,
    CapabilityError,
    OneMax,
    Problem,
    delta,
    flip,
    hamming,
    make_rng,
    random_bits,
    second_difference,
)
from .ils import IlsConfig, RunReport, run_ils
from .problems import (
    KnapsackInstance,
    NkInstance,
    knapsack_generate,
    load_instance,
    nk_generate,
)
from .search import ls, lswll2
from .vigw import EmpiricalVigw, export_graph, threshold_computation

__version__ = TOOL_VERSION

__all__ = [
    "EPS",
    "RNG_ALGORITHM",
    "TOOL_VERSION",
    "CapabilityError",
    "EmpiricalVigw",
    "IlsConfig",
    "KnapsackInstance",
    "NkInstance",
    "OneMax",
    "Problem",
    "RunReport",
    "delta",
    "export_graph",
    "flip",
    "hamming",
    "knapsack_generate",
    "load_instance",
    "ls",
    "lswll2",
    "make_rng",
    "nk_generate",
    "random_bits",
    "run_ils",
    "second_difference",
    "threshold_computation",
]
