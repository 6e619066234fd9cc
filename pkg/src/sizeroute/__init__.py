"""Analysis, optimization, bounds and simulation of two-server SITA and TAGS routing."""

from .bounds import BoundReport, ratio_lower_bound, sita_upper_bound, tags_lower_bound, verify_bounds
from .distributions import BoundedPareto
from .errors import ConfigError, DomainError, HypothesisError, UnstableStationError
from .mg1 import ServiceMoments, StationEvaluation, pk_wait
from .search import ThresholdSearchResult
from .simulator import Policy, SimConfig, SimResult, replicate, simulate
from .sita import PolicyEvaluation, evaluate_sita, load_balancing_cutoff, optimal_sita_cutoff
from .tags import evaluate_tags, optimal_tags_threshold, truncated_service_moments

__all__ = [
    "BoundReport", "BoundedPareto", "ConfigError", "DomainError", "HypothesisError",
    "Policy", "PolicyEvaluation", "ServiceMoments", "SimConfig", "SimResult",
    "StationEvaluation", "ThresholdSearchResult", "UnstableStationError",
    "evaluate_sita", "evaluate_tags", "load_balancing_cutoff", "optimal_sita_cutoff",
    "optimal_tags_threshold", "pk_wait", "ratio_lower_bound", "replicate", "simulate",
    "sita_upper_bound", "tags_lower_bound", "truncated_service_moments", "verify_bounds",
]
