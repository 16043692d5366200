"""Weighted average ensembles of model probability outputs."""

from __future__ import annotations

from wavens.ensemble.combine import average_ensemble
from wavens.ensemble.combine import enumerate_subsets
from wavens.ensemble.combine import pairwise_ensemble_sweep
from wavens.ensemble.combine import weighted_combine
from wavens.ensemble.search import enumerate_weight_lattice
from wavens.ensemble.search import grid_search_weights
from wavens.ensemble.search import GridSearchResult
from wavens.ensemble.search import TraceRow
from wavens.ensemble.types import EnsembleResult
from wavens.ensemble.types import GridSpec
from wavens.ensemble.types import PredictionSet
from wavens.ensemble.types import WeightVector

__all__ = (
    'EnsembleResult',
    'GridSearchResult',
    'GridSpec',
    'PredictionSet',
    'TraceRow',
    'WeightVector',
    'average_ensemble',
    'enumerate_subsets',
    'enumerate_weight_lattice',
    'grid_search_weights',
    'pairwise_ensemble_sweep',
    'weighted_combine',
)
