"""Weighted and plain average ensembles."""

from __future__ import annotations

import dataclasses
import itertools
from typing import Sequence

import numpy

from wavens.ensemble.types import EnsembleResult
from wavens.ensemble.types import PredictionSet
from wavens.ensemble.types import WeightVector
from wavens.errors import ShapeError
from wavens.errors import SubsetError
from wavens.errors import WeightError
from wavens.metrics import EvalReport
from wavens.metrics import evaluate
from wavens.numerics import Array
from wavens.numerics import IntArray

ALL_MODELS = 'all models'
"""Row name of the full-set average in a pairwise sweep."""


def accumulate(weights: Array, probs: Array) -> Array:
    """Weighted sums of model probabilities for many weight vectors.

    Models are accumulated in order as `w_0 * p_0 + w_1 * p_1 + ...`, so
    every row of `weights` yields exactly the floating-point values of a
    single [`weighted_combine()`][wavens.ensemble.combine.weighted_combine]
    call.

    Args:
        weights: `L x M` matrix of weight vectors.
        probs: `M x N x C` probability tensor.

    Returns:
        `L x N x C` combined scores.
    """
    total = weights[:, 0, None, None] * probs[0][None]
    for m in range(1, probs.shape[0]):
        total = total + weights[:, m, None, None] * probs[m][None]
    return total


def _accuracy(labels: IntArray, truth: IntArray) -> float:
    return 100.0 * int(numpy.count_nonzero(labels == truth)) / len(truth)


def _check_truth(preds: PredictionSet, labels: IntArray | None) -> None:
    if labels is not None and labels.shape != (preds.num_samples,):
        raise ShapeError(
            'labels must have one entry per sample',
            expected=(preds.num_samples,),
            actual=labels.shape,
        )


def weighted_combine(
    preds: PredictionSet,
    weights: WeightVector,
    labels: Sequence[int] | IntArray | None = None,
) -> EnsembleResult:
    """Weighted sum of model probabilities.

    The weights are applied as given without normalization. Labels are the
    row-wise argmax with the lowest index winning ties.

    Args:
        preds: Model predictions.
        weights: One weight per model.
        labels: Optional true labels used to compute the accuracy.

    Raises:
        WeightError: If the number of weights differs from the number of
            models.
    """
    if len(weights) != preds.num_models:
        raise WeightError(
            f'Expected {preds.num_models} weights, got {len(weights)}.',
        )
    truth = None if labels is None else numpy.asarray(labels, numpy.int64)
    _check_truth(preds, truth)
    combined = accumulate(weights.as_array()[None, :], preds.probs)[0]
    predicted = numpy.argmax(combined, axis=1).astype(numpy.int64)
    return EnsembleResult(
        weights=weights,
        combined=combined,
        labels=predicted,
        accuracy=None if truth is None else _accuracy(predicted, truth),
    )


def check_subset(subset: Sequence[int], num_models: int) -> tuple[int, ...]:
    """Validate model indices.

    Raises:
        SubsetError: If the subset is empty, has duplicates, or contains an
            index outside of `[0, num_models)`.
    """
    subset = tuple(int(i) for i in subset)
    if len(subset) == 0:
        raise SubsetError('A model subset must not be empty.')
    if len(set(subset)) != len(subset):
        raise SubsetError(f'Model subset has duplicates: {subset}.')
    if any(i < 0 or i >= num_models for i in subset):
        raise SubsetError(
            f'Model subset {subset} has indices outside of '
            f'[0, {num_models}).',
        )
    return subset


def average_ensemble(
    preds: PredictionSet,
    subset: Sequence[int],
    labels: Sequence[int] | IntArray | None = None,
) -> EnsembleResult:
    """Equal-weight ensemble of a subset of models.

    Equivalent to [`weighted_combine()`][wavens.ensemble.combine.weighted_combine]
    with weight `1/k` on each of the `k` subset models and zero elsewhere.

    Raises:
        SubsetError: If the subset is empty, has duplicates, or is out of
            range.
    """  # noqa: E501
    subset = check_subset(subset, preds.num_models)
    share = 1.0 / len(subset)
    weights = tuple(
        share if m in subset else 0.0 for m in range(preds.num_models)
    )
    return weighted_combine(preds, WeightVector(weights), labels)


def enumerate_subsets(num_models: int, k: int) -> list[tuple[int, ...]]:
    """All `k`-subsets of `range(num_models)` in lexicographic order.

    Raises:
        SubsetError: If `k` is not in `[1, num_models]`.
    """
    if not 0 < k <= num_models:
        raise SubsetError(
            f'Subset size must be in [1, {num_models}]. Got {k}.',
        )
    return list(itertools.combinations(range(num_models), k))


@dataclasses.dataclass(frozen=True)
class SweepRow:
    """Evaluation of one averaged model subset."""

    name: str
    subset: tuple[int, ...]
    report: EvalReport


def pairwise_ensemble_sweep(
    preds: PredictionSet,
    labels: Sequence[int] | IntArray,
) -> list[SweepRow]:
    """Evaluate the average of every model pair and of all models.

    Rows are the pairs in lexicographic order followed by the full set.

    Raises:
        SubsetError: If there are fewer than two models.
    """
    if preds.num_models < 2:  # noqa: PLR2004
        raise SubsetError('A pairwise sweep needs at least two models.')
    truth = numpy.asarray(labels, dtype=numpy.int64)
    subsets = [
        *enumerate_subsets(preds.num_models, 2),
        tuple(range(preds.num_models)),
    ]
    rows = []
    for i, subset in enumerate(subsets):
        result = average_ensemble(preds, subset, truth)
        name = (
            ALL_MODELS
            if i == len(subsets) - 1
            else ' + '.join(preds.model_names[m] for m in subset)
        )
        report = evaluate(result.combined, truth, preds.class_names)
        rows.append(SweepRow(name=name, subset=subset, report=report))
    return rows
