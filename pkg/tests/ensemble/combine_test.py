from __future__ import annotations

import numpy
import pytest

from testing.data import make_predictions
from testing.oracles import oracle_accuracy
from wavens.ensemble.combine import ALL_MODELS
from wavens.ensemble.combine import average_ensemble
from wavens.ensemble.combine import check_subset
from wavens.ensemble.combine import enumerate_subsets
from wavens.ensemble.combine import pairwise_ensemble_sweep
from wavens.ensemble.combine import weighted_combine
from wavens.ensemble.types import PredictionSet
from wavens.ensemble.types import WeightVector
from wavens.errors import ShapeError
from wavens.errors import SubsetError
from wavens.errors import WeightError
from wavens.metrics import evaluate


def test_weighted_combine_example() -> None:
    probs = numpy.array(
        [
            [[0.6, 0.4], [0.3, 0.7]],
            [[0.2, 0.8], [0.9, 0.1]],
        ],
    )
    preds = PredictionSet(['a', 'b'], ['x', 'y'], probs)
    result = weighted_combine(preds, WeightVector((0.75, 0.25)), [0, 1])
    assert numpy.allclose(result.combined, [[0.5, 0.5], [0.45, 0.55]])
    # The first row ties and the lowest class index wins.
    assert result.labels.tolist() == [0, 1]
    assert result.accuracy == 100.0
    assert numpy.allclose(result.normalized.sum(axis=1), 1.0)


def test_weighted_combine_unnormalized_weights() -> None:
    preds, labels = make_predictions()
    result = weighted_combine(preds, WeightVector((2.0, 1.0, 1.0)), labels)
    assert numpy.allclose(result.combined.sum(axis=1), 4.0)
    assert numpy.allclose(result.normalized.sum(axis=1), 1.0)
    assert result.accuracy == oracle_accuracy(
        preds.probs,
        list(labels),
        (2.0, 1.0, 1.0),
    )


def test_weighted_combine_validation() -> None:
    preds, labels = make_predictions()
    with pytest.raises(WeightError, match='Expected 3 weights'):
        weighted_combine(preds, WeightVector((1.0, 1.0)))
    with pytest.raises(ShapeError):
        weighted_combine(preds, WeightVector((1.0, 1.0, 1.0)), labels[:-1])
    assert weighted_combine(preds, WeightVector((1, 0, 0))).accuracy is None


@pytest.mark.parametrize('seed', range(10))
def test_weighted_combine_scale_invariant(seed: int) -> None:
    preds, labels = make_predictions(seed=seed)
    weights = (0.2, 0.5, 0.3)
    scaled = tuple(4 * w for w in weights)
    a = weighted_combine(preds, WeightVector(weights), labels)
    b = weighted_combine(preds, WeightVector(scaled), labels)
    # Scaling by a power of two is exact.
    assert numpy.array_equal(a.labels, b.labels)
    assert a.accuracy == b.accuracy


@pytest.mark.parametrize('seed', range(10))
def test_weighted_combine_permutation_equivariant(seed: int) -> None:
    preds, labels = make_predictions(seed=seed)
    weights = (0.2, 0.5, 0.3)
    order = [2, 0, 1]
    permuted = PredictionSet(
        [preds.model_names[i] for i in order],
        preds.class_names,
        preds.probs[order],
    )
    a = weighted_combine(preds, WeightVector(weights), labels)
    b = weighted_combine(
        permuted,
        WeightVector(tuple(weights[i] for i in order)),
        labels,
    )
    assert numpy.allclose(a.combined, b.combined)
    assert a.accuracy == b.accuracy


def test_average_ensemble() -> None:
    preds, labels = make_predictions()
    result = average_ensemble(preds, [0, 2], labels)
    assert result.weights.weights == (0.5, 0.0, 0.5)
    assert numpy.allclose(
        result.combined,
        (preds.probs[0] + preds.probs[2]) / 2,
    )

    single = average_ensemble(preds, [1], labels)
    assert numpy.array_equal(single.combined, preds.probs[1])


def test_check_subset() -> None:
    assert check_subset([2, 0], 3) == (2, 0)
    with pytest.raises(SubsetError, match='empty'):
        check_subset([], 3)
    with pytest.raises(SubsetError, match='duplicates'):
        check_subset([1, 1], 3)
    with pytest.raises(SubsetError, match='outside'):
        check_subset([0, 3], 3)


def test_enumerate_subsets() -> None:
    assert enumerate_subsets(3, 2) == [(0, 1), (0, 2), (1, 2)]
    assert len(enumerate_subsets(7, 2)) == 21
    assert sum(len(enumerate_subsets(7, k)) for k in range(1, 8)) == 127
    # Ensembles of at least two of seven models.
    assert sum(len(enumerate_subsets(7, k)) for k in range(2, 8)) == 120
    with pytest.raises(SubsetError):
        enumerate_subsets(3, 0)
    with pytest.raises(SubsetError):
        enumerate_subsets(3, 4)


def test_pairwise_ensemble_sweep() -> None:
    preds, labels = make_predictions(num_models=4)
    rows = pairwise_ensemble_sweep(preds, labels)
    assert len(rows) == 7
    assert rows[0].name == 'EfficientNetB0 + InceptionResNetV2'
    assert rows[0].subset == (0, 1)
    assert rows[-1].name == ALL_MODELS
    assert rows[-1].subset == (0, 1, 2, 3)

    expected = evaluate(
        average_ensemble(preds, (1, 3), labels).combined,
        labels,
        preds.class_names,
    )
    assert rows[4].subset == (1, 3)
    assert rows[4].report.accuracy == expected.accuracy

    single, single_labels = make_predictions(num_models=1)
    with pytest.raises(SubsetError):
        pairwise_ensemble_sweep(single, single_labels)
