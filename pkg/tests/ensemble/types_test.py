from __future__ import annotations

import numpy
import pytest
from pydantic import ValidationError

from wavens.ensemble.types import GridSpec
from wavens.ensemble.types import PredictionSet
from wavens.ensemble.types import WeightVector
from wavens.errors import NonFiniteError
from wavens.errors import ShapeError
from wavens.errors import SubsetError
from wavens.errors import WeightError


def _probs(num_models: int = 2, num_samples: int = 3) -> numpy.ndarray:
    return numpy.full((num_models, num_samples, 2), 0.5)


def test_prediction_set_properties() -> None:
    preds = PredictionSet(['a', 'b'], ['x', 'y'], _probs(), ['s0', 's1', 's2'])
    assert preds.model_names == ('a', 'b')
    assert preds.class_names == ('x', 'y')
    assert (preds.num_models, preds.num_samples, preds.num_classes) == (
        2,
        3,
        2,
    )

    subset = preds.select_samples([2, 0])
    assert subset.sample_ids == ('s2', 's0')
    assert subset.probs.shape == (2, 2, 2)


def test_prediction_set_validation() -> None:
    with pytest.raises(ShapeError, match='tensor'):
        PredictionSet(['a'], ['x', 'y'], numpy.full((3, 2), 0.5))
    with pytest.raises(SubsetError):
        PredictionSet([], ['x', 'y'], numpy.zeros((0, 3, 2)))
    with pytest.raises(ShapeError, match='model name'):
        PredictionSet(['a'], ['x', 'y'], _probs())
    with pytest.raises(ValueError, match='unique'):
        PredictionSet(['a', 'a'], ['x', 'y'], _probs())
    with pytest.raises(ShapeError, match='class name'):
        PredictionSet(['a', 'b'], ['x'], _probs())
    with pytest.raises(ShapeError, match='sample id'):
        PredictionSet(['a', 'b'], ['x', 'y'], _probs(), ['s0'])


def test_prediction_set_values() -> None:
    probs = _probs()
    probs[0, 1, 0] = numpy.nan
    with pytest.raises(NonFiniteError):
        PredictionSet(['a', 'b'], ['x', 'y'], probs)

    probs = _probs()
    probs[1, 0] = (1.5, -0.5)
    with pytest.raises(ValueError, match='non-negative'):
        PredictionSet(['a', 'b'], ['x', 'y'], probs)

    probs = _probs()
    probs[1, 2] = (0.5, 0.6)
    with pytest.raises(ValueError, match='model b for sample 2'):
        PredictionSet(['a', 'b'], ['x', 'y'], probs)


def test_weight_vector() -> None:
    weights = WeightVector((0.25, 0, 0.75))
    assert weights.weights == (0.25, 0.0, 0.75)
    assert len(weights) == 3
    assert weights.total == 1.0
    assert weights.as_array().dtype == numpy.float64

    with pytest.raises(WeightError):
        WeightVector(())
    with pytest.raises(WeightError, match='non-negative'):
        WeightVector((0.5, -0.1))
    with pytest.raises(WeightError, match='finite'):
        WeightVector((float('inf'), 1.0))
    with pytest.raises(WeightError, match='positive'):
        WeightVector((0.0, 0.0))


def test_grid_spec() -> None:
    spec = GridSpec()
    assert spec.divisions == 10
    assert not spec.unconstrained

    box = GridSpec(step=0.1, unconstrained=True, upper=0.4)
    assert box.box_divisions == 4

    assert GridSpec(step=0.25).divisions == 4


def test_grid_spec_validation() -> None:
    with pytest.raises(ValidationError, match='does not close'):
        GridSpec(step=0.3)
    with pytest.raises(ValidationError, match='does not close'):
        GridSpec(step=0.1, unconstrained=True, upper=0.45)
    with pytest.raises(ValidationError):
        GridSpec(step=0)
    with pytest.raises(ValidationError):
        GridSpec(step=0.1, extra_option=True)
