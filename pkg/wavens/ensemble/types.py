"""Ensemble data types."""

from __future__ import annotations

import dataclasses
import math
import sys
from typing import Sequence

if sys.version_info >= (3, 11):  # pragma: >=3.11 cover
    from typing import Self
else:  # pragma: <3.11 cover
    from typing_extensions import Self

import numpy
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator

from wavens.errors import NonFiniteError
from wavens.errors import ShapeError
from wavens.errors import SubsetError
from wavens.errors import WeightError
from wavens.numerics import Array
from wavens.numerics import IntArray

ROW_SUM_TOLERANCE = 1e-6
"""Maximum deviation of a probability row sum from one."""


@dataclasses.dataclass(frozen=True, eq=False)
class PredictionSet:
    """Class probabilities of `M` models on the same `N` samples.

    Attributes:
        model_names: Unique name of each model.
        class_names: Name of each of the `C` classes.
        probs: `M x N x C` tensor of probabilities.
        sample_ids: Optional identifier of each sample.
    """

    model_names: tuple[str, ...]
    class_names: tuple[str, ...]
    probs: Array
    sample_ids: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        probs = numpy.array(self.probs, dtype=numpy.float64)
        model_names = tuple(self.model_names)
        class_names = tuple(self.class_names)
        if probs.ndim != 3:  # noqa: PLR2004
            raise ShapeError(
                'predictions must be a models x samples x classes tensor',
                expected=('models', 'samples', 'classes'),
                actual=probs.shape,
            )
        if probs.shape[0] == 0:
            raise SubsetError('A prediction set needs at least one model.')
        if len(model_names) != probs.shape[0]:
            raise ShapeError(
                'one model name is required per model',
                expected=(probs.shape[0],),
                actual=(len(model_names),),
            )
        if len(set(model_names)) != len(model_names):
            raise ValueError(f'Model names must be unique. Got {model_names}.')
        if len(class_names) != probs.shape[2]:
            raise ShapeError(
                'one class name is required per class',
                expected=(probs.shape[2],),
                actual=(len(class_names),),
            )
        if self.sample_ids is not None and (
            len(self.sample_ids) != probs.shape[1]
        ):
            raise ShapeError(
                'one sample id is required per sample',
                expected=(probs.shape[1],),
                actual=(len(self.sample_ids),),
            )

        bad = int(numpy.count_nonzero(~numpy.isfinite(probs)))
        if bad > 0:
            raise NonFiniteError('prediction set', bad)
        if numpy.any(probs < 0):
            raise ValueError('Probabilities must be non-negative.')
        deviation = numpy.abs(probs.sum(axis=2) - 1.0)
        if deviation.size > 0 and deviation.max() > ROW_SUM_TOLERANCE:
            model, sample = numpy.unravel_index(
                numpy.argmax(deviation),
                deviation.shape,
            )
            raise ValueError(
                f'Probabilities of model {model_names[model]} for sample '
                f'{sample} sum to {probs[model, sample].sum()!r}, not 1.',
            )

        object.__setattr__(self, 'probs', probs)
        object.__setattr__(self, 'model_names', model_names)
        object.__setattr__(self, 'class_names', class_names)
        if self.sample_ids is not None:
            object.__setattr__(self, 'sample_ids', tuple(self.sample_ids))

    @property
    def num_models(self) -> int:
        """Number of models `M`."""
        return self.probs.shape[0]

    @property
    def num_samples(self) -> int:
        """Number of samples `N`."""
        return self.probs.shape[1]

    @property
    def num_classes(self) -> int:
        """Number of classes `C`."""
        return self.probs.shape[2]

    def select_samples(self, indices: Sequence[int] | IntArray) -> Self:
        """Restrict the set to the given sample positions."""
        indices = numpy.asarray(indices, dtype=numpy.int64)
        return type(self)(
            model_names=self.model_names,
            class_names=self.class_names,
            probs=self.probs[:, indices, :],
            sample_ids=None
            if self.sample_ids is None
            else tuple(self.sample_ids[i] for i in indices),
        )


@dataclasses.dataclass(frozen=True)
class WeightVector:
    """Non-negative per-model ensemble weights with at least one positive."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        weights = tuple(float(w) for w in self.weights)
        if len(weights) == 0:
            raise WeightError('A weight vector needs at least one weight.')
        if not all(math.isfinite(w) and w >= 0 for w in weights):
            raise WeightError(
                f'Weights must be finite and non-negative. Got {weights}.',
            )
        if not any(w > 0 for w in weights):
            raise WeightError('At least one weight must be positive.')
        object.__setattr__(self, 'weights', weights)

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def total(self) -> float:
        """Sum of the weights."""
        return math.fsum(self.weights)

    def as_array(self) -> Array:
        """Weights as a float64 vector."""
        return numpy.array(self.weights, dtype=numpy.float64)


class GridSpec(BaseModel):
    """Weight lattice searched by the grid search.

    By default the lattice is every vector with entries in
    `{0, step, 2 * step, ..., 1}` summing to one. With `unconstrained`
    set, it is instead the box `{0, step, ..., upper}^M` without the
    all-zero vector.
    """

    model_config = ConfigDict(extra='forbid', frozen=True)

    step: float = Field(0.1, gt=0, le=1, description='Lattice step.')
    unconstrained: bool = Field(
        False,
        description='Search the box lattice instead of the simplex.',
    )
    upper: float = Field(
        1.0,
        gt=0,
        description='Largest weight of the box lattice.',
    )

    @model_validator(mode='after')
    def _validate_closure(self) -> Self:
        ratios = {'1/step': 1 / self.step}
        if self.unconstrained:
            ratios['upper/step'] = self.upper / self.step
        for name, value in ratios.items():
            if abs(value - round(value)) > 1e-9:  # noqa: PLR2004
                raise ValueError(
                    f'The lattice does not close: {name} must be an '
                    f'integer. Got step={self.step} and upper={self.upper}.',
                )
        return self

    @property
    def divisions(self) -> int:
        """Number of steps `K = 1 / step` between 0 and 1."""
        return round(1 / self.step)

    @property
    def box_divisions(self) -> int:
        """Number of steps between 0 and `upper`."""
        return round(self.upper / self.step)


@dataclasses.dataclass(frozen=True, eq=False)
class EnsembleResult:
    """Combined predictions of an ensemble.

    Attributes:
        weights: Weights applied to each model.
        combined: `N x C` weighted sum of the model probabilities.
        labels: Row-wise argmax of `combined` (lowest index on ties).
        accuracy: Percent of correct labels when true labels were given.
    """

    weights: WeightVector
    combined: Array
    labels: IntArray
    accuracy: float | None = None

    @property
    def normalized(self) -> Array:
        """`combined` divided by the weight sum (rows sum to one)."""
        return self.combined / self.weights.total
