"""Synthetic prediction sets and feature manifests.

These stand in for the outputs of real backbone models so the ensemble and
head pipelines can be exercised without images.
"""

from __future__ import annotations

from typing import Sequence

import numpy

from wavens.data.manifest import DatasetManifest
from wavens.data.manifest import ManifestRecord
from wavens.ensemble.types import PredictionSet
from wavens.errors import InfeasibleTargetError
from wavens.errors import ShapeError
from wavens.numerics import IntArray
from wavens.numerics import SeededRng
from wavens.numerics import softmax

DEFAULT_MODEL_NAMES = (
    'EfficientNetB0',
    'InceptionResNetV2',
    'DenseNet169',
    'InceptionV3',
    'Xception',
    'DenseNet201',
    'ResNet152V2',
)
"""Backbone names in tuned-weights order."""
DEFAULT_CLASS_NAMES = ('Healthy', 'Mosaic', 'RedRot', 'Rust', 'Yellow')
"""Sugarcane leaf classes."""
DEFAULT_CLASS_COUNTS = (520, 514, 519, 505, 511)
"""Images per class of the reference leaf dataset."""
DEFAULT_TARGETS = (0.93, 0.95, 0.96, 0.94, 0.95, 0.97, 0.98)
"""Default per-model accuracy targets."""


def sample_id(index: int) -> str:
    """Sample id of the `index`-th synthetic sample."""
    return f's{index:06d}'


def _names(
    names: Sequence[str] | None,
    default: Sequence[str],
    count: int,
    prefix: str,
) -> tuple[str, ...]:
    if names is not None:
        if len(names) != count:
            raise ShapeError(
                f'expected one {prefix} name per {prefix}',
                expected=(count,),
                actual=(len(names),),
            )
        return tuple(names)
    if count <= len(default):
        return tuple(default[:count])
    return tuple(f'{prefix}_{i}' for i in range(count))


def synth_fixture(
    num_models: int,
    num_samples: int,
    num_classes: int,
    targets: Sequence[float],
    seed: int,
    *,
    model_names: Sequence[str] | None = None,
    class_names: Sequence[str] | None = None,
    temperature: float = 1.0,
    margin: float = 0.5,
) -> tuple[PredictionSet, IntArray]:
    """Generate model predictions with approximate accuracy targets.

    True labels are uniform over the classes. For each model (with its own
    child random stream, so errors are independent across models) every
    sample picks its predicted class: the true class with probability
    `target`, otherwise a uniformly random wrong class. Gaussian logits are
    drawn, the predicted class is raised above the maximum by `margin`
    plus an exponential gap, and the logits are divided by `temperature`
    and softmaxed. The argmax is therefore exactly the predicted class.

    Args:
        num_models: Number of models `M`.
        num_samples: Number of samples `N`.
        num_classes: Number of classes `C` (at least 2).
        targets: Accuracy target of each model in `(1/C, 1]`.
        seed: Random seed.
        model_names: Model names (default: backbone names, then `model_<i>`).
        class_names: Class names (default: leaf classes, then `class_<i>`).
        temperature: Softmax temperature; higher values give less confident
            rows.
        margin: Minimum logit gap of the predicted class.

    Returns:
        Prediction set with sample ids and the true labels.

    Raises:
        InfeasibleTargetError: If a target is outside of `(1/C, 1]`.
    """
    if num_models < 1 or num_samples < 1 or num_classes < 2:  # noqa: PLR2004
        raise ValueError(
            'Expected at least one model and sample and two classes. Got '
            f'M={num_models}, N={num_samples}, C={num_classes}.',
        )
    if len(targets) != num_models:
        raise ShapeError(
            'expected one accuracy target per model',
            expected=(num_models,),
            actual=(len(targets),),
        )
    for target in targets:
        if not 1 / num_classes < target <= 1:
            raise InfeasibleTargetError(
                f'Accuracy target {target} is outside of '
                f'(1/{num_classes}, 1].',
            )
    if temperature <= 0 or margin <= 0:
        raise ValueError('Temperature and margin must be positive.')

    rng = SeededRng(seed)
    labels = rng.child(0).integers(0, num_classes, num_samples)
    rows = numpy.arange(num_samples)
    probs = numpy.empty((num_models, num_samples, num_classes))

    for m, target in enumerate(targets):
        model_rng = rng.child(m + 1)
        correct = model_rng.random(num_samples) < target
        offset = model_rng.integers(1, num_classes, num_samples)
        chosen = numpy.where(correct, labels, (labels + offset) % num_classes)
        logits = model_rng.normal(0.0, 1.0, (num_samples, num_classes))
        gap = margin + model_rng.exponential(1.0, num_samples)
        logits[rows, chosen] = logits.max(axis=1) + gap
        probs[m] = softmax(logits / temperature, axis=1)

    preds = PredictionSet(
        model_names=_names(
            model_names,
            DEFAULT_MODEL_NAMES,
            num_models,
            'model',
        ),
        class_names=_names(
            class_names,
            DEFAULT_CLASS_NAMES,
            num_classes,
            'class',
        ),
        probs=probs,
        sample_ids=tuple(sample_id(i) for i in range(num_samples)),
    )
    return preds, labels.astype(numpy.int64)


def scaled_class_counts(num_samples: int, num_classes: int) -> list[int]:
    """Split `num_samples` across classes in the reference proportions.

    Classes beyond the reference five get an even share. Remainders go to
    the first classes.
    """
    base = (
        list(DEFAULT_CLASS_COUNTS)
        if num_classes == len(DEFAULT_CLASS_COUNTS)
        else [1] * num_classes
    )
    total = sum(base)
    counts = [num_samples * b // total for b in base]
    for i in range(num_samples - sum(counts)):
        counts[i % num_classes] += 1
    return counts


def synth_manifest(
    class_counts: Sequence[int],
    feature_dim: int,
    seed: int,
    *,
    class_names: Sequence[str] | None = None,
    separation: float = 3.0,
) -> DatasetManifest:
    """Generate a manifest of class-clustered Gaussian feature vectors.

    Each class gets a random center with standard deviation `separation`;
    its samples are the center plus unit Gaussian noise. Records are
    interleaved in a seeded random order.

    Raises:
        ValueError: If a count is negative or `feature_dim < 1`.
    """
    if feature_dim < 1 or any(count < 0 for count in class_counts):
        raise ValueError(
            'Expected feature_dim >= 1 and non-negative class counts.',
        )
    names = _names(
        class_names,
        DEFAULT_CLASS_NAMES,
        len(class_counts),
        'class',
    )
    rng = SeededRng(seed)
    centers = rng.child(0).normal(
        0.0,
        separation,
        (len(class_counts), feature_dim),
    )
    labels = numpy.repeat(numpy.arange(len(class_counts)), class_counts)
    noise = rng.child(1).normal(0.0, 1.0, (len(labels), feature_dim))
    features = centers[labels] + noise
    order = rng.child(2).permutation(len(labels))

    records = tuple(
        ManifestRecord(
            sample_id=sample_id(i),
            label=names[labels[j]],
            features=features[j],
        )
        for i, j in enumerate(order)
    )
    return DatasetManifest(
        class_names=names,
        records=records,
        feature_dim=feature_dim,
    )
