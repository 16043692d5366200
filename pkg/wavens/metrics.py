"""Multiclass evaluation metrics.

Percentages (accuracy, precision, recall, F1) are reported in `[0, 100]`
with full precision. All functions are pure.
"""

from __future__ import annotations

import dataclasses
import logging
from typing import Sequence

import numpy

from wavens.errors import DegenerateClassError
from wavens.errors import EmptyInputError
from wavens.errors import LabelRangeError
from wavens.errors import ShapeError
from wavens.numerics import Array
from wavens.numerics import IntArray
from wavens.numerics import one_hot
from wavens.numerics import row_argmax

logger = logging.getLogger(__name__)

# numpy 2 renamed trapz to trapezoid.
_trapezoid = getattr(numpy, 'trapezoid', None) or numpy.trapz


@dataclasses.dataclass(frozen=True)
class ConfusionMatrix:
    """Confusion counts with rows as true and columns as predicted classes."""

    class_names: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    @property
    def array(self) -> IntArray:
        """Counts as a `C x C` integer matrix."""
        size = len(self.class_names)
        return numpy.array(self.counts, dtype=numpy.int64).reshape(size, size)

    @property
    def total(self) -> int:
        """Number of evaluated samples."""
        return int(self.array.sum())

    @property
    def supports(self) -> tuple[int, ...]:
        """Row sums (true samples per class)."""
        return tuple(int(s) for s in self.array.sum(axis=1))


@dataclasses.dataclass(frozen=True)
class ClassMetrics:
    """Per-class precision, recall, and F1 in percent.

    Attributes:
        class_names: Class names.
        precision: Precision of each class.
        recall: Recall of each class.
        f1: F1 score of each class.
        support: True samples of each class.
        zero_division: Whether precision or recall of the class had a zero
            denominator and was reported as 0.
    """

    class_names: tuple[str, ...]
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f1: tuple[float, ...]
    support: tuple[int, ...]
    zero_division: tuple[bool, ...]


@dataclasses.dataclass(frozen=True)
class RocCurve:
    """ROC curve from `(0, 0)` to `(1, 1)` and its trapezoidal area."""

    fpr: tuple[float, ...]
    tpr: tuple[float, ...]
    auc: float

    @property
    def points(self) -> list[tuple[float, float]]:
        """`(fpr, tpr)` pairs in sweep order."""
        return list(zip(self.fpr, self.tpr))


@dataclasses.dataclass(frozen=True)
class EvalReport:
    """Evaluation of one set of class scores against true labels.

    Attributes:
        confusion: Confusion matrix.
        per_class: Per-class metrics.
        macro_precision: Unweighted mean of per-class precision.
        macro_recall: Unweighted mean of per-class recall.
        macro_f1: Unweighted mean of per-class F1.
        accuracy: `100 * trace / total`.
        roc: One-vs-rest ROC curve per class name. Classes without both
            positive and negative samples are omitted.
        roc_micro: Micro-average ROC curve.
    """

    confusion: ConfusionMatrix
    per_class: ClassMetrics
    macro_precision: float
    macro_recall: float
    macro_f1: float
    accuracy: float
    roc: dict[str, RocCurve]
    roc_micro: RocCurve

    @property
    def class_names(self) -> tuple[str, ...]:
        """Class names."""
        return self.confusion.class_names

    @property
    def num_samples(self) -> int:
        """Number of evaluated samples."""
        return self.confusion.total


def _labels(values: Sequence[int] | IntArray, name: str) -> IntArray:
    labels = numpy.asarray(values, dtype=numpy.int64)
    if labels.ndim != 1:
        raise ShapeError(
            f'{name} must be a vector',
            expected=('samples',),
            actual=labels.shape,
        )
    return labels


def _check_range(labels: IntArray, num_classes: int) -> None:
    bad = labels[(labels < 0) | (labels >= num_classes)]
    if bad.size > 0:
        raise LabelRangeError(int(bad[0]), num_classes)


def _default_names(num_classes: int) -> tuple[str, ...]:
    return tuple(f'class_{i}' for i in range(num_classes))


def confusion(
    true_labels: Sequence[int] | IntArray,
    predicted_labels: Sequence[int] | IntArray,
    num_classes: int,
    class_names: Sequence[str] | None = None,
) -> ConfusionMatrix:
    """Count `(true, predicted)` label pairs.

    Args:
        true_labels: True class indices.
        predicted_labels: Predicted class indices.
        num_classes: Number of classes `C`.
        class_names: Optional class names (default `class_<i>`).

    Returns:
        Confusion matrix where `counts[t][p]` is the number of samples with
        true label `t` predicted as `p`.

    Raises:
        ShapeError: If the label vectors differ in length.
        LabelRangeError: If a label is outside of `[0, C)`.
    """
    truth = _labels(true_labels, 'true labels')
    pred = _labels(predicted_labels, 'predicted labels')
    if truth.shape != pred.shape:
        raise ShapeError(
            'true and predicted labels differ in length',
            expected=truth.shape,
            actual=pred.shape,
        )
    names = (
        _default_names(num_classes)
        if class_names is None
        else tuple(class_names)
    )
    if len(names) != num_classes:
        raise ShapeError(
            'class names do not match the number of classes',
            expected=(num_classes,),
            actual=(len(names),),
        )
    _check_range(truth, num_classes)
    _check_range(pred, num_classes)

    flat = numpy.bincount(
        truth * num_classes + pred,
        minlength=num_classes * num_classes,
    )
    counts = flat.reshape(num_classes, num_classes)
    return ConfusionMatrix(
        class_names=names,
        counts=tuple(tuple(int(c) for c in row) for row in counts),
    )


def _ratio(numerator: int, denominator: int) -> tuple[float, bool]:
    if denominator == 0:
        return 0.0, True
    return 100.0 * numerator / denominator, False


def per_class_metrics(cm: ConfusionMatrix) -> ClassMetrics:
    """One-vs-rest precision, recall, and F1 of every class.

    A zero denominator reports 0 and sets the class's `zero_division` flag.
    """
    counts = cm.array
    precision, recall, f1, flags = [], [], [], []
    for c in range(len(cm.class_names)):
        tp = int(counts[c, c])
        fp = int(counts[:, c].sum()) - tp
        fn = int(counts[c, :].sum()) - tp
        p, p_undefined = _ratio(tp, tp + fp)
        r, r_undefined = _ratio(tp, tp + fn)
        precision.append(p)
        recall.append(r)
        f1.append(0.0 if p + r == 0 else 2 * p * r / (p + r))
        flags.append(p_undefined or r_undefined)
    return ClassMetrics(
        class_names=cm.class_names,
        precision=tuple(precision),
        recall=tuple(recall),
        f1=tuple(f1),
        support=cm.supports,
        zero_division=tuple(flags),
    )


def accuracy(cm: ConfusionMatrix) -> float:
    """Percent of samples on the diagonal.

    Raises:
        EmptyInputError: If the matrix counts no samples.
    """
    counts = cm.array
    total = int(counts.sum())
    if total == 0:
        raise EmptyInputError('confusion matrix')
    return 100.0 * int(numpy.trace(counts)) / total


def macro_average(metrics: ClassMetrics) -> tuple[float, float, float]:
    """Unweighted mean of `(precision, recall, f1)` over classes."""
    return (
        float(numpy.mean(metrics.precision)),
        float(numpy.mean(metrics.recall)),
        float(numpy.mean(metrics.f1)),
    )


def _roc(scores: Array, positive: numpy.ndarray) -> RocCurve:
    order = numpy.argsort(-scores, kind='stable')
    sorted_scores = scores[order]
    hits = positive[order].astype(numpy.int64)

    # Last index of each group of tied scores.
    ends = numpy.flatnonzero(numpy.diff(sorted_scores))
    ends = numpy.append(ends, len(sorted_scores) - 1)

    tps = numpy.cumsum(hits)[ends]
    fps = ends + 1 - tps
    tpr = numpy.concatenate(([0.0], tps / tps[-1]))
    fpr = numpy.concatenate(([0.0], fps / fps[-1]))
    return RocCurve(
        fpr=tuple(float(v) for v in fpr),
        tpr=tuple(float(v) for v in tpr),
        auc=float(_trapezoid(tpr, fpr)),
    )


def _check_scores(scores: Array, labels: IntArray) -> None:
    if scores.ndim != 2 or scores.shape[0] != labels.shape[0]:  # noqa: PLR2004
        raise ShapeError(
            'scores must be a matrix with one row per label',
            expected=(labels.shape[0], 'classes'),
            actual=scores.shape,
        )
    if scores.shape[0] == 0:
        raise EmptyInputError('score matrix')
    _check_range(labels, scores.shape[1])


def roc_one_vs_rest(
    scores: Array,
    true_labels: Sequence[int] | IntArray,
    class_index: int,
) -> RocCurve:
    """ROC curve of one class against all others.

    Thresholds sweep the distinct scores of column `class_index` in
    descending order. Samples sharing a score move the curve in a single
    step, so the area equals the fraction of positive/negative pairs ranked
    correctly with ties counted as one half.

    Raises:
        DegenerateClassError: If the class has no positive or no negative
            samples.
    """
    labels = _labels(true_labels, 'true labels')
    scores = numpy.asarray(scores, dtype=numpy.float64)
    _check_scores(scores, labels)
    positive = labels == class_index
    positives = int(positive.sum())
    negatives = len(labels) - positives
    if positives == 0 or negatives == 0:
        raise DegenerateClassError(class_index, positives, negatives)
    return _roc(scores[:, class_index], positive)


def roc_micro_average(
    scores: Array,
    true_labels: Sequence[int] | IntArray,
) -> RocCurve:
    """ROC curve over all `N * C` one-vs-rest decisions pooled together."""
    labels = _labels(true_labels, 'true labels')
    scores = numpy.asarray(scores, dtype=numpy.float64)
    _check_scores(scores, labels)
    if scores.shape[1] < 2:  # noqa: PLR2004
        raise ShapeError(
            'micro-average ROC needs at least two classes',
            expected=(scores.shape[0], '>=2'),
            actual=scores.shape,
        )
    positive = one_hot(labels, scores.shape[1]).ravel() > 0
    return _roc(scores.ravel(), positive)


def mean_squared_error(probs: Array, true_labels: IntArray) -> float:
    """Mean squared difference between probabilities and one-hot targets."""
    labels = _labels(true_labels, 'true labels')
    _check_scores(probs, labels)
    return float(numpy.mean((probs - one_hot(labels, probs.shape[1])) ** 2))


def evaluate(
    scores: Array,
    true_labels: Sequence[int] | IntArray,
    class_names: Sequence[str] | None = None,
) -> EvalReport:
    """Evaluate class scores against true labels.

    Predictions are the row-wise argmax of `scores` (lowest index on ties).

    Args:
        scores: `N x C` class scores (probabilities or any monotone
            transformation of them).
        true_labels: True class index of each row.
        class_names: Optional class names.

    Raises:
        EmptyInputError: If there are no samples.
        LabelRangeError: If a label is outside of `[0, C)`.
    """
    labels = _labels(true_labels, 'true labels')
    scores = numpy.asarray(scores, dtype=numpy.float64)
    _check_scores(scores, labels)
    num_classes = scores.shape[1]

    cm = confusion(labels, row_argmax(scores), num_classes, class_names)
    metrics = per_class_metrics(cm)
    macro_p, macro_r, macro_f1 = macro_average(metrics)

    roc: dict[str, RocCurve] = {}
    for c, name in enumerate(cm.class_names):
        try:
            roc[name] = roc_one_vs_rest(scores, labels, c)
        except DegenerateClassError as e:
            logger.warning(f'skipping roc curve of class {name}: {e}')

    return EvalReport(
        confusion=cm,
        per_class=metrics,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f1,
        accuracy=accuracy(cm),
        roc=roc,
        roc_micro=roc_micro_average(scores, labels),
    )
