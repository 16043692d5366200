from __future__ import annotations

import numpy
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st
from sklearn.metrics import roc_auc_score

from testing.oracles import class_metrics
from testing.oracles import pair_counting_auc
from wavens.errors import DegenerateClassError
from wavens.errors import EmptyInputError
from wavens.errors import LabelRangeError
from wavens.errors import ShapeError
from wavens.metrics import accuracy
from wavens.metrics import confusion
from wavens.metrics import evaluate
from wavens.metrics import macro_average
from wavens.metrics import mean_squared_error
from wavens.metrics import per_class_metrics
from wavens.metrics import roc_micro_average
from wavens.metrics import roc_one_vs_rest
from wavens.numerics import SeededRng


def test_confusion_counts() -> None:
    cm = confusion([0, 0, 1, 2, 2, 2], [0, 1, 1, 2, 0, 2], 3, 'abc')
    assert cm.class_names == ('a', 'b', 'c')
    assert cm.counts == ((1, 1, 0), (0, 1, 0), (1, 0, 2))
    assert cm.total == 6
    assert cm.supports == (2, 1, 3)
    assert accuracy(cm) == pytest.approx(100.0 * 4 / 6)


def test_confusion_validation() -> None:
    with pytest.raises(ShapeError, match='differ in length'):
        confusion([0, 1], [0], 2)
    with pytest.raises(LabelRangeError):
        confusion([0, 3], [0, 1], 3)
    with pytest.raises(ShapeError, match='class names'):
        confusion([0], [0], 2, ['a'])
    with pytest.raises(EmptyInputError):
        accuracy(confusion([], [], 2))


@pytest.mark.parametrize('seed', range(200))
def test_per_class_metrics_match_pair_counting(seed: int) -> None:
    rng = SeededRng(seed)
    num_classes = int(rng.integers(2, 6))
    num_samples = int(rng.integers(1, 40))
    truth = rng.integers(0, num_classes, size=num_samples)
    pred = rng.integers(0, num_classes, size=num_samples)

    metrics = per_class_metrics(confusion(truth, pred, num_classes))
    expected = class_metrics(list(truth), list(pred), num_classes)

    for c, (p, r, f1) in enumerate(expected):
        assert metrics.precision[c] == pytest.approx(p)
        assert metrics.recall[c] == pytest.approx(r)
        assert metrics.f1[c] == pytest.approx(f1)

    macro = macro_average(metrics)
    assert macro[0] == pytest.approx(numpy.mean([e[0] for e in expected]))
    assert macro[2] == pytest.approx(numpy.mean([e[2] for e in expected]))


def test_zero_division_is_flagged() -> None:
    # Class 2 is never predicted and never true.
    metrics = per_class_metrics(confusion([0, 1, 1], [0, 1, 0], 3))
    assert metrics.precision[2] == 0.0
    assert metrics.recall[2] == 0.0
    assert metrics.f1[2] == 0.0
    assert metrics.zero_division == (False, False, True)
    assert metrics.precision[0] == 50.0
    assert metrics.recall[1] == 50.0


def test_roc_pair_counting_example() -> None:
    scores = numpy.array([[0.9], [0.4], [0.6], [0.1]])
    curve = roc_one_vs_rest(
        numpy.hstack([scores, 1 - scores]),
        [0, 0, 1, 1],
        0,
    )
    assert curve.auc == pytest.approx(0.75)
    assert curve.points[0] == (0.0, 0.0)
    assert curve.points[-1] == (1.0, 1.0)


def test_roc_perfect_and_tied() -> None:
    scores = numpy.array([[0.9, 0.1], [0.8, 0.2], [0.3, 0.7], [0.2, 0.8]])
    labels = [0, 0, 1, 1]
    assert roc_one_vs_rest(scores, labels, 0).auc == pytest.approx(1.0)
    assert roc_one_vs_rest(scores, labels, 1).auc == pytest.approx(1.0)

    tied = numpy.full((4, 2), 0.5)
    curve = roc_one_vs_rest(tied, labels, 0)
    assert curve.auc == pytest.approx(0.5)
    assert curve.points == [(0.0, 0.0), (1.0, 1.0)]


def test_roc_degenerate_class() -> None:
    scores = numpy.full((3, 3), 1 / 3)
    with pytest.raises(DegenerateClassError) as exc_info:
        roc_one_vs_rest(scores, [0, 0, 1], 2)
    assert exc_info.value.positives == 0
    assert exc_info.value.negatives == 3


@pytest.mark.parametrize('seed', range(25))
def test_roc_matches_pair_counting(seed: int) -> None:
    rng = SeededRng(seed)
    num_samples = 30
    labels = numpy.arange(num_samples) % 3
    # Rounded scores create ties.
    scores = numpy.round(rng.random(size=(num_samples, 3)), 1)
    for c in range(3):
        positive = [int(label) == c for label in labels]
        curve = roc_one_vs_rest(scores, labels, c)
        assert curve.auc == pytest.approx(
            pair_counting_auc(list(scores[:, c]), positive),
        )
        expected = roc_auc_score(positive, scores[:, c])
        assert curve.auc == pytest.approx(expected)


def test_roc_micro_average() -> None:
    scores = numpy.array([[0.7, 0.2, 0.1], [0.2, 0.5, 0.3], [0.3, 0.3, 0.4]])
    labels = numpy.array([0, 1, 2])
    curve = roc_micro_average(scores, labels)
    flat_positive = [labels[n] == c for n in range(3) for c in range(3)]
    assert curve.auc == pytest.approx(
        pair_counting_auc(list(scores.ravel()), flat_positive),
    )

    with pytest.raises(ShapeError, match='two classes'):
        roc_micro_average(numpy.ones((2, 1)), [0, 0])


def test_mean_squared_error() -> None:
    probs = numpy.array([[1.0, 0.0], [0.5, 0.5]])
    assert mean_squared_error(probs, numpy.array([0, 1])) == pytest.approx(
        0.125,
    )


def test_evaluate_report() -> None:
    scores = numpy.array(
        [[0.8, 0.1, 0.1], [0.2, 0.7, 0.1], [0.3, 0.3, 0.4], [0.5, 0.4, 0.1]],
    )
    report = evaluate(scores, [0, 1, 2, 1], ['x', 'y', 'z'])
    assert report.class_names == ('x', 'y', 'z')
    assert report.num_samples == 4
    assert report.accuracy == 75.0
    assert set(report.roc) == {'x', 'y', 'z'}
    assert report.macro_recall == pytest.approx((100 + 50 + 100) / 3)


def test_evaluate_skips_degenerate_roc(
    caplog: pytest.LogCaptureFixture,
) -> None:
    scores = numpy.array([[0.8, 0.1, 0.1], [0.2, 0.7, 0.1]])
    report = evaluate(scores, [0, 1])
    assert set(report.roc) == {'class_0', 'class_1'}
    assert 'skipping roc curve of class class_2' in caplog.text


def test_evaluate_ties_pick_lowest_index() -> None:
    report = evaluate(numpy.full((2, 3), 1.0), [0, 1])
    assert report.confusion.counts[1] == (1, 0, 0)
    assert report.accuracy == 50.0


def test_evaluate_validation() -> None:
    with pytest.raises(ShapeError):
        evaluate(numpy.ones((3, 2)), [0, 1])
    with pytest.raises(EmptyInputError):
        evaluate(numpy.ones((0, 2)), [])
    with pytest.raises(LabelRangeError):
        evaluate(numpy.ones((2, 2)), [0, 2])


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**16),
    st.integers(min_value=2, max_value=5),
)
def test_evaluate_permutation_invariant(seed: int, num_classes: int) -> None:
    rng = SeededRng(seed)
    num_samples = 20
    scores = rng.random(size=(num_samples, num_classes))
    labels = numpy.arange(num_samples) % num_classes
    order = rng.permutation(num_samples)

    report = evaluate(scores, labels)
    shuffled = evaluate(scores[order], labels[order])
    assert shuffled.confusion == report.confusion
    assert shuffled.accuracy == report.accuracy
    assert shuffled.macro_f1 == pytest.approx(report.macro_f1)
    for name, curve in report.roc.items():
        assert shuffled.roc[name].auc == pytest.approx(curve.auc)
