"""Slow, direct re-implementations used to check the library results."""

from __future__ import annotations

import itertools
import math
from typing import Callable
from typing import Sequence

import numpy

from wavens.numerics import Array


def lattice_count(num_models: int, divisions: int) -> int:
    """Stars-and-bars count of the simplex lattice."""
    return math.comb(divisions + num_models - 1, num_models - 1)


def brute_force_lattice(
    num_models: int,
    divisions: int,
) -> list[tuple[float, ...]]:
    """Every simplex lattice vector in lexicographic order."""
    return [
        tuple(c / divisions for c in counts)
        for counts in itertools.product(
            range(divisions + 1),
            repeat=num_models,
        )
        if sum(counts) == divisions
    ]


def oracle_accuracy(
    probs: Array,
    labels: Sequence[int],
    weights: Sequence[float],
) -> float:
    """Weighted-ensemble accuracy with plain Python floats."""
    num_models, num_samples, num_classes = probs.shape
    correct = 0
    for n in range(num_samples):
        best_class, best_score = 0, -math.inf
        for c in range(num_classes):
            score = weights[0] * float(probs[0, n, c])
            for m in range(1, num_models):
                score = score + weights[m] * float(probs[m, n, c])
            if score > best_score:
                best_class, best_score = c, score
        correct += int(best_class == labels[n])
    return 100.0 * correct / num_samples


def brute_force_search(
    probs: Array,
    labels: Sequence[int],
    divisions: int,
) -> tuple[tuple[float, ...], float]:
    """Best simplex lattice vector (first on ties) and its accuracy."""
    best: tuple[float, ...] | None = None
    best_accuracy = -1.0
    for weights in brute_force_lattice(probs.shape[0], divisions):
        acc = oracle_accuracy(probs, labels, weights)
        if acc > best_accuracy:
            best, best_accuracy = weights, acc
    assert best is not None
    return best, best_accuracy


def class_metrics(
    true_labels: Sequence[int],
    predicted_labels: Sequence[int],
    num_classes: int,
) -> list[tuple[float, float, float]]:
    """Per-class `(precision, recall, f1)` percentages by counting pairs."""
    pairs = list(zip(true_labels, predicted_labels))
    result = []
    for c in range(num_classes):
        tp = sum(1 for t, p in pairs if t == c and p == c)
        fp = sum(1 for t, p in pairs if t != c and p == c)
        fn = sum(1 for t, p in pairs if t == c and p != c)
        precision = 100.0 * tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = 100.0 * tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        result.append((precision, recall, f1))
    return result


def pair_counting_auc(
    scores: Sequence[float],
    positive: Sequence[bool],
) -> float:
    """Share of positive/negative pairs ranked correctly (ties count 1/2)."""
    pos = [s for s, p in zip(scores, positive) if p]
    neg = [s for s, p in zip(scores, positive) if not p]
    total = 0.0
    for a in pos:
        for b in neg:
            if a > b:
                total += 1.0
            elif a == b:
                total += 0.5
    return total / (len(pos) * len(neg))


def numeric_gradient(
    func: Callable[[], float],
    array: Array,
    eps: float = 1e-6,
) -> Array:
    """Central-difference gradient of `func` with respect to `array`.

    Entries of `array` are perturbed in place and restored.
    """
    grad = numpy.zeros_like(array)
    it = numpy.nditer(array, flags=['multi_index'])
    for _ in it:
        index = it.multi_index
        original = array[index]
        array[index] = original + eps
        upper = func()
        array[index] = original - eps
        lower = func()
        array[index] = original
        grad[index] = (upper - lower) / (2 * eps)
    return grad
