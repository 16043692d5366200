"""Exhaustive grid search over ensemble weight lattices."""

from __future__ import annotations

import csv
import dataclasses
import itertools
import logging
import pathlib
from concurrent.futures import Executor
from typing import Iterator
from typing import Sequence

import numpy

from wavens.ensemble.combine import accumulate
from wavens.ensemble.types import GridSpec
from wavens.ensemble.types import PredictionSet
from wavens.ensemble.types import WeightVector
from wavens.errors import ShapeError
from wavens.logging import ProgressLog
from wavens.numerics import Array
from wavens.numerics import IntArray

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 256
"""Lattice points evaluated per task."""


@dataclasses.dataclass(frozen=True)
class LatticePoint:
    """Weight vector and its position in the lattice enumeration.

    For the box lattice, `index` counts every vector of the full product
    `{0, ..., upper}^M` (the skipped all-zero vector is position 0).
    """

    index: int
    weights: tuple[float, ...]


@dataclasses.dataclass(frozen=True)
class TraceRow:
    """Accuracy of one evaluated lattice point."""

    index: int
    weights: tuple[float, ...]
    accuracy: float


@dataclasses.dataclass(frozen=True)
class GridSearchResult:
    """Outcome of a grid search.

    Attributes:
        best: Weight vector with the highest accuracy. Ties go to the first
            vector in enumeration order.
        best_index: Lattice index of `best`.
        best_accuracy: Accuracy of `best` in percent.
        trace: Every evaluated lattice point in enumeration order.
    """

    best: WeightVector
    best_index: int
    best_accuracy: float
    trace: tuple[TraceRow, ...]


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def iter_weight_lattice(
    num_models: int,
    spec: GridSpec,
) -> Iterator[LatticePoint]:
    """Lazily enumerate the lattice in lexicographic order.

    Entries are computed as `count / K` with `K = 1 / step` so that, e.g.,
    `3 / 10` is exactly the float `0.3`.
    """
    if num_models < 1:
        raise ValueError(f'Expected at least one model. Got {num_models}.')
    k = spec.divisions
    if not spec.unconstrained:
        for index, counts in enumerate(_compositions(k, num_models)):
            yield LatticePoint(index, tuple(c / k for c in counts))
        return

    product = itertools.product(
        range(spec.box_divisions + 1),
        repeat=num_models,
    )
    for index, counts in enumerate(product):
        if any(counts):
            yield LatticePoint(index, tuple(c / k for c in counts))


def enumerate_weight_lattice(
    num_models: int,
    spec: GridSpec,
) -> list[WeightVector]:
    """All lattice weight vectors in lexicographic order.

    The simplex lattice has `comb(K + M - 1, M - 1)` vectors, each summing
    to one within `1e-9`.

    Example:
        ```python
        >>> enumerate_weight_lattice(2, GridSpec(step=0.5))
        [WeightVector(weights=(0.0, 1.0)), WeightVector(weights=(0.5, 0.5)), WeightVector(weights=(1.0, 0.0))]
        ```
    """  # noqa: E501
    return [
        WeightVector(point.weights)
        for point in iter_weight_lattice(num_models, spec)
    ]


def evaluate_chunk(weights: Array, probs: Array, labels: IntArray) -> Array:
    """Accuracy in percent of each row of `weights`."""
    combined = accumulate(weights, probs)
    predicted = numpy.argmax(combined, axis=2)
    correct = numpy.count_nonzero(predicted == labels[None, :], axis=1)
    return 100.0 * correct / len(labels)


def _chunks(
    points: Iterator[LatticePoint],
    size: int,
) -> Iterator[list[LatticePoint]]:
    while True:
        chunk = list(itertools.islice(points, size))
        if not chunk:
            return
        yield chunk


def grid_search_weights(
    preds: PredictionSet,
    labels: Sequence[int] | IntArray,
    spec: GridSpec,
    *,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> GridSearchResult:
    """Find the lattice weight vector with the highest ensemble accuracy.

    Every lattice point is evaluated with the same accumulation as
    [`weighted_combine()`][wavens.ensemble.combine.weighted_combine].
    Chunks may run on an `executor` but results are consumed in submission
    order, so the trace and the tie-break match a sequential search.

    Args:
        preds: Model predictions on the tuning set.
        labels: True labels of the tuning set.
        spec: Lattice specification.
        executor: Optional executor evaluating chunks concurrently.
        chunk_size: Lattice points per chunk.

    Raises:
        ShapeError: If `labels` does not have one entry per sample.
        ValueError: If the tuning set is empty.
    """
    truth = numpy.asarray(labels, dtype=numpy.int64)
    if truth.shape != (preds.num_samples,):
        raise ShapeError(
            'labels must have one entry per sample',
            expected=(preds.num_samples,),
            actual=truth.shape,
        )
    if preds.num_samples == 0:
        raise ValueError('Grid search needs at least one tuning sample.')
    if chunk_size < 1:
        raise ValueError(f'Chunk size must be positive. Got {chunk_size}.')

    chunks = list(
        _chunks(iter_weight_lattice(preds.num_models, spec), chunk_size),
    )
    matrices = [
        numpy.array([point.weights for point in chunk]) for chunk in chunks
    ]
    if executor is None:
        results = (
            evaluate_chunk(matrix, preds.probs, truth) for matrix in matrices
        )
    else:
        futures = [
            executor.submit(evaluate_chunk, matrix, preds.probs, truth)
            for matrix in matrices
        ]
        results = (future.result() for future in futures)

    trace: list[TraceRow] = []
    best: TraceRow | None = None
    progress = ProgressLog(logger, 'lattice chunks', len(chunks))
    for chunk, accuracies in zip(chunks, results):
        for point, acc in zip(chunk, accuracies):
            row = TraceRow(point.index, point.weights, float(acc))
            trace.append(row)
            if best is None or row.accuracy > best.accuracy:
                best = row
        assert best is not None
        progress.step(f'best accuracy so far {best.accuracy:.4f}')

    assert best is not None
    return GridSearchResult(
        best=WeightVector(best.weights),
        best_index=best.index,
        best_accuracy=best.accuracy,
        trace=tuple(trace),
    )


def format_weight(value: float) -> str:
    """Shortest round-tripping text of a weight (e.g., `0.1`, `0.4`)."""
    return repr(float(value))


def write_trace_csv(
    filepath: pathlib.Path | str,
    trace: Sequence[TraceRow],
    num_models: int,
) -> None:
    """Write a grid-search trace with header `wt1,...,wtM,acc`."""
    filepath = pathlib.Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(
            [*(f'wt{i}' for i in range(1, num_models + 1)), 'acc'],
        )
        for row in trace:
            writer.writerow(
                [*map(format_weight, row.weights), repr(row.accuracy)],
            )
