"""Prediction and label files.

A prediction file is a CSV with header `sample_id,<class names...>` and one
row per sample, plus a JSON sidecar with the same stem describing it:

```json
{
    "format_version": 1,
    "model_name": "DenseNet169",
    "class_names": ["Healthy", "Mosaic"],
    "num_samples": 757,
    "kind": "probabilities"
}
```

Rows of `probabilities` files must sum to one within `1e-6`. Rows of
`logits` files are passed through a softmax when loaded and rows of
`scores` files (non-negative, e.g., raw weighted ensemble sums) are divided
by their sum. Floats are written with `repr()` so values round-trip
exactly.

A labels file is a CSV with header `sample_id,label` where `label` is a
class name.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import pathlib
from typing import Any
from typing import Literal
from typing import Sequence

import numpy

from wavens.ensemble.types import PredictionSet
from wavens.ensemble.types import ROW_SUM_TOLERANCE
from wavens.errors import FormatError
from wavens.numerics import Array
from wavens.numerics import IntArray
from wavens.numerics import softmax

logger = logging.getLogger(__name__)

PREDICTION_FORMAT_VERSION = 1
"""Version of the prediction file sidecar."""

PredictionKind = Literal['probabilities', 'logits', 'scores']


@dataclasses.dataclass(frozen=True, eq=False)
class PredictionFile:
    """Contents of one model's prediction file.

    Attributes:
        model_name: Name of the model.
        class_names: Ordered class names (the CSV columns).
        sample_ids: Sample id of each row.
        probs: `N x C` probabilities (normalized on load unless stored
            as probabilities).
        kind: How the rows were stored.
    """

    model_name: str
    class_names: tuple[str, ...]
    sample_ids: tuple[str, ...]
    probs: Array
    kind: PredictionKind = 'probabilities'


def sidecar_path(filepath: pathlib.Path | str) -> pathlib.Path:
    """Path of the JSON sidecar of a prediction CSV."""
    return pathlib.Path(filepath).with_suffix('.json')


def write_prediction_file(
    filepath: pathlib.Path | str,
    model_name: str,
    class_names: Sequence[str],
    sample_ids: Sequence[str],
    rows: Array,
    kind: PredictionKind = 'probabilities',
) -> None:
    """Write a prediction CSV and its sidecar.

    Raises:
        ValueError: If `rows` is not `len(sample_ids) x len(class_names)`.
    """
    rows = numpy.asarray(rows, dtype=numpy.float64)
    if rows.shape != (len(sample_ids), len(class_names)):
        raise ValueError(
            f'Expected a {len(sample_ids)} x {len(class_names)} matrix. '
            f'Got shape {rows.shape}.',
        )
    filepath = pathlib.Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['sample_id', *class_names])
        for sample_id, row in zip(sample_ids, rows):
            writer.writerow([sample_id, *(repr(float(v)) for v in row)])

    header = {
        'format_version': PREDICTION_FORMAT_VERSION,
        'model_name': model_name,
        'class_names': list(class_names),
        'num_samples': len(sample_ids),
        'kind': kind,
    }
    with open(sidecar_path(filepath), 'w') as f:
        json.dump(header, f, indent=4)


def _read_sidecar(filepath: pathlib.Path) -> dict[str, Any]:
    path = sidecar_path(filepath)
    try:
        with open(path) as f:
            header = json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(path, f'not valid JSON ({e})') from e
    for key in ('format_version', 'model_name', 'class_names', 'num_samples'):
        if key not in header:
            raise FormatError(path, f'missing field "{key}"')
    if header['format_version'] != PREDICTION_FORMAT_VERSION:
        raise FormatError(
            path,
            f'unsupported format version {header["format_version"]}',
        )
    header.setdefault('kind', 'probabilities')
    if header['kind'] not in ('probabilities', 'logits', 'scores'):
        raise FormatError(path, f'unknown kind {header["kind"]!r}')
    return header


def read_prediction_file(filepath: pathlib.Path | str) -> PredictionFile:
    """Read a prediction CSV and its sidecar.

    Raises:
        FormatError: If the header, sidecar, or any row is invalid. Row
            errors cite the zero-indexed data row.
    """
    filepath = pathlib.Path(filepath)
    header = _read_sidecar(filepath)
    class_names = tuple(str(c) for c in header['class_names'])
    kind: PredictionKind = header['kind']

    with open(filepath, newline='') as f:
        reader = csv.reader(f)
        columns = next(reader, None)
        if columns is None or tuple(columns) != ('sample_id', *class_names):
            raise FormatError(
                filepath,
                f'header {columns} does not match sample_id + class names '
                f'{list(class_names)}',
            )
        sample_ids: list[str] = []
        values: list[list[float]] = []
        for row, fields in enumerate(reader):
            if len(fields) != len(class_names) + 1:
                raise FormatError(filepath, 'wrong number of fields', row)
            try:
                values.append([float(v) for v in fields[1:]])
            except ValueError as e:
                raise FormatError(filepath, str(e), row) from e
            sample_ids.append(fields[0])

    if len(sample_ids) != header['num_samples']:
        raise FormatError(
            filepath,
            f'found {len(sample_ids)} rows but the sidecar declares '
            f'{header["num_samples"]}',
        )
    if len(set(sample_ids)) != len(sample_ids):
        raise FormatError(filepath, 'sample ids are not unique')

    probs = numpy.array(values, dtype=numpy.float64).reshape(
        len(sample_ids),
        len(class_names),
    )
    finite = numpy.isfinite(probs).all(axis=1)
    if not finite.all():
        raise FormatError(
            filepath,
            'non-finite value',
            int(numpy.argmin(finite)),
        )

    if kind == 'logits':
        if len(sample_ids) > 0:
            probs = softmax(probs, axis=1)
    else:
        negative = (probs < 0).any(axis=1)
        if negative.any():
            raise FormatError(
                filepath,
                'negative probability',
                int(numpy.argmax(negative)),
            )
        if kind == 'scores':
            totals = probs.sum(axis=1, keepdims=True)
            if numpy.any(totals == 0):
                raise FormatError(
                    filepath,
                    'all-zero score row',
                    int(numpy.argmin(totals.ravel())),
                )
            probs = probs / totals
        deviation = numpy.abs(probs.sum(axis=1) - 1.0)
        bad = numpy.flatnonzero(deviation > ROW_SUM_TOLERANCE)
        if bad.size > 0:
            row = int(bad[0])
            raise FormatError(
                filepath,
                f'probabilities sum to {probs[row].sum()!r}, not 1',
                row,
            )

    return PredictionFile(
        model_name=str(header['model_name']),
        class_names=class_names,
        sample_ids=tuple(sample_ids),
        probs=probs,
        kind=kind,
    )


def load_predictions(paths: Sequence[pathlib.Path | str]) -> PredictionSet:
    """Assemble prediction files into a prediction set.

    Models are ordered as `paths`.

    Raises:
        FormatError: If a file is invalid or its class names or sample ids
            (including their order) differ from the first file.
    """
    if len(paths) == 0:
        raise ValueError('At least one prediction file is required.')
    files = [read_prediction_file(path) for path in paths]
    first = files[0]
    for path, file in zip(paths[1:], files[1:]):
        if file.class_names != first.class_names:
            raise FormatError(
                path,
                f'class names {list(file.class_names)} differ from '
                f'{list(first.class_names)} in {paths[0]}',
            )
        if file.sample_ids != first.sample_ids:
            mismatch = next(
                (
                    i
                    for i, (a, b) in enumerate(
                        zip(file.sample_ids, first.sample_ids),
                    )
                    if a != b
                ),
                min(len(file.sample_ids), len(first.sample_ids)),
            )
            raise FormatError(
                path,
                f'sample ids differ from {paths[0]} (order must match)',
                mismatch,
            )
    names = [file.model_name for file in files]
    if len(set(names)) != len(names):
        raise FormatError(paths[0], f'duplicate model names {names}')
    logger.debug(
        f'loaded {len(files)} prediction file(s) with '
        f'{len(first.sample_ids)} samples',
    )
    return PredictionSet(
        model_names=tuple(names),
        class_names=first.class_names,
        probs=numpy.stack([file.probs for file in files]),
        sample_ids=first.sample_ids,
    )


def write_labels(
    filepath: pathlib.Path | str,
    sample_ids: Sequence[str],
    labels: Sequence[str],
) -> None:
    """Write a labels CSV with header `sample_id,label`."""
    filepath = pathlib.Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['sample_id', 'label'])
        writer.writerows(zip(sample_ids, labels))


def read_labels(
    filepath: pathlib.Path | str,
    class_names: Sequence[str],
) -> tuple[tuple[str, ...], IntArray]:
    """Read a labels CSV.

    Returns:
        Sample ids and their label indices into `class_names`.

    Raises:
        FormatError: If the header is wrong, an id repeats, or a label is
            not one of `class_names`.
    """
    index = {name: i for i, name in enumerate(class_names)}
    ids: list[str] = []
    labels: list[int] = []
    with open(filepath, newline='') as f:
        reader = csv.reader(f)
        if next(reader, None) != ['sample_id', 'label']:
            raise FormatError(filepath, 'header must be "sample_id,label"')
        for row, fields in enumerate(reader):
            if len(fields) != 2:  # noqa: PLR2004
                raise FormatError(filepath, 'wrong number of fields', row)
            sample_id, label = fields
            if label not in index:
                raise FormatError(filepath, f'unknown label {label!r}', row)
            ids.append(sample_id)
            labels.append(index[label])
    if len(set(ids)) != len(ids):
        raise FormatError(filepath, 'sample ids are not unique')
    return tuple(ids), numpy.array(labels, dtype=numpy.int64)


def select_labeled(
    preds: PredictionSet,
    sample_ids: Sequence[str],
    source: pathlib.Path | str,
) -> PredictionSet:
    """Restrict predictions to `sample_ids`, in that order.

    Raises:
        FormatError: If `preds` has no sample ids or lacks one of
            `sample_ids` (reported against `source`).
    """
    if preds.sample_ids is None:
        raise FormatError(source, 'predictions carry no sample ids')
    position = {sample_id: i for i, sample_id in enumerate(preds.sample_ids)}
    missing = [s for s in sample_ids if s not in position]
    if missing:
        raise FormatError(
            source,
            f'{len(missing)} labeled sample(s) have no prediction, e.g. '
            f'{missing[0]!r}',
        )
    return preds.select_samples([position[s] for s in sample_ids])
