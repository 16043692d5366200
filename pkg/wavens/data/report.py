"""Evaluation report files.

[`emit_report()`][wavens.data.report.emit_report] writes into an output
directory:

* `report.json`: the full-precision evaluation (plus the pairwise sweep and
  tuned weights when given). Keys are sorted and no timestamps are
  written, so identical inputs give byte-identical files.
* `tables.csv`: per-class precision, recall, F1, and support with the
  macro average and accuracy.
* `ensembles.csv`: precision, recall, F1, and accuracy of each ensemble.
* `weights.json`: mapping of model name to tuned weight.
* `grid_trace.csv`: every evaluated weight vector (`wt1..wtM,acc`).
* `roc_micro.csv` and `roc_<class>.csv`: `fpr,tpr` point lists.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import pathlib
import re
from typing import Any
from typing import Sequence

from wavens.ensemble.combine import SweepRow
from wavens.ensemble.search import TraceRow
from wavens.ensemble.search import write_trace_csv
from wavens.ensemble.types import GridSpec
from wavens.errors import FormatError
from wavens.metrics import ClassMetrics
from wavens.metrics import ConfusionMatrix
from wavens.metrics import EvalReport
from wavens.metrics import RocCurve

logger = logging.getLogger(__name__)

REPORT_FORMAT_VERSION = 1
"""Version of `report.json`."""
WEIGHTS_FORMAT_VERSION = 1
"""Version of `weights.json` (recorded in `report.json`)."""
MACRO_ROW = 'Macro Avg.'


@dataclasses.dataclass(frozen=True)
class TunedWeights:
    """Grid-search outcome to persist.

    Attributes:
        model_names: Model of each weight.
        weights: Tuned weight of each model.
        accuracy: Tuning-set accuracy of the weights in percent.
        index: Lattice index of the weights.
        spec: Searched lattice.
    """

    model_names: tuple[str, ...]
    weights: tuple[float, ...]
    accuracy: float
    index: int
    spec: GridSpec

    def mapping(self) -> dict[str, float]:
        """Model name to weight, in model order."""
        return dict(zip(self.model_names, self.weights))


def _percent(value: float, round_percent: bool) -> str:
    return str(round(value)) if round_percent else repr(value)


def _roc_to_dict(curve: RocCurve) -> dict[str, Any]:
    return {'auc': curve.auc, 'fpr': list(curve.fpr), 'tpr': list(curve.tpr)}


def _roc_from_dict(data: dict[str, Any]) -> RocCurve:
    return RocCurve(
        fpr=tuple(float(v) for v in data['fpr']),
        tpr=tuple(float(v) for v in data['tpr']),
        auc=float(data['auc']),
    )


def report_to_dict(report: EvalReport) -> dict[str, Any]:
    """Encode an evaluation report as a JSON-compatible document."""
    metrics = report.per_class
    return {
        'class_names': list(report.class_names),
        'num_samples': report.num_samples,
        'accuracy': report.accuracy,
        'macro': {
            'precision': report.macro_precision,
            'recall': report.macro_recall,
            'f1': report.macro_f1,
        },
        'confusion': [list(row) for row in report.confusion.counts],
        'per_class': {
            name: {
                'precision': metrics.precision[i],
                'recall': metrics.recall[i],
                'f1': metrics.f1[i],
                'support': metrics.support[i],
                'zero_division': metrics.zero_division[i],
            }
            for i, name in enumerate(metrics.class_names)
        },
        'roc': {name: _roc_to_dict(c) for name, c in report.roc.items()},
        'roc_micro': _roc_to_dict(report.roc_micro),
    }


def report_from_dict(data: dict[str, Any]) -> EvalReport:
    """Decode a document produced by [`report_to_dict()`][wavens.data.report.report_to_dict]."""  # noqa: E501
    names = tuple(data['class_names'])
    per_class = data['per_class']
    return EvalReport(
        confusion=ConfusionMatrix(
            class_names=names,
            counts=tuple(
                tuple(int(v) for v in row) for row in data['confusion']
            ),
        ),
        per_class=ClassMetrics(
            class_names=names,
            precision=tuple(float(per_class[n]['precision']) for n in names),
            recall=tuple(float(per_class[n]['recall']) for n in names),
            f1=tuple(float(per_class[n]['f1']) for n in names),
            support=tuple(int(per_class[n]['support']) for n in names),
            zero_division=tuple(
                bool(per_class[n]['zero_division']) for n in names
            ),
        ),
        macro_precision=float(data['macro']['precision']),
        macro_recall=float(data['macro']['recall']),
        macro_f1=float(data['macro']['f1']),
        accuracy=float(data['accuracy']),
        roc={
            name: _roc_from_dict(curve)
            for name, curve in data['roc'].items()
        },
        roc_micro=_roc_from_dict(data['roc_micro']),
    )


def _sweep_to_dict(rows: Sequence[SweepRow]) -> list[dict[str, Any]]:
    return [
        {
            'name': row.name,
            'models': list(row.subset),
            'precision': row.report.macro_precision,
            'recall': row.report.macro_recall,
            'f1': row.report.macro_f1,
            'accuracy': row.report.accuracy,
        }
        for row in rows
    ]


def _write_json(path: pathlib.Path, data: Any) -> None:
    with open(path, 'w') as f:
        json.dump(data, f, indent=4, sort_keys=True)
        f.write('\n')


def weights_json(tuned: TunedWeights) -> str:
    """Compact `weights.json` text (e.g., `{"DenseNet169":0.4}`)."""
    return json.dumps(tuned.mapping(), separators=(',', ':'))


def write_class_table(
    path: pathlib.Path,
    report: EvalReport,
    round_percent: bool = False,
) -> None:
    """Write the per-class table with the accuracy on the first row."""
    metrics = report.per_class
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(
            ['class', 'precision', 'recall', 'f1', 'support', 'accuracy'],
        )
        for i, name in enumerate(metrics.class_names):
            writer.writerow(
                [
                    name,
                    _percent(metrics.precision[i], round_percent),
                    _percent(metrics.recall[i], round_percent),
                    _percent(metrics.f1[i], round_percent),
                    metrics.support[i],
                    _percent(report.accuracy, round_percent)
                    if i == 0
                    else '',
                ],
            )
        writer.writerow(
            [
                MACRO_ROW,
                _percent(report.macro_precision, round_percent),
                _percent(report.macro_recall, round_percent),
                _percent(report.macro_f1, round_percent),
                report.num_samples,
                '',
            ],
        )


def write_ensemble_table(
    path: pathlib.Path,
    rows: Sequence[tuple[str, EvalReport]],
    round_percent: bool = False,
) -> None:
    """Write one `model,precision,recall,f1,accuracy` row per ensemble."""
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['model', 'precision', 'recall', 'f1', 'accuracy'])
        for name, report in rows:
            writer.writerow(
                [
                    name,
                    _percent(report.macro_precision, round_percent),
                    _percent(report.macro_recall, round_percent),
                    _percent(report.macro_f1, round_percent),
                    _percent(report.accuracy, round_percent),
                ],
            )


def write_roc_csv(path: pathlib.Path, curve: RocCurve) -> None:
    """Write an `fpr,tpr` point list."""
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['fpr', 'tpr'])
        writer.writerows((repr(x), repr(y)) for x, y in curve.points)


def roc_filename(class_name: str) -> str:
    """File name of a class's ROC curve with unsafe characters replaced."""
    return f'roc_{re.sub(r"[^A-Za-z0-9_.-]", "_", class_name)}.csv'


def emit_report(
    report: EvalReport,
    out_dir: pathlib.Path | str,
    *,
    trace: Sequence[TraceRow] | None = None,
    tuned: TunedWeights | None = None,
    sweep: Sequence[SweepRow] | None = None,
    tuned_report: EvalReport | None = None,
    round_percent: bool = False,
) -> list[pathlib.Path]:
    """Write the report files of an evaluation.

    Args:
        report: Evaluation to write.
        out_dir: Output directory (created if missing).
        trace: Grid-search trace. Requires `tuned` when empty.
        tuned: Tuned weights written to `weights.json`.
        sweep: Pairwise ensemble sweep written to `ensembles.csv`.
        tuned_report: Evaluation of the tuned ensemble appended as the last
            `ensembles.csv` row.
        round_percent: Round percentages to integers in the CSV tables.
            `report.json` always keeps full precision.

    Returns:
        Paths of the written files.

    Raises:
        OSError: If a file cannot be written.
    """
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[pathlib.Path] = []

    document: dict[str, Any] = {
        'format_version': REPORT_FORMAT_VERSION,
        'round_percent': round_percent,
        'evaluation': report_to_dict(report),
    }
    if sweep is not None:
        document['sweep'] = _sweep_to_dict(sweep)
    if tuned is not None:
        document['tuned'] = {
            'weights_format_version': WEIGHTS_FORMAT_VERSION,
            'model_names': list(tuned.model_names),
            'weights': list(tuned.weights),
            'accuracy': tuned.accuracy,
            'lattice_index': tuned.index,
            'lattice': tuned.spec.model_dump(),
        }
        if trace is not None:
            document['tuned']['trace_indices'] = [row.index for row in trace]
        if tuned_report is not None:
            document['tuned']['evaluation'] = report_to_dict(tuned_report)

    path = out_dir / 'report.json'
    _write_json(path, document)
    written.append(path)

    path = out_dir / 'tables.csv'
    write_class_table(path, report, round_percent)
    written.append(path)

    if sweep is not None or tuned_report is not None:
        rows = [(row.name, row.report) for row in sweep or ()]
        if tuned_report is not None:
            rows.append(('weighted average (tuned)', tuned_report))
        path = out_dir / 'ensembles.csv'
        write_ensemble_table(path, rows, round_percent)
        written.append(path)

    if tuned is not None:
        path = out_dir / 'weights.json'
        path.write_text(weights_json(tuned) + '\n')
        written.append(path)

    if trace is not None:
        if tuned is not None:
            num_models = len(tuned.model_names)
        elif len(trace) > 0:
            num_models = len(trace[0].weights)
        else:
            raise ValueError(
                'The number of models of an empty trace is unknown.',
            )
        path = out_dir / 'grid_trace.csv'
        write_trace_csv(path, trace, num_models)
        written.append(path)

    path = out_dir / 'roc_micro.csv'
    write_roc_csv(path, report.roc_micro)
    written.append(path)
    for name, curve in report.roc.items():
        path = out_dir / roc_filename(name)
        write_roc_csv(path, curve)
        written.append(path)

    logger.debug(f'wrote {len(written)} report file(s) to {out_dir}')
    return written


def load_report(filepath: pathlib.Path | str) -> EvalReport:
    """Rebuild the evaluation stored in a `report.json`.

    Raises:
        FormatError: If the file is not a valid report.
    """
    try:
        with open(filepath) as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(filepath, f'not valid JSON ({e})') from e
    try:
        if document['format_version'] != REPORT_FORMAT_VERSION:
            raise FormatError(
                filepath,
                f'unsupported format version {document["format_version"]}',
            )
        return report_from_dict(document['evaluation'])
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(filepath, f'invalid report ({e})') from e


def load_weights(filepath: pathlib.Path | str) -> dict[str, float]:
    """Read a `weights.json` mapping.

    Raises:
        FormatError: If the file is not a mapping of names to numbers.
    """
    try:
        with open(filepath) as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(filepath, f'not valid JSON ({e})') from e
    if not isinstance(data, dict) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool)
        for v in data.values()
    ):
        raise FormatError(filepath, 'expected a mapping of model to weight')
    return {str(k): float(v) for k, v in data.items()}
