from __future__ import annotations

import pathlib

from wavens.commands.ensemble import EnsembleTuneCommand
from wavens.commands.evaluate import EvalCommand
from wavens.commands.synth import PREDICTIONS_DIR
from wavens.commands.synth import SynthCommand
from wavens.commands.synth import TEST_LABELS_FILENAME
from wavens.commands.synth import TUNE_LABELS_FILENAME
from wavens.data.report import load_report
from wavens.ensemble.types import GridSpec

OUTPUTS = ('report.json', 'weights.json', 'grid_trace.csv', 'combined.csv')


def _pipeline(root: pathlib.Path) -> None:
    SynthCommand(3, 120, 4, (0.7, 0.75, 0.8), seed=11).run(root / 'synth')
    predictions = sorted((root / 'synth' / PREDICTIONS_DIR).glob('*.csv'))
    EnsembleTuneCommand(
        predictions,
        root / 'synth' / TEST_LABELS_FILENAME,
        tune_split=root / 'synth' / TUNE_LABELS_FILENAME,
        spec=GridSpec(step=0.2),
    ).run(root / 'tune')
    EvalCommand(
        predictions,
        root / 'synth' / TEST_LABELS_FILENAME,
        weights=root / 'tune' / 'weights.json',
    ).run(root / 'eval')


def test_pipeline_is_reproducible(tmp_path: pathlib.Path) -> None:
    _pipeline(tmp_path / 'a')
    _pipeline(tmp_path / 'b')

    for filename in OUTPUTS:
        a = (tmp_path / 'a' / 'tune' / filename).read_bytes()
        b = (tmp_path / 'b' / 'tune' / filename).read_bytes()
        assert a == b
    a = (tmp_path / 'a' / 'eval' / 'report.json').read_bytes()
    b = (tmp_path / 'b' / 'eval' / 'report.json').read_bytes()
    assert a == b


def test_pipeline_eval_matches_tuned_report(tmp_path: pathlib.Path) -> None:
    _pipeline(tmp_path)
    tuned = load_report(tmp_path / 'tune' / 'report.json')
    evaluated = load_report(tmp_path / 'eval' / 'report.json')
    assert evaluated == tuned
