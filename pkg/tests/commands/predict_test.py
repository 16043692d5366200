from __future__ import annotations

import pathlib

import numpy
import pytest

from wavens.commands.predict import PredictCommand
from wavens.data.manifest import DatasetManifest
from wavens.data.manifest import save_manifest
from wavens.data.predictions import read_prediction_file
from wavens.data.predictions import write_labels
from wavens.errors import FormatError
from wavens.head.layers import Mode
from wavens.head.model import head_forward
from wavens.head.model import HeadConfig
from wavens.head.model import init_head
from wavens.head.serialize import save_head
from wavens.numerics import SeededRng


@pytest.fixture
def inputs(
    feature_manifest: DatasetManifest,
    tmp_path: pathlib.Path,
) -> tuple[pathlib.Path, pathlib.Path]:
    config = HeadConfig(input_dim=6, hidden_dims=(8, 8, 8), num_classes=3)
    params = init_head(config, SeededRng(0))
    head_file = tmp_path / 'head.json'
    manifest_file = tmp_path / 'manifest.json'
    save_head(head_file, params, config)
    save_manifest(manifest_file, feature_manifest)
    return head_file, manifest_file


def test_predict_every_sample(
    inputs: tuple[pathlib.Path, pathlib.Path],
    feature_manifest: DatasetManifest,
    tmp_path: pathlib.Path,
) -> None:
    head_file, manifest_file = inputs
    command = PredictCommand(head_file, manifest_file, model_name='mlp')
    command.run(tmp_path / 'run')
    command.close()

    loaded = read_prediction_file(tmp_path / 'run' / 'mlp.csv')
    assert loaded.model_name == 'mlp'
    assert loaded.class_names == feature_manifest.class_names
    assert loaded.sample_ids == feature_manifest.sample_ids

    config = HeadConfig(input_dim=6, hidden_dims=(8, 8, 8), num_classes=3)
    expected = head_forward(
        init_head(config, SeededRng(0)),
        config,
        feature_manifest.features(),
        Mode.EVAL,
    )
    assert numpy.array_equal(loaded.probs, expected)


def test_predict_selected_samples(
    inputs: tuple[pathlib.Path, pathlib.Path],
    feature_manifest: DatasetManifest,
    tmp_path: pathlib.Path,
) -> None:
    head_file, manifest_file = inputs
    records = [feature_manifest.records[i] for i in (5, 1, 9)]
    samples = tmp_path / 'samples.csv'
    write_labels(
        samples,
        [r.sample_id for r in records],
        [r.label for r in records],
    )
    PredictCommand(head_file, manifest_file, samples).run(tmp_path / 'run')

    loaded = read_prediction_file(tmp_path / 'run' / 'head.csv')
    assert loaded.sample_ids == tuple(r.sample_id for r in records)


def test_predict_errors(
    inputs: tuple[pathlib.Path, pathlib.Path],
    feature_manifest: DatasetManifest,
    tmp_path: pathlib.Path,
) -> None:
    head_file, manifest_file = inputs
    samples = tmp_path / 'samples.csv'
    write_labels(samples, ['missing'], [feature_manifest.class_names[0]])
    with pytest.raises(FormatError, match='not in the manifest'):
        PredictCommand(head_file, manifest_file, samples).run(tmp_path)

    config = HeadConfig(input_dim=6, hidden_dims=(8, 8, 8), num_classes=4)
    save_head(head_file, init_head(config, SeededRng(0)), config)
    with pytest.raises(FormatError, match='the head predicts 4'):
        PredictCommand(head_file, manifest_file).run(tmp_path)
