from __future__ import annotations

import json
import pathlib

import numpy
import pytest

from wavens.data.manifest import DatasetManifest
from wavens.data.manifest import load_manifest
from wavens.data.manifest import ManifestRecord
from wavens.data.manifest import preprocess_contract
from wavens.data.manifest import save_manifest
from wavens.data.manifest import split_dataset
from wavens.data.manifest import SplitSpec
from wavens.data.manifest import train_count
from wavens.data.synth import DEFAULT_CLASS_COUNTS
from wavens.data.synth import synth_manifest
from wavens.errors import FormatError
from wavens.errors import NonFiniteError
from wavens.errors import ShapeError
from wavens.errors import SplitError


def _manifest(counts: list[int]) -> DatasetManifest:
    names = tuple(f'c{i}' for i in range(len(counts)))
    records = []
    for c, count in enumerate(counts):
        records.extend(
            ManifestRecord(sample_id=f'c{c}-{i}', label=names[c])
            for i in range(count)
        )
    return DatasetManifest(class_names=names, records=tuple(records))


def test_manifest_validation() -> None:
    record = ManifestRecord(sample_id='a', label='x')
    with pytest.raises(ValueError, match='unique'):
        DatasetManifest(class_names=('x', 'x'), records=())
    with pytest.raises(ValueError, match='unique'):
        DatasetManifest(class_names=('x',), records=(record, record))
    with pytest.raises(ValueError, match='unknown label'):
        DatasetManifest(class_names=('y',), records=(record,))


def test_manifest_labels_and_features() -> None:
    manifest = synth_manifest([3, 2], feature_dim=4, seed=0)
    assert len(manifest) == 5
    assert sorted(manifest.labels().tolist()) == [0, 0, 0, 1, 1]
    assert manifest.features().shape == (5, 4)

    with pytest.raises(ShapeError, match='feature dimension'):
        _manifest([2]).features()


def test_preprocess_contract() -> None:
    manifest = DatasetManifest(class_names=('x',), records=(), feature_dim=3)
    vector = preprocess_contract(
        ManifestRecord('a', 'x', features=numpy.array([1.0, 2.0, 3.0])),
        manifest,
    )
    assert vector.tolist() == [1.0, 2.0, 3.0]

    with pytest.raises(ShapeError, match='no feature vector'):
        preprocess_contract(ManifestRecord('a', 'x'), manifest)
    with pytest.raises(ShapeError, match='wrong feature dimension'):
        preprocess_contract(
            ManifestRecord('a', 'x', features=numpy.ones(2)),
            manifest,
        )
    with pytest.raises(NonFiniteError):
        preprocess_contract(
            ManifestRecord('a', 'x', features=numpy.array([1, numpy.nan, 0])),
            manifest,
        )


def test_train_count() -> None:
    assert train_count(0.7, 520) == 364
    assert train_count(0.7, 10) == 7
    assert train_count(0.5, 5) == 2


def test_split_reference_dataset() -> None:
    manifest = _manifest(list(DEFAULT_CLASS_COUNTS))
    train, test = split_dataset(manifest, SplitSpec(train_fraction=0.7))

    assert len(train) + len(test) == len(manifest)
    assert not set(train.sample_ids) & set(test.sample_ids)
    train_counts = numpy.bincount(train.labels(), minlength=5).tolist()
    test_counts = numpy.bincount(test.labels(), minlength=5).tolist()
    assert train_counts[0] == 364
    assert test_counts[0] == 156
    assert train_counts == [train_count(0.7, n) for n in DEFAULT_CLASS_COUNTS]


def test_split_is_deterministic() -> None:
    manifest = _manifest([20, 20, 20])
    a = split_dataset(manifest, SplitSpec(seed=3))
    b = split_dataset(manifest, SplitSpec(seed=3))
    c = split_dataset(manifest, SplitSpec(seed=4))
    assert a[0].sample_ids == b[0].sample_ids
    assert a[1].sample_ids == b[1].sample_ids
    assert a[0].sample_ids != c[0].sample_ids


def test_split_unstratified() -> None:
    manifest = _manifest([9, 1])
    train, test = split_dataset(
        manifest,
        SplitSpec(train_fraction=0.5, stratified=False),
    )
    assert (len(train), len(test)) == (5, 5)


def test_split_errors() -> None:
    with pytest.raises(SplitError, match='at least 2'):
        split_dataset(_manifest([5, 1]), SplitSpec())
    with pytest.raises(SplitError, match='empty'):
        split_dataset(_manifest([2, 2]), SplitSpec(train_fraction=0.1))


def test_save_load_manifest(tmp_path: pathlib.Path) -> None:
    manifest = synth_manifest([4, 3], feature_dim=3, seed=1)
    filepath = tmp_path / 'manifest.json'
    save_manifest(filepath, manifest)
    loaded = load_manifest(filepath)

    assert loaded.class_names == manifest.class_names
    assert loaded.sample_ids == manifest.sample_ids
    assert loaded.feature_dim == 3
    assert loaded.image_size == (224, 224)
    assert numpy.array_equal(loaded.features(), manifest.features())
    assert numpy.array_equal(loaded.labels(), manifest.labels())


def test_load_manifest_errors(tmp_path: pathlib.Path) -> None:
    filepath = tmp_path / 'manifest.json'
    filepath.write_text('[')
    with pytest.raises(FormatError, match='not valid JSON'):
        load_manifest(filepath)

    document = {
        'format_version': 1,
        'class_names': ['x'],
        'feature_dim': 2,
        'records': [{'sample_id': 'a', 'label': 'x', 'features': [1.0]}],
    }
    filepath.write_text(json.dumps(document))
    with pytest.raises(FormatError, match='feature vector has shape') as e:
        load_manifest(filepath)
    assert e.value.row == 0

    document['format_version'] = 2
    filepath.write_text(json.dumps(document))
    with pytest.raises(FormatError, match='unsupported format version'):
        load_manifest(filepath)

    del document['records']
    document['format_version'] = 1
    filepath.write_text(json.dumps(document))
    with pytest.raises(FormatError, match='invalid manifest'):
        load_manifest(filepath)
