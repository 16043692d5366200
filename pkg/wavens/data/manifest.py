"""Dataset manifests and train/test splits.

A manifest lists the samples of a dataset with their class label and an
optional payload: a feature vector produced by an upstream extractor or the
path of the source image. Images are expected to be resized to
`image_size` by the extractor; only the declared feature dimension is
enforced here.
"""

from __future__ import annotations

import dataclasses
import json
import math
import pathlib
from typing import Any
from typing import Sequence

import numpy
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field

from wavens.errors import FormatError
from wavens.errors import ShapeError
from wavens.errors import SplitError
from wavens.numerics import Array
from wavens.numerics import as_vector
from wavens.numerics import IntArray
from wavens.numerics import SeededRng

MANIFEST_FORMAT_VERSION = 1
"""Version of the manifest document."""
IMAGE_SIZE = (224, 224)
"""Input size the upstream feature extractor resizes images to."""
# Absorbs floating-point error in fraction * count (e.g., 0.7 * 10).
_FLOOR_EPSILON = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class ManifestRecord:
    """One sample of a dataset.

    Attributes:
        sample_id: Unique sample identifier.
        label: Class name.
        features: Optional feature vector.
        path: Optional path of the source image.
    """

    sample_id: str
    label: str
    features: Array | None = None
    path: str | None = None


@dataclasses.dataclass(frozen=True, eq=False)
class DatasetManifest:
    """Ordered samples with their class names.

    Attributes:
        class_names: Ordered class names; label indices refer to this order.
        records: Samples of the dataset.
        feature_dim: Dimension shared by every feature vector, if any.
        image_size: Declared size of the images features were taken from.
    """

    class_names: tuple[str, ...]
    records: tuple[ManifestRecord, ...]
    feature_dim: int | None = None
    image_size: tuple[int, int] = IMAGE_SIZE

    def __post_init__(self) -> None:
        object.__setattr__(self, 'class_names', tuple(self.class_names))
        object.__setattr__(self, 'records', tuple(self.records))
        if len(set(self.class_names)) != len(self.class_names):
            raise ValueError(
                f'Class names must be unique. Got {self.class_names}.',
            )
        ids = [record.sample_id for record in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError('Sample ids in a manifest must be unique.')
        known = set(self.class_names)
        for record in self.records:
            if record.label not in known:
                raise ValueError(
                    f'Sample {record.sample_id} has unknown label '
                    f'{record.label!r}.',
                )

    def __len__(self) -> int:
        return len(self.records)

    @property
    def sample_ids(self) -> tuple[str, ...]:
        """Sample ids in record order."""
        return tuple(record.sample_id for record in self.records)

    def labels(self) -> IntArray:
        """Label index of every record."""
        index = {name: i for i, name in enumerate(self.class_names)}
        return numpy.array(
            [index[record.label] for record in self.records],
            dtype=numpy.int64,
        )

    def features(self) -> Array:
        """Validated `N x D` feature matrix.

        Raises:
            ShapeError: If the manifest declares no feature dimension or a
                record's vector has the wrong dimension.
            NonFiniteError: If a vector contains NaN or infinite values.
        """
        if self.feature_dim is None:
            raise ShapeError(
                'manifest does not declare a feature dimension',
                expected=('feature_dim',),
                actual=(),
            )
        rows = [preprocess_contract(record, self) for record in self.records]
        if not rows:
            return numpy.empty((0, self.feature_dim))
        return numpy.vstack(rows)

    def subset(self, indices: Sequence[int] | IntArray) -> DatasetManifest:
        """Manifest of the records at `indices`, in that order."""
        return dataclasses.replace(
            self,
            records=tuple(self.records[int(i)] for i in indices),
        )


class SplitSpec(BaseModel):
    """Train/test split configuration."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    train_fraction: float = Field(
        0.7,
        gt=0,
        lt=1,
        description='Fraction of each class assigned to the train split.',
    )
    seed: int = Field(0, ge=0, description='Shuffle seed.')
    stratified: bool = Field(
        True,
        description='Split every class separately to keep class balance.',
    )


def preprocess_contract(
    record: ManifestRecord,
    manifest: DatasetManifest,
) -> Array:
    """Validate and return the feature vector of a record.

    Image decoding and resizing to `manifest.image_size` happen upstream;
    the vector is returned unchanged when it has the declared dimension.

    Raises:
        ShapeError: If the record has no features or the wrong dimension.
        NonFiniteError: If the vector contains NaN or infinite values.
    """
    if record.features is None:
        raise ShapeError(
            f'sample {record.sample_id} has no feature vector',
            expected=(manifest.feature_dim,),
            actual=(),
        )
    vector = as_vector(record.features, f'features of {record.sample_id}')
    if vector.shape[0] != manifest.feature_dim:
        raise ShapeError(
            f'sample {record.sample_id} has the wrong feature dimension',
            expected=(manifest.feature_dim,),
            actual=vector.shape,
        )
    return vector


def train_count(fraction: float, count: int) -> int:
    """Number of samples assigned to the train split."""
    return math.floor(fraction * count + _FLOOR_EPSILON)


def split_dataset(
    manifest: DatasetManifest,
    spec: SplitSpec,
) -> tuple[DatasetManifest, DatasetManifest]:
    """Split a manifest into disjoint train and test manifests.

    When stratified, each class (in class order) is shuffled and its first
    `floor(train_fraction * count)` samples go to the train split, the rest
    to the test split. Otherwise the same rule is applied to the whole
    dataset. Both splits are then shuffled. The result depends only on the
    manifest and `spec.seed`.

    Raises:
        SplitError: If a class has fewer than two samples when stratified,
            or either split would be empty.
    """
    rng = SeededRng(spec.seed)
    labels = manifest.labels()

    if spec.stratified:
        groups = []
        for c, name in enumerate(manifest.class_names):
            members = numpy.flatnonzero(labels == c)
            if len(members) < 2:  # noqa: PLR2004
                raise SplitError(
                    f'Class {name} has {len(members)} sample(s) but a '
                    'stratified split needs at least 2.',
                )
            groups.append(members)
    else:
        groups = [numpy.arange(len(manifest))]

    train_parts, test_parts = [], []
    for members in groups:
        shuffled = members[rng.permutation(len(members))]
        cut = train_count(spec.train_fraction, len(members))
        train_parts.append(shuffled[:cut])
        test_parts.append(shuffled[cut:])

    train = numpy.concatenate(train_parts)
    test = numpy.concatenate(test_parts)
    if len(train) == 0 or len(test) == 0:
        raise SplitError(
            f'Splitting {len(manifest)} samples at fraction '
            f'{spec.train_fraction} leaves a split empty.',
        )
    train = train[rng.permutation(len(train))]
    test = test[rng.permutation(len(test))]
    return manifest.subset(train), manifest.subset(test)


def manifest_to_dict(manifest: DatasetManifest) -> dict[str, Any]:
    """Encode a manifest as a JSON-compatible document."""
    records = []
    for record in manifest.records:
        entry: dict[str, Any] = {
            'sample_id': record.sample_id,
            'label': record.label,
        }
        if record.features is not None:
            entry['features'] = [float(v) for v in record.features]
        if record.path is not None:
            entry['path'] = record.path
        records.append(entry)
    return {
        'format_version': MANIFEST_FORMAT_VERSION,
        'class_names': list(manifest.class_names),
        'feature_dim': manifest.feature_dim,
        'image_size': list(manifest.image_size),
        'records': records,
    }


def save_manifest(
    filepath: pathlib.Path | str,
    manifest: DatasetManifest,
) -> None:
    """Write a manifest document."""
    filepath = pathlib.Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w') as f:
        json.dump(manifest_to_dict(manifest), f, indent=2)


def load_manifest(filepath: pathlib.Path | str) -> DatasetManifest:
    """Read a manifest document.

    Raises:
        FormatError: If the file is not a valid manifest.
    """
    try:
        with open(filepath) as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(filepath, f'not valid JSON ({e})') from e

    try:
        version = document['format_version']
        if version != MANIFEST_FORMAT_VERSION:
            raise FormatError(
                filepath,
                f'unsupported format version {version}',
            )
        records = []
        for row, entry in enumerate(document['records']):
            features = entry.get('features')
            if features is not None:
                features = numpy.array(features, dtype=numpy.float64)
            records.append(
                ManifestRecord(
                    sample_id=str(entry['sample_id']),
                    label=str(entry['label']),
                    features=features,
                    path=entry.get('path'),
                ),
            )
            if features is not None and features.shape != (
                document['feature_dim'],
            ):
                raise FormatError(
                    filepath,
                    f'feature vector has shape {features.shape}, expected '
                    f'({document["feature_dim"]},)',
                    row=row,
                )
        width, height = document.get('image_size', IMAGE_SIZE)
        return DatasetManifest(
            class_names=tuple(document['class_names']),
            records=tuple(records),
            feature_dim=document['feature_dim'],
            image_size=(int(width), int(height)),
        )
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(filepath, f'invalid manifest ({e})') from e
