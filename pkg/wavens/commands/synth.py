from __future__ import annotations

import logging
import pathlib
from typing import Sequence

from wavens.data.manifest import DatasetManifest
from wavens.data.manifest import ManifestRecord
from wavens.data.manifest import save_manifest
from wavens.data.manifest import split_dataset
from wavens.data.manifest import SplitSpec
from wavens.data.predictions import write_labels
from wavens.data.predictions import write_prediction_file
from wavens.data.synth import scaled_class_counts
from wavens.data.synth import synth_fixture
from wavens.data.synth import synth_manifest
from wavens.logging import CMD_LOG_LEVEL
from wavens.metrics import accuracy
from wavens.metrics import confusion
from wavens.numerics import row_argmax

logger = logging.getLogger(__name__)

PREDICTIONS_DIR = 'predictions'
LABELS_FILENAME = 'labels.csv'
TUNE_LABELS_FILENAME = 'tune_labels.csv'
TEST_LABELS_FILENAME = 'test_labels.csv'
MANIFEST_FILENAME = 'manifest.json'


def _write_split(
    path: pathlib.Path,
    manifest: DatasetManifest,
) -> None:
    write_labels(
        path,
        manifest.sample_ids,
        [record.label for record in manifest.records],
    )


class SynthCommand:
    """Write synthetic model predictions, labels, and splits.

    Outputs in the run directory:

    * `predictions/<model>.csv` (and `.json` sidecar) for each model.
    * `labels.csv` with the true label of every sample.
    * `tune_labels.csv` and `test_labels.csv`, a stratified split of the
      samples into a tuning and an evaluation set.
    * `manifest.json` with class-clustered feature vectors when
      `feature_dim` is set.

    Args:
        num_models: Number of models.
        num_samples: Number of samples.
        num_classes: Number of classes.
        targets: Accuracy target of each model.
        seed: Random seed of the fixture, split, and manifest.
        temperature: Softmax temperature of the generated rows.
        margin: Minimum logit gap of the predicted class.
        split: Fraction of each class in the tuning split.
        feature_dim: Dimension of the feature manifest, if any.
        separation: Spread of the manifest class centers.
        model_names: Optional model names.
        class_names: Optional class names.
    """

    def __init__(
        self,
        num_models: int,
        num_samples: int,
        num_classes: int,
        targets: Sequence[float],
        seed: int = 0,
        *,
        temperature: float = 1.0,
        margin: float = 0.5,
        split: float = 0.7,
        feature_dim: int | None = None,
        separation: float = 3.0,
        model_names: Sequence[str] | None = None,
        class_names: Sequence[str] | None = None,
    ) -> None:
        self.num_models = num_models
        self.num_samples = num_samples
        self.num_classes = num_classes
        self.targets = tuple(targets)
        self.seed = seed
        self.temperature = temperature
        self.margin = margin
        self.split = split
        self.feature_dim = feature_dim
        self.separation = separation
        self.model_names = model_names
        self.class_names = class_names

    def close(self) -> None:
        """Close the command."""
        pass

    def run(self, run_dir: pathlib.Path) -> None:
        """Run the command.

        Args:
            run_dir: Directory for outputs.
        """
        preds, labels = synth_fixture(
            self.num_models,
            self.num_samples,
            self.num_classes,
            self.targets,
            self.seed,
            model_names=self.model_names,
            class_names=self.class_names,
            temperature=self.temperature,
            margin=self.margin,
        )
        assert preds.sample_ids is not None

        for m, name in enumerate(preds.model_names):
            path = run_dir / PREDICTIONS_DIR / f'{name}.csv'
            write_prediction_file(
                path,
                name,
                preds.class_names,
                preds.sample_ids,
                preds.probs[m],
            )
            cm = confusion(
                labels,
                row_argmax(preds.probs[m]),
                preds.num_classes,
            )
            logger.log(
                CMD_LOG_LEVEL,
                f'wrote {path.name} (target={self.targets[m]}, '
                f'accuracy={accuracy(cm):.2f})',
            )

        dataset = DatasetManifest(
            class_names=preds.class_names,
            records=tuple(
                ManifestRecord(sample_id=sample, label=preds.class_names[c])
                for sample, c in zip(preds.sample_ids, labels)
            ),
        )
        _write_split(run_dir / LABELS_FILENAME, dataset)
        tune, test = split_dataset(
            dataset,
            SplitSpec(train_fraction=self.split, seed=self.seed),
        )
        _write_split(run_dir / TUNE_LABELS_FILENAME, tune)
        _write_split(run_dir / TEST_LABELS_FILENAME, test)
        logger.log(
            CMD_LOG_LEVEL,
            f'wrote labels of {len(dataset)} samples '
            f'({len(tune)} tune / {len(test)} test)',
        )

        if self.feature_dim is not None:
            manifest = synth_manifest(
                scaled_class_counts(self.num_samples, self.num_classes),
                self.feature_dim,
                self.seed,
                class_names=preds.class_names,
                separation=self.separation,
            )
            save_manifest(run_dir / MANIFEST_FILENAME, manifest)
            logger.log(
                CMD_LOG_LEVEL,
                f'wrote feature manifest with {len(manifest)} samples '
                f'(dim={self.feature_dim})',
            )
