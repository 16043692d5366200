from __future__ import annotations

import logging
import pathlib
from typing import Any

from wavens.data.manifest import DatasetManifest
from wavens.data.manifest import load_manifest
from wavens.data.manifest import split_dataset
from wavens.data.manifest import SplitSpec
from wavens.data.predictions import write_labels
from wavens.data.report import emit_report
from wavens.head.layers import Mode
from wavens.head.model import head_forward
from wavens.head.model import HeadConfig
from wavens.head.serialize import save_head
from wavens.head.train import LabeledFeatures
from wavens.head.train import train_head
from wavens.logging import CMD_LOG_LEVEL
from wavens.metrics import evaluate
from wavens.record import JSONRecordLogger

logger = logging.getLogger(__name__)

HEAD_FILENAME = 'head.json'
HISTORY_FILENAME = 'history.jsonl'
TRAIN_LABELS_FILENAME = 'train_labels.csv'
TEST_LABELS_FILENAME = 'test_labels.csv'


def _labeled(manifest: DatasetManifest) -> LabeledFeatures:
    return LabeledFeatures(manifest.features(), manifest.labels())


def _write_labels(path: pathlib.Path, manifest: DatasetManifest) -> None:
    write_labels(
        path,
        manifest.sample_ids,
        [record.label for record in manifest.records],
    )


class TrainHeadCommand:
    """Train a classifier head on a feature manifest.

    The manifest is split into train and test sets; the test set doubles
    as the early stopping validation set. Outputs are the trained head
    (`head.json`), the per-epoch history (`history.jsonl`), the labels of
    each split, and an evaluation report of the head on the test split.

    Args:
        manifest: Path of the feature manifest.
        split: Train/test split configuration.
        head_options: [`HeadConfig`][wavens.head.model.HeadConfig] options
            except `input_dim` and `num_classes`.
        round_percent: Round percentages in the CSV tables.
    """

    def __init__(
        self,
        manifest: pathlib.Path,
        split: SplitSpec,
        head_options: dict[str, Any],
        round_percent: bool = False,
    ) -> None:
        self.manifest = manifest
        self.split = split
        self.head_options = head_options
        self.round_percent = round_percent

    def close(self) -> None:
        """Close the command."""
        pass

    def run(self, run_dir: pathlib.Path) -> None:
        """Run the command.

        Args:
            run_dir: Directory for outputs.
        """
        manifest = load_manifest(self.manifest)
        train, test = split_dataset(manifest, self.split)
        _write_labels(run_dir / TRAIN_LABELS_FILENAME, train)
        _write_labels(run_dir / TEST_LABELS_FILENAME, test)
        logger.log(
            CMD_LOG_LEVEL,
            f'split {len(manifest)} samples into {len(train)} train and '
            f'{len(test)} test',
        )

        train_data = _labeled(train)
        test_data = _labeled(test)
        config = HeadConfig(
            input_dim=train_data.features.shape[1],
            num_classes=len(manifest.class_names),
            **self.head_options,
        )

        with JSONRecordLogger(run_dir / HISTORY_FILENAME) as records:
            params, history = train_head(
                config,
                train_data,
                test_data,
                record_logger=records,
            )
        save_head(run_dir / HEAD_FILENAME, params, config)
        logger.log(
            CMD_LOG_LEVEL,
            f'trained head for {len(history.epochs)} epoch(s), best epoch '
            f'{history.best_epoch}, saved to {HEAD_FILENAME}',
        )

        probs = head_forward(params, config, test_data.features, Mode.EVAL)
        report = evaluate(probs, test_data.labels, manifest.class_names)
        emit_report(report, run_dir, round_percent=self.round_percent)
        logger.log(
            CMD_LOG_LEVEL,
            f'test accuracy {report.accuracy:.2f}%, '
            f'macro F1 {report.macro_f1:.2f}%',
        )
