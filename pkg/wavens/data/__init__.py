"""Dataset manifests, prediction files, synthetic fixtures, and reports."""

from __future__ import annotations

from wavens.data.manifest import DatasetManifest
from wavens.data.manifest import load_manifest
from wavens.data.manifest import save_manifest
from wavens.data.manifest import split_dataset
from wavens.data.manifest import SplitSpec
from wavens.data.predictions import load_predictions
from wavens.data.predictions import PredictionFile
from wavens.data.predictions import write_prediction_file
from wavens.data.report import emit_report
from wavens.data.report import load_report
from wavens.data.synth import synth_fixture
from wavens.data.synth import synth_manifest

__all__ = (
    'DatasetManifest',
    'PredictionFile',
    'SplitSpec',
    'emit_report',
    'load_manifest',
    'load_predictions',
    'load_report',
    'save_manifest',
    'split_dataset',
    'synth_fixture',
    'synth_manifest',
    'write_prediction_file',
)
