from __future__ import annotations

import logging
import pathlib
from typing import Sequence

from wavens.data.predictions import load_predictions
from wavens.data.predictions import read_labels
from wavens.data.predictions import select_labeled
from wavens.data.predictions import write_prediction_file
from wavens.ensemble.types import EnsembleResult
from wavens.ensemble.types import PredictionSet
from wavens.logging import CMD_LOG_LEVEL
from wavens.numerics import IntArray

logger = logging.getLogger(__name__)

COMBINED_FILENAME = 'combined.csv'


def load_labeled(
    predictions: Sequence[pathlib.Path],
    labels: pathlib.Path,
) -> tuple[PredictionSet, IntArray]:
    """Load prediction files restricted to the samples of a labels file.

    Returns:
        Predictions in labels-file order and the label indices.
    """
    preds = load_predictions(predictions)
    ids, truth = read_labels(labels, preds.class_names)
    preds = select_labeled(preds, ids, labels)
    logger.log(
        CMD_LOG_LEVEL,
        f'loaded {preds.num_models} model(s) on {preds.num_samples} '
        f'labeled sample(s) from {labels.name}',
    )
    return preds, truth


def write_combined(
    run_dir: pathlib.Path,
    preds: PredictionSet,
    result: EnsembleResult,
    normalize: bool,
) -> pathlib.Path:
    """Write the combined ensemble scores as a prediction file.

    Scores are raw weighted sums unless `normalize` is set, in which case
    they are divided by the weight sum.
    """
    assert preds.sample_ids is not None
    path = run_dir / COMBINED_FILENAME
    rows = result.normalized if normalize else result.combined
    write_prediction_file(
        path,
        'ensemble',
        preds.class_names,
        preds.sample_ids,
        rows,
        kind='probabilities' if normalize else 'scores',
    )
    return path
