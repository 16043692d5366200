from __future__ import annotations

import logging
import pathlib
from typing import Sequence

from wavens.commands.utils import load_labeled
from wavens.commands.utils import write_combined
from wavens.data.report import emit_report
from wavens.data.report import load_weights
from wavens.ensemble.combine import average_ensemble
from wavens.ensemble.combine import weighted_combine
from wavens.ensemble.types import EnsembleResult
from wavens.ensemble.types import PredictionSet
from wavens.ensemble.types import WeightVector
from wavens.errors import FormatError
from wavens.logging import CMD_LOG_LEVEL
from wavens.metrics import evaluate
from wavens.numerics import IntArray

logger = logging.getLogger(__name__)


def weights_for(
    preds: PredictionSet,
    mapping: dict[str, float],
    source: pathlib.Path,
) -> WeightVector:
    """Order a model-to-weight mapping by the models of `preds`.

    Raises:
        FormatError: If the mapping's models differ from those of `preds`.
    """
    if set(mapping) != set(preds.model_names):
        raise FormatError(
            source,
            f'weights are for models {sorted(mapping)} but the predictions '
            f'are from {sorted(preds.model_names)}',
        )
    return WeightVector(tuple(mapping[name] for name in preds.model_names))


class EvalCommand:
    """Evaluate predictions (optionally ensembled) against true labels.

    Args:
        predictions: Prediction files in model order.
        labels: Labels of the evaluation split.
        weights: Optional `weights.json` combining the models.
        normalize: Write normalized rows to `combined.csv`.
        round_percent: Round percentages in the CSV tables.
    """

    def __init__(
        self,
        predictions: Sequence[pathlib.Path],
        labels: pathlib.Path,
        weights: pathlib.Path | None = None,
        normalize: bool = False,
        round_percent: bool = False,
    ) -> None:
        self.predictions = list(predictions)
        self.labels = labels
        self.weights = weights
        self.normalize = normalize
        self.round_percent = round_percent

    def close(self) -> None:
        """Close the command."""
        pass

    def _combine(
        self,
        preds: PredictionSet,
        truth: IntArray,
    ) -> EnsembleResult | None:
        if self.weights is not None:
            mapping = load_weights(self.weights)
            weights = weights_for(preds, mapping, self.weights)
            return weighted_combine(preds, weights, truth)
        if preds.num_models > 1:
            logger.log(
                CMD_LOG_LEVEL,
                f'no weights given, averaging {preds.num_models} models',
            )
            return average_ensemble(preds, range(preds.num_models), truth)
        return None

    def run(self, run_dir: pathlib.Path) -> None:
        """Run the command.

        Args:
            run_dir: Directory for outputs.
        """
        preds, truth = load_labeled(self.predictions, self.labels)
        result = self._combine(preds, truth)
        scores = preds.probs[0] if result is None else result.combined
        report = evaluate(scores, truth, preds.class_names)
        emit_report(report, run_dir, round_percent=self.round_percent)
        if result is not None:
            write_combined(run_dir, preds, result, self.normalize)
        logger.log(
            CMD_LOG_LEVEL,
            f'accuracy {report.accuracy:.2f}%, macro precision '
            f'{report.macro_precision:.2f}%, macro recall '
            f'{report.macro_recall:.2f}%, macro F1 {report.macro_f1:.2f}%',
        )
