from __future__ import annotations

import contextlib
import logging
import pathlib
from typing import Sequence

from proxystore.utils.timer import Timer

from wavens.commands.utils import load_labeled
from wavens.commands.utils import write_combined
from wavens.data.predictions import load_predictions
from wavens.data.predictions import read_labels
from wavens.data.predictions import select_labeled
from wavens.data.report import emit_report
from wavens.data.report import TunedWeights
from wavens.ensemble.combine import ALL_MODELS
from wavens.ensemble.combine import average_ensemble
from wavens.ensemble.combine import pairwise_ensemble_sweep
from wavens.ensemble.combine import weighted_combine
from wavens.ensemble.search import DEFAULT_CHUNK_SIZE
from wavens.ensemble.search import grid_search_weights
from wavens.ensemble.types import GridSpec
from wavens.executor import ExecutorConfig
from wavens.logging import CMD_LOG_LEVEL
from wavens.metrics import evaluate

logger = logging.getLogger(__name__)


class EnsembleAvgCommand:
    """Evaluate the average ensemble of every model pair and of all models.

    Writes `ensembles.csv` and the `sweep` section of `report.json`. The
    report's main evaluation and `combined.csv` are those of the all-model
    average.

    Args:
        predictions: Prediction files in model order.
        labels: Labels of the evaluation split.
        normalize: Write normalized rows to `combined.csv`.
        round_percent: Round percentages in the CSV tables.
    """

    def __init__(
        self,
        predictions: Sequence[pathlib.Path],
        labels: pathlib.Path,
        normalize: bool = False,
        round_percent: bool = False,
    ) -> None:
        self.predictions = list(predictions)
        self.labels = labels
        self.normalize = normalize
        self.round_percent = round_percent

    def close(self) -> None:
        """Close the command."""
        pass

    def run(self, run_dir: pathlib.Path) -> None:
        """Run the command.

        Args:
            run_dir: Directory for outputs.
        """
        preds, truth = load_labeled(self.predictions, self.labels)
        sweep = pairwise_ensemble_sweep(preds, truth)
        for row in sweep:
            logger.log(
                CMD_LOG_LEVEL,
                f'{row.name}: accuracy={row.report.accuracy:.2f}% '
                f'f1={row.report.macro_f1:.2f}%',
            )

        assert sweep[-1].name == ALL_MODELS
        emit_report(
            sweep[-1].report,
            run_dir,
            sweep=sweep,
            round_percent=self.round_percent,
        )
        result = average_ensemble(preds, range(preds.num_models), truth)
        write_combined(run_dir, preds, result, self.normalize)


class EnsembleTuneCommand:
    """Grid search ensemble weights on a tuning split.

    The best lattice weights on the tuning split are written to
    `weights.json` with the full search trace in `grid_trace.csv`. The
    tuned ensemble is then evaluated on the evaluation split, along with
    the average ensemble sweep when there are at least two models.

    Args:
        predictions: Prediction files in model order.
        labels: Labels of the evaluation split.
        tune_split: Labels of the tuning split. Defaults to `labels`.
        spec: Weight lattice.
        executor: Optional executor config for concurrent chunk evaluation.
        chunk_size: Lattice points per chunk.
        normalize: Write normalized rows to `combined.csv`.
        round_percent: Round percentages in the CSV tables.
    """

    def __init__(
        self,
        predictions: Sequence[pathlib.Path],
        labels: pathlib.Path,
        tune_split: pathlib.Path | None = None,
        spec: GridSpec | None = None,
        executor: ExecutorConfig | None = None,
        chunk_size: int = DEFAULT_CHUNK_SIZE,
        normalize: bool = False,
        round_percent: bool = False,
    ) -> None:
        self.predictions = list(predictions)
        self.labels = labels
        self.tune_split = tune_split
        self.spec = GridSpec() if spec is None else spec
        self.executor = executor
        self.chunk_size = chunk_size
        self.normalize = normalize
        self.round_percent = round_percent

    def close(self) -> None:
        """Close the command."""
        pass

    def _tune_labels(self) -> pathlib.Path:
        if self.tune_split is None:
            logger.warning(
                'no tuning split given, tuning on the evaluation labels '
                f'({self.labels.name}) so the reported accuracy is optimistic',
            )
            return self.labels
        if self.tune_split.resolve() == self.labels.resolve():
            logger.warning(
                'tuning and evaluation splits are the same file '
                f'({self.labels.name}) so the reported accuracy is optimistic',
            )
        return self.tune_split

    def run(self, run_dir: pathlib.Path) -> None:
        """Run the command.

        Args:
            run_dir: Directory for outputs.
        """
        tune_path = self._tune_labels()
        preds = load_predictions(self.predictions)
        tune_ids, tune_truth = read_labels(tune_path, preds.class_names)
        tune_preds = select_labeled(preds, tune_ids, tune_path)

        with contextlib.ExitStack() as stack:
            executor = (
                None
                if self.executor is None
                else stack.enter_context(self.executor.get_executor())
            )
            with Timer() as timer:
                search = grid_search_weights(
                    tune_preds,
                    tune_truth,
                    self.spec,
                    executor=executor,
                    chunk_size=self.chunk_size,
                )
        logger.log(
            CMD_LOG_LEVEL,
            f'searched {len(search.trace)} lattice points on '
            f'{tune_preds.num_samples} tuning samples '
            f'(elapsed={timer.elapsed_s:.3f}s)',
        )
        logger.log(
            CMD_LOG_LEVEL,
            f'best weights {search.best.weights} at lattice index '
            f'{search.best_index} (tuning accuracy '
            f'{search.best_accuracy:.4f}%)',
        )

        eval_ids, eval_truth = read_labels(self.labels, preds.class_names)
        eval_preds = select_labeled(preds, eval_ids, self.labels)
        result = weighted_combine(eval_preds, search.best, eval_truth)
        report = evaluate(result.combined, eval_truth, eval_preds.class_names)
        sweep = (
            pairwise_ensemble_sweep(eval_preds, eval_truth)
            if eval_preds.num_models > 1
            else None
        )
        tuned = TunedWeights(
            model_names=preds.model_names,
            weights=search.best.weights,
            accuracy=search.best_accuracy,
            index=search.best_index,
            spec=self.spec,
        )
        emit_report(
            report,
            run_dir,
            trace=search.trace,
            tuned=tuned,
            sweep=sweep,
            tuned_report=report,
            round_percent=self.round_percent,
        )
        write_combined(run_dir, eval_preds, result, self.normalize)
        logger.log(
            CMD_LOG_LEVEL,
            f'tuned ensemble evaluation accuracy {report.accuracy:.2f}%',
        )
