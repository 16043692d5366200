"""Minibatch gradient descent training with early stopping."""

from __future__ import annotations

import dataclasses
import enum
import logging
import math
from typing import Any
from typing import NamedTuple

import numpy

from wavens.errors import DivergenceError
from wavens.errors import EmptyInputError
from wavens.errors import NonFiniteError
from wavens.errors import ShapeError
from wavens.head.layers import Mode
from wavens.head.model import ce_loss
from wavens.head.model import forward_trace
from wavens.head.model import head_backward
from wavens.head.model import head_forward
from wavens.head.model import HeadConfig
from wavens.head.model import HeadParams
from wavens.head.model import init_head
from wavens.head.model import l1_penalty
from wavens.head.model import sgd_step
from wavens.logging import CMD_LOG_LEVEL
from wavens.logging import TRACE_LOG_LEVEL
from wavens.metrics import accuracy
from wavens.metrics import confusion
from wavens.metrics import macro_average
from wavens.metrics import mean_squared_error
from wavens.metrics import per_class_metrics
from wavens.numerics import Array
from wavens.numerics import IntArray
from wavens.numerics import row_argmax
from wavens.numerics import SeededRng
from wavens.record import NullRecordLogger
from wavens.record import RecordLogger

logger = logging.getLogger(__name__)


class Decision(enum.Enum):
    """Early stopping decision."""

    CONTINUE = 'continue'
    STOP = 'stop'


@dataclasses.dataclass(frozen=True, eq=False)
class EarlyStopState:
    """Early stopping state.

    Attributes:
        monitor: Name of the monitored value (lower is better).
        patience: Non-improving epochs tolerated before stopping.
        best_value: Lowest monitored value seen so far.
        best_params: Snapshot of the parameters at `best_epoch`.
        best_epoch: One-indexed epoch of the best value.
        epochs_since_improvement: Non-improving epochs since `best_epoch`.
        epoch: Number of observed epochs.
    """

    monitor: str = 'val_loss'
    patience: int = 7
    best_value: float = math.inf
    best_params: HeadParams | None = None
    best_epoch: int | None = None
    epochs_since_improvement: int = 0
    epoch: int = 0

    def __post_init__(self) -> None:
        if self.patience < 0:
            raise ValueError(
                f'Patience must be non-negative. Got {self.patience}.',
            )


def early_stop_update(
    state: EarlyStopState,
    value: float,
    params: HeadParams,
) -> tuple[EarlyStopState, Decision]:
    """Observe the monitored value of one epoch.

    A strictly lower value than the best (the first observation always
    counts) snapshots `params` and resets the counter. Otherwise the counter
    is incremented and training stops once it reaches `patience`.

    Raises:
        DivergenceError: If `value` is NaN.
    """
    if math.isnan(value):
        raise DivergenceError(
            f'Monitored value {state.monitor} is NaN at epoch '
            f'{state.epoch + 1}.',
        )
    epoch = state.epoch + 1
    if state.best_params is None or value < state.best_value:
        state = dataclasses.replace(
            state,
            best_value=value,
            best_params=params.copy(),
            best_epoch=epoch,
            epochs_since_improvement=0,
            epoch=epoch,
        )
        return state, Decision.CONTINUE

    state = dataclasses.replace(
        state,
        epochs_since_improvement=state.epochs_since_improvement + 1,
        epoch=epoch,
    )
    if state.epochs_since_improvement >= state.patience:
        return state, Decision.STOP
    return state, Decision.CONTINUE


@dataclasses.dataclass(frozen=True)
class EpochRecord:
    """Training and validation metrics of one epoch.

    Losses are cross-entropy plus the L1 penalty. Accuracy, precision, and
    recall are percentages (macro averaged), and MSE compares predicted
    probabilities with one-hot targets.
    """

    epoch: int
    train_loss: float
    val_loss: float
    train_accuracy: float
    val_accuracy: float
    train_precision: float
    val_precision: float
    train_recall: float
    val_recall: float
    train_mse: float
    val_mse: float
    improved: bool

    def to_record(self) -> dict[str, Any]:
        """Convert to a JSON-compatible record."""
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class TrainingHistory:
    """Per-epoch records of a training run.

    Attributes:
        epochs: Record of every completed epoch.
        best_epoch: Epoch whose parameters were restored.
        stopped_early: Whether early stopping ended training.
    """

    epochs: tuple[EpochRecord, ...]
    best_epoch: int
    stopped_early: bool


class LabeledFeatures(NamedTuple):
    """Feature matrix and its true labels."""

    features: Array
    labels: IntArray


def _check_split(
    split: LabeledFeatures,
    config: HeadConfig,
    name: str,
) -> None:
    features, labels = split
    if features.ndim != 2 or features.shape[0] == 0:  # noqa: PLR2004
        raise EmptyInputError(f'{name} set')
    if features.shape[1] != config.input_dim:
        raise ShapeError(
            f'{name} features do not match the input dimension',
            expected=(features.shape[0], config.input_dim),
            actual=features.shape,
        )
    if labels.shape != (features.shape[0],):
        raise ShapeError(
            f'{name} labels must have one entry per row',
            expected=(features.shape[0],),
            actual=labels.shape,
        )


def _step(
    params: HeadParams,
    config: HeadConfig,
    train: LabeledFeatures,
    batch: IntArray,
    rng: SeededRng,
) -> HeadParams:
    x = train.features[batch]
    labels = train.labels[batch]
    try:
        trace = forward_trace(params, config, x, rng)
        grads = head_backward(params, config, x, labels, trace=trace)
        return sgd_step(trace.updated, grads, config.learning_rate)
    except NonFiniteError as e:
        raise DivergenceError(f'Training diverged: {e}') from e


def _summarize(
    params: HeadParams,
    config: HeadConfig,
    split: LabeledFeatures,
) -> tuple[float, float, float, float, float]:
    try:
        probs = head_forward(params, config, split.features, Mode.EVAL)
    except NonFiniteError as e:
        raise DivergenceError(f'Training diverged: {e}') from e
    loss = ce_loss(probs, split.labels) + l1_penalty(params)
    cm = confusion(split.labels, row_argmax(probs), config.num_classes)
    precision, recall, _ = macro_average(per_class_metrics(cm))
    mse = mean_squared_error(probs, split.labels)
    return loss, accuracy(cm), precision, recall, mse


def train_head(
    config: HeadConfig,
    train: LabeledFeatures,
    validation: LabeledFeatures,
    record_logger: RecordLogger | None = None,
) -> tuple[HeadParams, TrainingHistory]:
    """Train a classifier head.

    Each epoch shuffles the training set with the seeded random source,
    splits it into `max(1, n // batch_size)` minibatches, and takes one
    gradient descent step per minibatch. After each epoch the validation
    loss (cross-entropy plus L1 penalty) is fed to early stopping and the
    parameters with the lowest validation loss are returned.

    Args:
        config: Head configuration.
        train: Training features and labels (at least two samples).
        validation: Validation features and labels.
        record_logger: Optional logger receiving one record per epoch.

    Returns:
        Restored best parameters and the training history.

    Raises:
        EmptyInputError: If either set is empty.
        ShapeError: If the features do not match the configuration or the
            training set has fewer than two samples.
        DivergenceError: If training produces non-finite values.
    """
    _check_split(train, config, 'training')
    _check_split(validation, config, 'validation')
    n = train.features.shape[0]
    if n < 2:  # noqa: PLR2004
        raise ShapeError(
            'training set needs at least two samples for batch statistics',
            expected=('>=2', config.input_dim),
            actual=train.features.shape,
        )

    record_logger = (
        NullRecordLogger() if record_logger is None else record_logger
    )
    rng = SeededRng(config.seed)
    params = init_head(config, rng.child(0))
    shuffle_rng = rng.child(1)
    dropout_rng = rng.child(2)
    num_batches = max(1, n // config.batch_size)

    state = EarlyStopState(patience=config.patience)
    records: list[EpochRecord] = []
    stopped = False

    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(n)
        for batch in numpy.array_split(order, num_batches):
            params = _step(params, config, train, batch, dropout_rng)

        train_stats = _summarize(params, config, train)
        val_stats = _summarize(params, config, validation)
        state, decision = early_stop_update(state, val_stats[0], params)

        record = EpochRecord(
            epoch,
            train_loss=train_stats[0],
            val_loss=val_stats[0],
            train_accuracy=train_stats[1],
            val_accuracy=val_stats[1],
            train_precision=train_stats[2],
            val_precision=val_stats[2],
            train_recall=train_stats[3],
            val_recall=val_stats[3],
            train_mse=train_stats[4],
            val_mse=val_stats[4],
            improved=state.best_epoch == epoch,
        )
        records.append(record)
        record_logger.log(record.to_record())
        logger.log(
            TRACE_LOG_LEVEL,
            f'epoch {epoch}: loss={record.train_loss:.6f} '
            f'val_loss={record.val_loss:.6f} '
            f'accuracy={record.train_accuracy:.2f} '
            f'val_accuracy={record.val_accuracy:.2f}',
        )

        if decision is Decision.STOP:
            stopped = True
            logger.log(
                CMD_LOG_LEVEL,
                f'early stopping after epoch {epoch}, no {state.monitor} '
                f'improvement for {state.epochs_since_improvement} epochs',
            )
            break

    assert state.best_params is not None
    assert state.best_epoch is not None
    logger.log(
        CMD_LOG_LEVEL,
        f'restored parameters of epoch {state.best_epoch} '
        f'({state.monitor}={state.best_value:.6f})',
    )
    history = TrainingHistory(
        epochs=tuple(records),
        best_epoch=state.best_epoch,
        stopped_early=stopped,
    )
    return state.best_params, history
