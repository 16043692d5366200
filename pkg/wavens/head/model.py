"""Classifier head model: configuration, parameters, forward and backward.

The head is three `Dense(relu) -> BatchRenorm -> Dropout` blocks followed
by a `Dense(softmax)` output layer. The three hidden dense layers carry an
L1 penalty on their weight matrices.
"""

from __future__ import annotations

import dataclasses
import sys
from typing import NamedTuple
from typing import Sequence

if sys.version_info >= (3, 11):  # pragma: >=3.11 cover
    from typing import Self
else:  # pragma: <3.11 cover
    from typing_extensions import Self

import numpy
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator

from wavens.errors import EmptyInputError
from wavens.errors import LabelRangeError
from wavens.errors import ShapeError
from wavens.head.layers import Activation
from wavens.head.layers import apply_activation
from wavens.head.layers import BatchRenormLayer
from wavens.head.layers import dense_affine
from wavens.head.layers import dense_backward
from wavens.head.layers import DenseLayer
from wavens.head.layers import dropout_mask
from wavens.head.layers import DropoutSpec
from wavens.head.layers import Mode
from wavens.head.layers import renorm_backward
from wavens.head.layers import renorm_eval
from wavens.head.layers import renorm_train
from wavens.head.layers import RenormCache
from wavens.numerics import Array
from wavens.numerics import IntArray
from wavens.numerics import one_hot
from wavens.numerics import SeededRng

NUM_HIDDEN = 3
"""Number of `Dense -> BatchRenorm -> Dropout` blocks."""
LOG_FLOOR = 1e-12
"""Probabilities are clamped to this value inside the log of the loss."""


class HeadConfig(BaseModel):
    """Classifier head architecture and training configuration."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    input_dim: int = Field(ge=1, description='Feature vector dimension.')
    hidden_dims: tuple[int, int, int] = Field(
        (512, 256, 128),
        description='Widths of the three hidden dense layers.',
    )
    num_classes: int = Field(ge=2, description='Number of output classes.')
    l1: float = Field(
        0.0001,
        ge=0,
        description='L1 coefficient of the hidden dense layer weights.',
    )
    dropout_rate: float = Field(
        0.3,
        ge=0,
        lt=1,
        description='Dropout rate after each batch renorm layer.',
    )
    epsilon: float = Field(1e-3, gt=0, description='Renorm variance offset.')
    r_max: float = Field(3.0, ge=1, description='Renorm r clip bound.')
    d_max: float = Field(5.0, ge=0, description='Renorm d clip bound.')
    momentum: float = Field(
        0.99,
        gt=0,
        le=1,
        description='Renorm running statistics momentum.',
    )
    learning_rate: float = Field(
        0.01,
        gt=0,
        description='Gradient descent step size.',
    )
    batch_size: int = Field(32, ge=2, description='Minibatch size.')
    max_epochs: int = Field(100, ge=1, description='Maximum epochs.')
    patience: int = Field(
        7,
        ge=0,
        description='Epochs without validation loss improvement before '
        'training stops.',
    )
    init_scale: float = Field(
        1.0,
        gt=0,
        description='Multiplier on the Glorot-uniform initialization bound.',
    )
    seed: int = Field(0, ge=0, description='Initialization and dropout seed.')

    @model_validator(mode='after')
    def _validate_hidden_dims(self) -> Self:
        if any(dim < 1 for dim in self.hidden_dims):
            raise ValueError(
                'Hidden layer widths must be at least 1. '
                f'Got hidden_dims={self.hidden_dims}.',
            )
        return self

    @property
    def layer_dims(self) -> tuple[int, ...]:
        """Chain of dimensions from the input to the output layer."""
        return (self.input_dim, *self.hidden_dims, self.num_classes)


@dataclasses.dataclass(frozen=True, eq=False)
class HeadParams:
    """Trainable parameters and running statistics of a head.

    Attributes:
        dense: Three hidden dense layers followed by the output layer.
        renorm: Batch renorm layer of each hidden block.
    """

    dense: tuple[DenseLayer, ...]
    renorm: tuple[BatchRenormLayer, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'dense', tuple(self.dense))
        object.__setattr__(self, 'renorm', tuple(self.renorm))
        if (
            len(self.dense) != NUM_HIDDEN + 1
            or len(self.renorm) != NUM_HIDDEN
        ):
            raise ShapeError(
                'head needs four dense and three batch renorm layers',
                expected=(NUM_HIDDEN + 1, NUM_HIDDEN),
                actual=(len(self.dense), len(self.renorm)),
            )
        for i, (prev, nxt) in enumerate(zip(self.dense, self.dense[1:])):
            if prev.out_dim != nxt.in_dim:
                raise ShapeError(
                    f'dense layer {i + 1} does not chain to layer {i}',
                    expected=(prev.out_dim,),
                    actual=(nxt.in_dim,),
                )
        for i, (dense, renorm) in enumerate(zip(self.dense, self.renorm)):
            if dense.out_dim != renorm.dim:
                raise ShapeError(
                    f'batch renorm layer {i} does not match its dense layer',
                    expected=(dense.out_dim,),
                    actual=(renorm.dim,),
                )

    @property
    def input_dim(self) -> int:
        """Input feature dimension."""
        return self.dense[0].in_dim

    @property
    def num_classes(self) -> int:
        """Number of output classes."""
        return self.dense[-1].out_dim

    def copy(self) -> HeadParams:
        """Deep copy with independent arrays."""
        return HeadParams(
            dense=tuple(
                dataclasses.replace(
                    layer,
                    weights=layer.weights.copy(),
                    bias=layer.bias.copy(),
                )
                for layer in self.dense
            ),
            renorm=tuple(
                dataclasses.replace(
                    layer,
                    gamma=layer.gamma.copy(),
                    beta=layer.beta.copy(),
                    running_mean=layer.running_mean.copy(),
                    running_var=layer.running_var.copy(),
                )
                for layer in self.renorm
            ),
        )


@dataclasses.dataclass(frozen=True, eq=False)
class HeadGradients:
    """Gradients with the same layout as [`HeadParams`][wavens.head.model.HeadParams]."""  # noqa: E501

    weights: tuple[Array, ...]
    bias: tuple[Array, ...]
    gamma: tuple[Array, ...]
    beta: tuple[Array, ...]

    def arrays(self) -> list[Array]:
        """All gradient arrays in a fixed order."""
        return [*self.weights, *self.bias, *self.gamma, *self.beta]


class ForwardTrace(NamedTuple):
    """Train-mode forward pass intermediates.

    Attributes:
        probs: Output class probabilities.
        inputs: Input of each dense layer.
        pre_activations: Affine output of each hidden dense layer.
        caches: Batch renorm intermediates of each hidden block.
        masks: Dropout mask of each hidden block (`None` when disabled).
        updated: Parameters with updated running statistics.
    """

    probs: Array
    inputs: list[Array]
    pre_activations: list[Array]
    caches: list[RenormCache]
    masks: list[Array | None]
    updated: HeadParams


def init_head(config: HeadConfig, rng: SeededRng) -> HeadParams:
    """Initialize a head.

    Dense weights are drawn uniformly from `+/- init_scale *
    sqrt(6 / (fan_in + fan_out))` in layer order; biases start at zero.
    Batch renorm layers start with `gamma=1`, `beta=0`, zero running mean
    and unit running variance.
    """
    dims = config.layer_dims
    dense = []
    for i, (fan_in, fan_out) in enumerate(zip(dims, dims[1:])):
        limit = config.init_scale * numpy.sqrt(6.0 / (fan_in + fan_out))
        dense.append(
            DenseLayer(
                weights=rng.uniform(-limit, limit, (fan_out, fan_in)),
                bias=numpy.zeros(fan_out),
                l1=config.l1 if i < NUM_HIDDEN else 0.0,
            ),
        )
    renorm = [
        BatchRenormLayer.fresh(
            dim,
            epsilon=config.epsilon,
            r_max=config.r_max,
            d_max=config.d_max,
            momentum=config.momentum,
        )
        for dim in config.hidden_dims
    ]
    return HeadParams(dense=tuple(dense), renorm=tuple(renorm))


def _check_features(params: HeadParams, x: Array) -> None:
    if x.ndim != 2 or x.shape[1] != params.input_dim:  # noqa: PLR2004
        raise ShapeError(
            'feature matrix does not match the head input dimension',
            expected=('batch', params.input_dim),
            actual=x.shape,
        )


def forward_trace(
    params: HeadParams,
    config: HeadConfig,
    x: Array,
    rng: SeededRng | None = None,
    *,
    corrections: Sequence[tuple[Array, Array]] | None = None,
) -> ForwardTrace:
    """Train-mode forward pass recording the backward intermediates.

    Args:
        params: Head parameters.
        config: Head configuration (dropout rate).
        x: Feature batch with at least two rows.
        rng: Source of dropout masks. Required when the dropout rate is
            non-zero.
        corrections: Per-block `(r, d)` overrides of the batch renorm
            correction factors.

    Raises:
        ShapeError: If `x` does not match the input dimension or has fewer
            than two rows.
    """
    _check_features(params, x)
    spec = DropoutSpec(rate=config.dropout_rate, mode=Mode.TRAIN)
    if spec.rate > 0 and rng is None:
        raise ValueError('A random source is required for dropout.')

    inputs: list[Array] = []
    pre_activations: list[Array] = []
    caches: list[RenormCache] = []
    masks: list[Array | None] = []
    renorm_updated: list[BatchRenormLayer] = []

    a = x
    for i in range(NUM_HIDDEN):
        inputs.append(a)
        z = dense_affine(params.dense[i], a)
        pre_activations.append(z)
        override = None if corrections is None else corrections[i]
        y, layer, cache = renorm_train(
            params.renorm[i],
            apply_activation(z, Activation.RELU),
            override,
        )
        caches.append(cache)
        renorm_updated.append(layer)
        mask = dropout_mask(spec, y.shape, rng)  # type: ignore[arg-type]
        masks.append(mask)
        a = y if mask is None else y * mask

    inputs.append(a)
    probs = apply_activation(
        dense_affine(params.dense[-1], a),
        Activation.SOFTMAX,
    )
    updated = HeadParams(dense=params.dense, renorm=tuple(renorm_updated))
    return ForwardTrace(probs, inputs, pre_activations, caches, masks, updated)


def head_forward(
    params: HeadParams,
    config: HeadConfig,
    x: Array,
    mode: Mode = Mode.EVAL,
    rng: SeededRng | None = None,
) -> Array:
    """Class probabilities of the head.

    Train mode uses batch statistics and dropout but does not persist the
    running statistics update; use
    [`forward_trace()`][wavens.head.model.forward_trace] for that.

    Returns:
        Matrix of shape `[batch, num_classes]` whose rows sum to one.

    Raises:
        ShapeError: If `x.cols != input_dim`.
    """
    if mode is Mode.TRAIN:
        return forward_trace(params, config, x, rng).probs

    _check_features(params, x)
    a = x
    for i in range(NUM_HIDDEN):
        h = apply_activation(dense_affine(params.dense[i], a), Activation.RELU)
        a = renorm_eval(params.renorm[i], h)
    return apply_activation(
        dense_affine(params.dense[-1], a),
        Activation.SOFTMAX,
    )


def _check_labels(labels: IntArray, num_classes: int, rows: int) -> IntArray:
    labels = numpy.asarray(labels, dtype=numpy.int64)
    if labels.ndim != 1 or labels.shape[0] != rows:
        raise ShapeError(
            'labels must be a vector with one entry per row',
            expected=(rows,),
            actual=labels.shape,
        )
    bad = labels[(labels < 0) | (labels >= num_classes)]
    if bad.size > 0:
        raise LabelRangeError(int(bad[0]), num_classes)
    return labels


def ce_loss(probs: Array, labels: IntArray) -> float:
    """Mean categorical cross-entropy.

    Computes `mean(-ln(max(p[true], 1e-12)))` over the batch.

    Raises:
        EmptyInputError: If the batch is empty.
        LabelRangeError: If a label is outside of `[0, C)`.
    """
    if probs.ndim != 2 or probs.shape[0] == 0:  # noqa: PLR2004
        raise EmptyInputError('probability batch')
    labels = _check_labels(labels, probs.shape[1], probs.shape[0])
    picked = probs[numpy.arange(len(labels)), labels]
    return float(numpy.mean(-numpy.log(numpy.maximum(picked, LOG_FLOOR))))


def l1_penalty(params: HeadParams) -> float:
    """Sum of `l1 * sum(|W|)` over the hidden dense layers.

    The output layer and all biases are not penalized.
    """
    return float(
        sum(
            layer.l1 * numpy.sum(numpy.abs(layer.weights))
            for layer in params.dense[:NUM_HIDDEN]
        ),
    )


def total_loss(
    params: HeadParams,
    config: HeadConfig,
    x: Array,
    labels: IntArray,
    rng: SeededRng | None = None,
    *,
    corrections: Sequence[tuple[Array, Array]] | None = None,
) -> float:
    """Train-mode objective `ce_loss + l1_penalty`."""
    trace = forward_trace(params, config, x, rng, corrections=corrections)
    return ce_loss(trace.probs, labels) + l1_penalty(params)


def head_backward(
    params: HeadParams,
    config: HeadConfig,
    x: Array,
    labels: IntArray,
    rng: SeededRng | None = None,
    *,
    trace: ForwardTrace | None = None,
) -> HeadGradients:
    """Analytic gradients of `ce_loss + l1_penalty` for one batch.

    The batch renorm correction factors are treated as constants and the
    L1 subgradient at zero is zero.

    Args:
        params: Head parameters.
        config: Head configuration.
        x: Feature batch.
        labels: True class indices of `x`.
        rng: Dropout random source used when `trace` is not given.
        trace: Train-mode forward pass of `x` with `params`. Computed
            when omitted.

    Raises:
        LabelRangeError: If a label is outside of `[0, num_classes)`.
    """
    if trace is None:
        trace = forward_trace(params, config, x, rng)
    probs = trace.probs
    batch = probs.shape[0]
    labels = _check_labels(labels, params.num_classes, batch)

    weights: list[Array] = [numpy.empty(0)] * (NUM_HIDDEN + 1)
    bias: list[Array] = [numpy.empty(0)] * (NUM_HIDDEN + 1)
    gamma: list[Array] = [numpy.empty(0)] * NUM_HIDDEN
    beta: list[Array] = [numpy.empty(0)] * NUM_HIDDEN

    grad = (probs - one_hot(labels, params.num_classes)) / batch
    grad, weights[-1], bias[-1] = dense_backward(
        params.dense[-1],
        trace.inputs[-1],
        grad,
    )

    for i in reversed(range(NUM_HIDDEN)):
        mask = trace.masks[i]
        if mask is not None:
            grad = grad * mask
        grad, gamma[i], beta[i] = renorm_backward(
            params.renorm[i],
            trace.caches[i],
            grad,
        )
        grad = grad * (trace.pre_activations[i] > 0)
        layer = params.dense[i]
        grad, grad_w, bias[i] = dense_backward(layer, trace.inputs[i], grad)
        weights[i] = grad_w + layer.l1 * numpy.sign(layer.weights)

    return HeadGradients(
        weights=tuple(weights),
        bias=tuple(bias),
        gamma=tuple(gamma),
        beta=tuple(beta),
    )


def sgd_step(
    params: HeadParams,
    grads: HeadGradients,
    learning_rate: float,
) -> HeadParams:
    """Plain gradient descent update `theta - learning_rate * grad`.

    Running statistics are carried over unchanged.
    """
    dense = tuple(
        dataclasses.replace(
            layer,
            weights=layer.weights - learning_rate * grad_w,
            bias=layer.bias - learning_rate * grad_b,
        )
        for layer, grad_w, grad_b in zip(
            params.dense,
            grads.weights,
            grads.bias,
        )
    )
    renorm = tuple(
        dataclasses.replace(
            layer,
            gamma=layer.gamma - learning_rate * grad_g,
            beta=layer.beta - learning_rate * grad_b,
        )
        for layer, grad_g, grad_b in zip(
            params.renorm,
            grads.gamma,
            grads.beta,
        )
    )
    return HeadParams(dense=dense, renorm=renorm)
