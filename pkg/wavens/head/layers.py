"""Layers of the classifier head.

Each layer is an immutable dataclass holding numpy arrays. Forward
functions are pure: layers that keep running statistics return an updated
copy instead of mutating their input.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import field
from typing import NamedTuple

import numpy

from wavens.errors import ShapeError
from wavens.numerics import Array
from wavens.numerics import as_matrix
from wavens.numerics import as_vector
from wavens.numerics import relu
from wavens.numerics import SeededRng
from wavens.numerics import softmax


class Mode(enum.Enum):
    """Forward-pass mode."""

    TRAIN = 'train'
    """Batch statistics, dropout active, running statistics updated."""
    EVAL = 'eval'
    """Running statistics, dropout disabled."""


class Activation(enum.Enum):
    """Dense layer activation."""

    RELU = 'relu'
    SOFTMAX = 'softmax'
    NONE = 'none'


@dataclasses.dataclass(frozen=True, eq=False)
class DenseLayer:
    """Fully connected layer `activation(x @ W.T + b)`."""

    weights: Array = field(
        metadata={'description': 'Weight matrix (out_dim x in_dim).'},
    )
    bias: Array = field(metadata={'description': 'Bias vector (out_dim).'})
    l1: float = field(
        default=0.0001,
        metadata={'description': 'L1 penalty coefficient on the weights.'},
    )

    def __post_init__(self) -> None:
        weights = as_matrix(self.weights, 'dense weights')
        bias = as_vector(self.bias, 'dense bias')
        if bias.shape[0] != weights.shape[0]:
            raise ShapeError(
                'dense bias length must equal the output dimension',
                expected=(weights.shape[0],),
                actual=bias.shape,
            )
        if self.l1 < 0:
            raise ValueError(
                f'L1 coefficient must be non-negative. Got {self.l1}.',
            )
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'bias', bias)

    @property
    def in_dim(self) -> int:
        """Input dimension."""
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        """Output dimension."""
        return self.weights.shape[0]


@dataclasses.dataclass(frozen=True, eq=False)
class BatchRenormLayer:
    """Batch renormalization layer.

    With `r_max=1` and `d_max=0` the layer is plain batch normalization.
    """

    gamma: Array = field(metadata={'description': 'Learned scale.'})
    beta: Array = field(metadata={'description': 'Learned shift.'})
    running_mean: Array = field(
        metadata={'description': 'Moving average of batch means.'},
    )
    running_var: Array = field(
        metadata={'description': 'Moving average of batch variances.'},
    )
    epsilon: float = field(
        default=1e-3,
        metadata={'description': 'Variance offset.'},
    )
    r_max: float = field(
        default=3.0,
        metadata={'description': 'Clip bound of the scale correction r.'},
    )
    d_max: float = field(
        default=5.0,
        metadata={'description': 'Clip bound of the shift correction d.'},
    )
    momentum: float = field(
        default=0.99,
        metadata={'description': 'Running statistics momentum.'},
    )

    def __post_init__(self) -> None:
        arrays = {
            name: as_vector(getattr(self, name), name)
            for name in ('gamma', 'beta', 'running_mean', 'running_var')
        }
        dims = {value.shape[0] for value in arrays.values()}
        if len(dims) != 1:
            raise ShapeError(
                'batch renorm parameters must share one dimension',
                expected=(max(dims),),
                actual=tuple(v.shape[0] for v in arrays.values()),
            )
        if numpy.any(arrays['running_var'] < 0):
            raise ValueError('Running variance must be non-negative.')
        if self.epsilon <= 0:
            raise ValueError(f'Epsilon must be positive. Got {self.epsilon}.')
        if self.r_max < 1 or self.d_max < 0:
            raise ValueError(
                'Expected r_max >= 1 and d_max >= 0. '
                f'Got r_max={self.r_max} and d_max={self.d_max}.',
            )
        if not 0 < self.momentum <= 1:
            raise ValueError(
                f'Momentum must be in (0, 1]. Got {self.momentum}.',
            )
        for name, value in arrays.items():
            object.__setattr__(self, name, value)

    @property
    def dim(self) -> int:
        """Feature dimension."""
        return self.gamma.shape[0]

    @classmethod
    def fresh(
        cls,
        dim: int,
        *,
        epsilon: float = 1e-3,
        r_max: float = 3.0,
        d_max: float = 5.0,
        momentum: float = 0.99,
    ) -> BatchRenormLayer:
        """Layer with `gamma=1`, `beta=0`, zero mean and unit variance."""
        return cls(
            gamma=numpy.ones(dim),
            beta=numpy.zeros(dim),
            running_mean=numpy.zeros(dim),
            running_var=numpy.ones(dim),
            epsilon=epsilon,
            r_max=r_max,
            d_max=d_max,
            momentum=momentum,
        )


@dataclasses.dataclass(frozen=True)
class DropoutSpec:
    """Inverted dropout configuration."""

    rate: float = field(
        default=0.3,
        metadata={'description': 'Probability of zeroing an activation.'},
    )
    mode: Mode = field(
        default=Mode.TRAIN,
        metadata={'description': 'Dropout is the identity in eval mode.'},
    )

    def __post_init__(self) -> None:
        if not 0 <= self.rate < 1:
            raise ValueError(
                f'Dropout rate must be in [0, 1). Got {self.rate}.',
            )


class RenormCache(NamedTuple):
    """Train-mode intermediates needed by the backward pass."""

    normalized: Array
    inv_std: Array
    r: Array
    d: Array


def _check_input(x: Array, in_dim: int, what: str) -> None:
    if x.ndim != 2 or x.shape[1] != in_dim:  # noqa: PLR2004
        raise ShapeError(
            f'{what} input has the wrong shape',
            expected=('batch', in_dim),
            actual=x.shape,
        )


def dense_affine(layer: DenseLayer, x: Array) -> Array:
    """Pre-activation `x @ W.T + b`.

    Raises:
        ShapeError: If `x.cols != layer.in_dim`.
    """
    _check_input(x, layer.in_dim, 'dense')
    return x @ layer.weights.T + layer.bias


def apply_activation(z: Array, activation: Activation) -> Array:
    """Apply `activation` to every row of `z`."""
    if activation is Activation.RELU:
        return relu(z)
    elif activation is Activation.SOFTMAX:
        return softmax(z, axis=1)
    return z


def dense_forward(
    layer: DenseLayer,
    x: Array,
    activation: Activation = Activation.NONE,
) -> Array:
    """Dense layer forward pass.

    Args:
        layer: Dense layer.
        x: Input matrix of shape `[batch, in_dim]`.
        activation: Activation applied to the affine output.

    Returns:
        Matrix of shape `[batch, out_dim]`.

    Raises:
        ShapeError: If `x.cols != layer.in_dim`.
    """
    return apply_activation(dense_affine(layer, x), activation)


def dense_backward(
    layer: DenseLayer,
    x: Array,
    grad_z: Array,
) -> tuple[Array, Array, Array]:
    """Gradients of a dense layer given the gradient of its pre-activation.

    Returns:
        Tuple of gradients w.r.t. the input, the weights, and the bias.
    """
    return grad_z @ layer.weights, grad_z.T @ x, grad_z.sum(axis=0)


def renorm_train(
    layer: BatchRenormLayer,
    x: Array,
    corrections: tuple[Array, Array] | None = None,
) -> tuple[Array, BatchRenormLayer, RenormCache]:
    """Train-mode batch renormalization with backward intermediates.

    Args:
        layer: Batch renorm layer.
        x: Batch of shape `[batch, dim]` with `batch >= 2`.
        corrections: Use these `(r, d)` instead of deriving them from
            the batch and running statistics. Used to evaluate the loss
            surface the backward pass differentiates.

    Returns:
        Output, layer with updated running statistics, and the cache.

    Raises:
        ShapeError: If `x` has the wrong width or fewer than two rows.
    """
    _check_input(x, layer.dim, 'batch renorm')
    if x.shape[0] < 2:  # noqa: PLR2004
        raise ShapeError(
            'train-mode batch renorm needs at least two samples',
            expected=('>=2', layer.dim),
            actual=x.shape,
        )

    batch_mean = x.mean(axis=0)
    batch_var = x.var(axis=0)
    batch_std = numpy.sqrt(batch_var + layer.epsilon)
    inv_std = 1.0 / batch_std
    normalized = (x - batch_mean) / batch_std

    if corrections is None:
        running_std = numpy.sqrt(layer.running_var + layer.epsilon)
        r = numpy.clip(batch_std / running_std, 1 / layer.r_max, layer.r_max)
        d = numpy.clip(
            (batch_mean - layer.running_mean) / running_std,
            -layer.d_max,
            layer.d_max,
        )
    else:
        r, d = corrections

    y = layer.gamma * (r * normalized + d) + layer.beta

    momentum = layer.momentum
    updated = dataclasses.replace(
        layer,
        running_mean=momentum * layer.running_mean
        + (1 - momentum) * batch_mean,
        running_var=momentum * layer.running_var + (1 - momentum) * batch_var,
    )
    return y, updated, RenormCache(normalized, inv_std, r, d)


def renorm_eval(layer: BatchRenormLayer, x: Array) -> Array:
    """Eval-mode batch renormalization using the running statistics."""
    _check_input(x, layer.dim, 'batch renorm')
    running_std = numpy.sqrt(layer.running_var + layer.epsilon)
    normalized = (x - layer.running_mean) / running_std
    return layer.gamma * normalized + layer.beta


def batch_renorm_forward(
    layer: BatchRenormLayer,
    x: Array,
    mode: Mode,
) -> tuple[Array, BatchRenormLayer]:
    """Batch renormalization forward pass.

    In train mode, features are normalized with the batch mean and
    variance, then corrected by `r = clip(std_B / std_run, 1/r_max, r_max)`
    and `d = clip((mean_B - mean_run) / std_run, -d_max, d_max)` where
    `std = sqrt(var + epsilon)`, giving `gamma * (r * x_hat + d) + beta`.
    The running statistics are updated with an exponential moving average.
    In eval mode, the running statistics are used (`r = 1`, `d = 0`) and
    the layer is returned unchanged.

    Returns:
        Output matrix and the (possibly updated) layer.

    Raises:
        ShapeError: If the input width is wrong, or in train mode the batch
            has fewer than two samples.
    """
    if mode is Mode.TRAIN:
        y, updated, _ = renorm_train(layer, x)
        return y, updated
    return renorm_eval(layer, x), layer


def renorm_backward(
    layer: BatchRenormLayer,
    cache: RenormCache,
    grad_y: Array,
) -> tuple[Array, Array, Array]:
    """Train-mode batch renorm gradients.

    The corrections `r` and `d` are treated as constants.

    Returns:
        Tuple of gradients w.r.t. the input, `gamma`, and `beta`.
    """
    normalized, inv_std, r, d = cache
    batch = grad_y.shape[0]

    grad_gamma = numpy.sum(grad_y * (r * normalized + d), axis=0)
    grad_beta = numpy.sum(grad_y, axis=0)

    grad_norm = grad_y * layer.gamma * r
    grad_x = (inv_std / batch) * (
        batch * grad_norm
        - grad_norm.sum(axis=0)
        - normalized * numpy.sum(grad_norm * normalized, axis=0)
    )
    return grad_x, grad_gamma, grad_beta


def dropout_mask(
    spec: DropoutSpec,
    shape: tuple[int, ...],
    rng: SeededRng,
) -> Array | None:
    """Draw an inverted-dropout mask.

    Returns:
        Matrix of zeros and `1 / (1 - rate)` values, or `None` when dropout
        is the identity (eval mode or zero rate). No random numbers are
        drawn in that case.
    """
    if spec.mode is Mode.EVAL or spec.rate == 0:
        return None
    keep = rng.random(shape) >= spec.rate
    return keep / (1.0 - spec.rate)


def dropout_forward(spec: DropoutSpec, x: Array, rng: SeededRng) -> Array:
    """Inverted dropout.

    In train mode each entry is zeroed independently with probability
    `rate` and survivors are scaled by `1 / (1 - rate)`. Eval mode (or a
    zero rate) returns an exact copy of `x`.
    """
    mask = dropout_mask(spec, x.shape, rng)
    if mask is None:
        return x.copy()
    return x * mask
