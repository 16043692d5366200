"""Dense linear-algebra and elementwise kernels.

All values are 64-bit floats. A *matrix* is a two-dimensional
[`numpy.ndarray`][numpy.ndarray] of `float64` stored in row-major order and
a *vector* is a one-dimensional one. Functions here are pure and safe to
call concurrently.
"""

from __future__ import annotations

import sys
from typing import Any
from typing import Sequence

if sys.version_info >= (3, 10):  # pragma: >=3.10 cover
    from typing import TypeAlias
else:  # pragma: <3.10 cover
    from typing_extensions import TypeAlias

import numpy
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from wavens.errors import EmptyInputError
from wavens.errors import NonFiniteError
from wavens.errors import ShapeError

Array: TypeAlias = NDArray[numpy.float64]
"""Float64 vector or matrix."""
IntArray: TypeAlias = NDArray[numpy.int64]
"""Int64 vector of indices or counts."""

RNG_ALGORITHM = 'PCG64'
"""Bit generator behind [`SeededRng`][wavens.numerics.SeededRng]."""


def _check_finite(values: Array, name: str) -> None:
    bad = int(numpy.count_nonzero(~numpy.isfinite(values)))
    if bad > 0:
        raise NonFiniteError(name, bad)


def as_matrix(values: ArrayLike, name: str = 'matrix') -> Array:
    """Convert values to a validated float64 matrix.

    Args:
        values: Nested sequence or array with two dimensions.
        name: Name used in error messages.

    Returns:
        C-contiguous float64 copy of `values`.

    Raises:
        ShapeError: If `values` is not two-dimensional.
        NonFiniteError: If any entry is NaN or infinite.
    """
    matrix = numpy.array(values, dtype=numpy.float64, order='C')
    if matrix.ndim != 2:  # noqa: PLR2004
        raise ShapeError(
            f'{name} must be two-dimensional',
            expected=('rows', 'cols'),
            actual=matrix.shape,
        )
    _check_finite(matrix, name)
    return matrix


def as_vector(values: ArrayLike, name: str = 'vector') -> Array:
    """Convert values to a validated float64 vector.

    Raises:
        ShapeError: If `values` is not one-dimensional.
        NonFiniteError: If any entry is NaN or infinite.
    """
    vector = numpy.array(values, dtype=numpy.float64)
    if vector.ndim != 1:
        raise ShapeError(
            f'{name} must be one-dimensional',
            expected=('length',),
            actual=vector.shape,
        )
    _check_finite(vector, name)
    return vector


def identity(n: int) -> Array:
    """Return the `n` x `n` identity matrix."""
    return numpy.eye(n, dtype=numpy.float64)


def matmul(a: Array, b: Array) -> Array:
    """Matrix product `a @ b`.

    Raises:
        ShapeError: If `a.cols != b.rows` or either input is not a matrix.
    """
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:  # noqa: PLR2004
        raise ShapeError(
            'cannot multiply matrices',
            expected=(a.shape, ('cols_a', '*')),
            actual=(a.shape, b.shape),
        )
    return numpy.matmul(a, b)


def relu(x: Array) -> Array:
    """Elementwise `max(0, x)`."""
    return numpy.maximum(x, 0.0)


def softmax(logits: Array, axis: int = -1) -> Array:
    """Numerically stable softmax along `axis`.

    The maximum along `axis` is subtracted before exponentiating, so the
    result is unchanged by adding a constant to every logit and stays
    finite for large magnitudes.

    Raises:
        EmptyInputError: If `logits` has no entries along `axis`.
        NonFiniteError: If any logit is NaN or infinite.
    """
    logits = numpy.asarray(logits, dtype=numpy.float64)
    if logits.ndim == 0 or logits.shape[axis] == 0:
        raise EmptyInputError('logit vector')
    _check_finite(logits, 'logits')
    shifted = logits - numpy.max(logits, axis=axis, keepdims=True)
    exp = numpy.exp(shifted)
    return exp / numpy.sum(exp, axis=axis, keepdims=True)


def argmax(x: Sequence[float] | Array) -> int:
    """Index of the largest entry; ties go to the lowest index.

    Raises:
        EmptyInputError: If `x` is empty.
    """
    values = numpy.asarray(x, dtype=numpy.float64)
    if values.size == 0:
        raise EmptyInputError('vector')
    # numpy.argmax returns the first occurrence of the maximum.
    return int(numpy.argmax(values))


def row_argmax(matrix: Array) -> IntArray:
    """Row-wise [`argmax`][wavens.numerics.argmax] with the same tie rule.

    Raises:
        EmptyInputError: If the rows have no columns.
    """
    if matrix.ndim != 2 or matrix.shape[1] == 0:  # noqa: PLR2004
        raise EmptyInputError('matrix row')
    return numpy.argmax(matrix, axis=1).astype(numpy.int64)


def one_hot(labels: IntArray, num_classes: int) -> Array:
    """Encode integer labels as float64 one-hot rows."""
    encoded = numpy.zeros((len(labels), num_classes), dtype=numpy.float64)
    encoded[numpy.arange(len(labels)), labels] = 1.0
    return encoded


class SeededRng:
    """Deterministic random source.

    Wraps a [`numpy.random.Generator`][numpy.random.Generator] backed by the
    `PCG64` bit generator. Identical `(seed, stream)` pairs produce
    bit-identical streams on every platform numpy supports. Independent
    child streams (e.g., one per synthetic model) are derived with
    [`child()`][wavens.numerics.SeededRng.child].

    Args:
        seed: Non-negative 64-bit integer seed.
        stream: Spawn key identifying a child stream of `seed`.
    """

    algorithm = RNG_ALGORITHM

    def __init__(self, seed: int, stream: tuple[int, ...] = ()) -> None:
        if seed < 0 or seed >= 2**64:
            raise ValueError(
                f'Seed must be a 64-bit unsigned integer. Got {seed}.',
            )
        self.seed = seed
        self.stream = tuple(stream)
        sequence = numpy.random.SeedSequence(seed, spawn_key=self.stream)
        self.generator = numpy.random.Generator(numpy.random.PCG64(sequence))

    def __repr__(self) -> str:
        return (
            f'{type(self).__name__}(seed={self.seed}, stream={self.stream}, '
            f'algorithm={self.algorithm!r})'
        )

    def child(self, key: int) -> SeededRng:
        """Return an independent stream derived from this seed and `key`."""
        return SeededRng(self.seed, (*self.stream, key))

    def random(self, size: Any = None) -> Any:
        """Uniform samples in `[0, 1)`."""
        return self.generator.random(size)

    def uniform(self, low: float, high: float, size: Any = None) -> Any:
        """Uniform samples in `[low, high)`."""
        return self.generator.uniform(low, high, size)

    def normal(
        self,
        loc: float = 0.0,
        scale: float = 1.0,
        size: Any = None,
    ) -> Any:
        """Gaussian samples."""
        return self.generator.normal(loc, scale, size)

    def exponential(self, scale: float = 1.0, size: Any = None) -> Any:
        """Exponential samples with mean `scale`."""
        return self.generator.exponential(scale, size)

    def integers(self, low: int, high: int, size: Any = None) -> Any:
        """Integers in `[low, high)`."""
        return self.generator.integers(low, high, size)

    def permutation(self, n: int) -> IntArray:
        """Random permutation of `range(n)`."""
        return self.generator.permutation(n).astype(numpy.int64)
