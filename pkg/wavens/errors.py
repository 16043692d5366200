"""Exception types raised by wavens.

Every exception derives from [`WavensError`][wavens.errors.WavensError]
and from the closest builtin (usually [`ValueError`][ValueError]) so
callers can catch either. The extra attributes describe what went wrong
without parsing the message.
"""

from __future__ import annotations

import pathlib
from typing import Sequence


class WavensError(Exception):
    """Base exception for all wavens errors."""

    pass


class ShapeError(WavensError, ValueError):
    """Array shapes are incompatible.

    Args:
        message: Description of the operation that failed.
        expected: Expected shape (or shapes).
        actual: Actual shape (or shapes).
    """

    def __init__(
        self,
        message: str,
        expected: Sequence[object],
        actual: Sequence[object],
    ) -> None:
        super().__init__(
            f'{message} (expected={tuple(expected)}, actual={tuple(actual)})',
        )
        self.expected = tuple(expected)
        self.actual = tuple(actual)


class EmptyInputError(WavensError, ValueError):
    """An input that must be non-empty was empty."""

    def __init__(self, what: str) -> None:
        super().__init__(f'Expected a non-empty {what}.')
        self.what = what


class NonFiniteError(WavensError, ValueError):
    """An input contains NaN or infinite values."""

    def __init__(self, what: str, count: int) -> None:
        super().__init__(
            f'Found {count} non-finite value(s) in {what}.',
        )
        self.what = what
        self.count = count


class LabelRangeError(WavensError, ValueError):
    """A class label is outside of `[0, num_classes)`."""

    def __init__(self, label: int, num_classes: int) -> None:
        super().__init__(
            f'Label {label} is out of range for {num_classes} classes.',
        )
        self.label = label
        self.num_classes = num_classes


class WeightError(WavensError, ValueError):
    """An ensemble weight vector is invalid."""

    pass


class SubsetError(WavensError, ValueError):
    """A model subset is empty, has duplicates, or is out of range."""

    pass


class SplitError(WavensError, ValueError):
    """A dataset cannot be split as requested."""

    pass


class DegenerateClassError(WavensError, ValueError):
    """A ROC curve was requested for a class lacking positives or negatives."""

    def __init__(self, class_index: int, positives: int, negatives: int):
        super().__init__(
            f'Class {class_index} needs at least one positive and one '
            f'negative sample (positives={positives}, '
            f'negatives={negatives}).',
        )
        self.class_index = class_index
        self.positives = positives
        self.negatives = negatives


class InfeasibleTargetError(WavensError, ValueError):
    """A synthetic accuracy target cannot be realized."""

    pass


class DivergenceError(WavensError, ArithmeticError):
    """Training produced a NaN monitored value."""

    pass


class FormatError(WavensError, ValueError):
    """A file does not follow its declared format.

    Args:
        path: File that failed validation.
        reason: What is wrong with the file.
        row: Optional zero-indexed data row that failed validation.
    """

    def __init__(
        self,
        path: pathlib.Path | str,
        reason: str,
        row: int | None = None,
    ) -> None:
        where = f'{path}' if row is None else f'{path} (row {row})'
        super().__init__(f'Invalid file {where}: {reason}')
        self.path = pathlib.Path(path)
        self.reason = reason
        self.row = row
