from __future__ import annotations

import pathlib

import pytest

from wavens.errors import DegenerateClassError
from wavens.errors import DivergenceError
from wavens.errors import FormatError
from wavens.errors import LabelRangeError
from wavens.errors import ShapeError
from wavens.errors import WavensError


def test_shape_error_attributes() -> None:
    error = ShapeError('bad', expected=(2, 3), actual=(3, 2))
    assert error.expected == (2, 3)
    assert error.actual == (3, 2)
    assert 'expected=(2, 3)' in str(error)
    assert isinstance(error, ValueError)
    assert isinstance(error, WavensError)


def test_label_range_error() -> None:
    error = LabelRangeError(5, 3)
    assert (error.label, error.num_classes) == (5, 3)


def test_format_error_row() -> None:
    error = FormatError('a.csv', 'broken', row=4)
    assert error.path == pathlib.Path('a.csv')
    assert error.row == 4
    assert 'a.csv (row 4): broken' in str(error)
    assert FormatError('a.csv', 'broken').row is None


def test_degenerate_class_error() -> None:
    error = DegenerateClassError(1, 0, 10)
    assert error.positives == 0
    assert error.negatives == 10


def test_divergence_error_is_arithmetic() -> None:
    with pytest.raises(ArithmeticError):
        raise DivergenceError('nan loss')
