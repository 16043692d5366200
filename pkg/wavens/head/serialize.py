"""Versioned JSON documents of trained heads.

Floats are stored as hexadecimal strings (`float.hex()`) so a save/load
round trip is bit-exact.
"""

from __future__ import annotations

import json
import pathlib
from typing import Any

import numpy
import pydantic

from wavens.errors import FormatError
from wavens.head.layers import BatchRenormLayer
from wavens.head.layers import DenseLayer
from wavens.head.model import HeadConfig
from wavens.head.model import HeadParams
from wavens.numerics import Array

HEAD_FORMAT_VERSION = 1
"""Version of the head parameter document."""


def _encode(values: Array) -> list[str]:
    return [float(v).hex() for v in values.ravel()]


def _decode(values: list[str], shape: tuple[int, ...]) -> Array:
    array = numpy.array([float.fromhex(v) for v in values], dtype=float)
    return array.reshape(shape)


def head_to_dict(params: HeadParams, config: HeadConfig) -> dict[str, Any]:
    """Encode a head as a JSON-compatible document."""
    return {
        'format_version': HEAD_FORMAT_VERSION,
        'config': config.model_dump(mode='json'),
        'dense': [
            {
                'shape': list(layer.weights.shape),
                'weights': _encode(layer.weights),
                'bias': _encode(layer.bias),
                'l1': float(layer.l1).hex(),
            }
            for layer in params.dense
        ],
        'renorm': [
            {
                'dim': layer.dim,
                'gamma': _encode(layer.gamma),
                'beta': _encode(layer.beta),
                'running_mean': _encode(layer.running_mean),
                'running_var': _encode(layer.running_var),
                'epsilon': float(layer.epsilon).hex(),
                'r_max': float(layer.r_max).hex(),
                'd_max': float(layer.d_max).hex(),
                'momentum': float(layer.momentum).hex(),
            }
            for layer in params.renorm
        ],
    }


def head_from_dict(document: dict[str, Any]) -> tuple[HeadParams, HeadConfig]:
    """Decode a document produced by [`head_to_dict()`][wavens.head.serialize.head_to_dict].

    Raises:
        KeyError: If a field is missing.
        ValueError: If the version or any value is invalid.
    """  # noqa: E501
    version = document['format_version']
    if version != HEAD_FORMAT_VERSION:
        raise ValueError(
            f'Unsupported head format version {version}. '
            f'Expected {HEAD_FORMAT_VERSION}.',
        )
    config = HeadConfig.model_validate(document['config'])
    dense = []
    for layer in document['dense']:
        shape = tuple(layer['shape'])
        dense.append(
            DenseLayer(
                weights=_decode(layer['weights'], shape),
                bias=_decode(layer['bias'], (shape[0],)),
                l1=float.fromhex(layer['l1']),
            ),
        )
    renorm = []
    for layer in document['renorm']:
        dim = (layer['dim'],)
        renorm.append(
            BatchRenormLayer(
                gamma=_decode(layer['gamma'], dim),
                beta=_decode(layer['beta'], dim),
                running_mean=_decode(layer['running_mean'], dim),
                running_var=_decode(layer['running_var'], dim),
                epsilon=float.fromhex(layer['epsilon']),
                r_max=float.fromhex(layer['r_max']),
                d_max=float.fromhex(layer['d_max']),
                momentum=float.fromhex(layer['momentum']),
            ),
        )
    params = HeadParams(dense=tuple(dense), renorm=tuple(renorm))
    if params.input_dim != config.input_dim or (
        params.num_classes != config.num_classes
    ):
        raise ValueError(
            'Layer dimensions do not match the stored configuration.',
        )
    return params, config


def save_head(
    filepath: pathlib.Path | str,
    params: HeadParams,
    config: HeadConfig,
) -> None:
    """Write a head document to `filepath`."""
    filepath = pathlib.Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w') as f:
        json.dump(head_to_dict(params, config), f, indent=2)


def load_head(filepath: pathlib.Path | str) -> tuple[HeadParams, HeadConfig]:
    """Read a head document.

    Raises:
        FormatError: If the file is not a valid head document.
    """
    with open(filepath) as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(filepath, f'not valid JSON ({e})') from e
    try:
        return head_from_dict(document)
    except (KeyError, TypeError, ValueError, pydantic.ValidationError) as e:
        raise FormatError(filepath, f'invalid head document ({e})') from e
