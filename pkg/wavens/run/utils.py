from __future__ import annotations

import contextlib
import os
import pathlib
from collections.abc import Mapping
from collections.abc import MutableMapping
from typing import Any
from typing import Generator

from pydantic import BaseModel
from pydantic import ValidationError

INLINE_ITEMS = 3
"""Longest list `prettify_mapping()` writes on one line."""


@contextlib.contextmanager
def change_cwd(
    dest: pathlib.Path | str,
) -> Generator[pathlib.Path, None, None]:
    """Temporarily change the working directory (created if missing).

    Yields:
        Absolute path of `dest`.
    """
    origin = pathlib.Path.cwd().absolute()
    dest = pathlib.Path(dest).absolute()
    dest.mkdir(parents=True, exist_ok=True)
    os.chdir(dest)
    try:
        yield dest
    finally:
        os.chdir(origin)


def flatten_mapping(
    mapping: MutableMapping[str, Any],
    parent_key: str = '',
    separator: str = '.',
) -> dict[str, Any]:
    """Flatten nested mappings into dotted keys.

    Example:
        ```python
        >>> flatten_mapping({'step': 0.1, 'logging': {'level': 'DEBUG'}})
        {'step': 0.1, 'logging.level': 'DEBUG'}
        ```
    """
    items: dict[str, Any] = {}
    for key, value in mapping.items():
        new_key = f'{parent_key}{separator}{key}' if parent_key else key
        if isinstance(value, MutableMapping):
            items.update(flatten_mapping(value, new_key, separator))
        else:
            items[new_key] = value
    return items


def prettify_mapping(
    mapping: Mapping[str, Any],
    level: int = 0,
    indent: int = 2,
) -> str:
    """Format a nested mapping as indented `key: value` lines.

    Keys are sorted with `name` first. Lists longer than three items are
    written one item per line.

    Example:
        ```python
        >>> print(prettify_mapping({'step': 0.1, 'name': 'ensemble-tune'}))
        name: 'ensemble-tune'
        step: 0.1
        ```
    """
    lines: list[str] = []
    space = ' ' * indent * level
    keys = sorted(mapping.keys(), key=lambda k: (k != 'name', k))

    for key in keys:
        value = mapping[key]
        if isinstance(value, Mapping):
            lines.append(f'{space}{key}:')
            if len(value) > 0:
                lines.append(prettify_mapping(value, level + 1, indent))
        elif isinstance(value, (list, tuple)) and len(value) > INLINE_ITEMS:
            lines.append(f'{space}{key}:')
            item_space = ' ' * indent * (level + 1)
            lines.extend(f'{item_space}- {item!r}' for item in value)
        else:
            lines.append(f'{space}{key}: {value!r}')

    return '\n'.join(lines)


def prettify_validation_error(
    error: ValidationError,
    model: type[BaseModel] | None = None,
) -> ValueError:
    """Convert a validation error into a readable ValueError.

    Each error becomes an entry naming the option (as a CLI flag), the
    message, and the rejected input, e.g.:
    ```
    Found 1 validation error for wavens.commands.configs.ensemble.EnsembleTuneConfig
      - --step: Input should be less than or equal to 1
        Input (str): '1.5'
        Error type: less_than_equal
    ```
    """  # noqa: E501
    entries: list[str] = []
    for e in error.errors():
        option = '.'.join(str(part) for part in e['loc'])
        flag = f'--{option.replace("_", "-")}' if option else '(config)'
        input_ = e['input']
        entries.append(
            f'  - {flag}: {e["msg"]}\n'
            f'    Input ({type(input_).__name__}): {input_!r}\n'
            f'    Error type: {e["type"]}',
        )

    count = error.error_count()
    plural = '' if count == 1 else 's'
    model_str = (
        '' if model is None else f' for {model.__module__}.{model.__name__}'
    )
    return ValueError(
        f'Found {count} validation error{plural}{model_str}\n'
        + '\n'.join(entries),
    )
