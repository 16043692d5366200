"""Per-epoch training history records.

A history file is JSON lines: one object per epoch with sorted keys. Epochs
are numbered from one and must be logged in order.
"""

from __future__ import annotations

import json
import pathlib
import sys
from types import TracebackType
from typing import Any
from typing import Dict
from typing import Protocol

if sys.version_info >= (3, 10):  # pragma: >=3.10 cover
    from typing import TypeAlias
else:  # pragma: <3.10 cover
    from typing_extensions import TypeAlias

if sys.version_info >= (3, 11):  # pragma: >=3.11 cover
    from typing import Self
else:  # pragma: <3.11 cover
    from typing_extensions import Self

from wavens.errors import FormatError

Record: TypeAlias = Dict[str, Any]
"""One epoch of training history."""


class RecordLogger(Protocol):
    """Sink for the history records of a training run."""

    def __enter__(self) -> Self: ...

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_value: BaseException | None,
        exc_traceback: TracebackType | None,
    ) -> None: ...

    def log(self, record: Record) -> None:
        """Log the record of the next epoch."""
        ...

    def close(self) -> None:
        """Close the logger."""
        ...


class _ClosingLogger:
    def __enter__(self) -> Self:
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_value: BaseException | None,
        exc_traceback: TracebackType | None,
    ) -> None:
        self.close()

    def close(self) -> None:
        return


class JSONRecordLogger(_ClosingLogger):
    """Write a history file.

    The file is truncated when opened so a rerun into the same directory
    does not mix histories. Each line is flushed as it is written so the
    history of an interrupted run is kept.

    Args:
        filepath: History file to write.

    Raises:
        ValueError: If a record's `epoch` does not follow the previous one.
    """

    def __init__(self, filepath: pathlib.Path | str) -> None:
        self.filepath = pathlib.Path(filepath)
        self.filepath.parent.mkdir(parents=True, exist_ok=True)
        self.count = 0
        self._handle = open(self.filepath, 'w')  # noqa: SIM115

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(filepath='{self.filepath.name}', "
            f'count={self.count})'
        )

    def log(self, record: Record) -> None:
        """Append the record of the next epoch."""
        epoch = record.get('epoch', self.count + 1)
        if epoch != self.count + 1:
            raise ValueError(
                f'Expected the record of epoch {self.count + 1}. '
                f'Got epoch {epoch}.',
            )
        line = json.dumps(record, sort_keys=True, allow_nan=False)
        self._handle.write(line + '\n')
        self._handle.flush()
        self.count += 1

    def close(self) -> None:
        """Close the file."""
        self._handle.close()


class NullRecordLogger(_ClosingLogger):
    """Discard history records."""

    def __repr__(self) -> str:
        return type(self).__name__

    def log(self, record: Record) -> None:
        """Discard the record."""
        return


def read_records(filepath: pathlib.Path | str) -> list[Record]:
    """Read a history file.

    Blank lines are skipped.

    Raises:
        FormatError: If a line is not a JSON object.
    """
    records: list[Record] = []
    with open(filepath) as f:
        for row, line in enumerate(f):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                reason = f'not valid JSON ({e})'
                raise FormatError(filepath, reason, row) from e
            if not isinstance(record, dict):
                raise FormatError(filepath, 'expected a JSON object', row)
            records.append(record)
    return records
