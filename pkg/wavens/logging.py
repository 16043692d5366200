"""Log levels, handlers and progress messages.

Three custom levels sit around the standard ones:

* `RUN` (22): the CLI harness (arguments, configuration, environment).
* `CMD` (21): one line per stage of a command.
* `TRACE` (5): per-epoch head training and per-chunk grid search detail.

The default console level is `INFO` so `RUN` and `CMD` lines are shown and
`TRACE` lines are not. A level of `TRACE` shows everything.
"""

from __future__ import annotations

import logging
import pathlib
import sys
from typing import Any

RUN_LOG_LEVEL = 22
CMD_LOG_LEVEL = 21
TRACE_LOG_LEVEL = 5

_FORMAT = (
    '[%(asctime)s.%(msecs)03d] %(levelname)-5s (%(name)s) > %(message)s'
)


class ProgressLog:
    """Log the progress of a loop over a known number of steps.

    Every step is logged at `TRACE`. The first step to reach each
    `every`-percent milestone, and the last step, are logged at `CMD`
    instead so a long grid search reports a handful of lines at the
    default level.

    Args:
        logger: Logger to write to.
        label: Plural noun for the steps (e.g., `'lattice chunks'`).
        total: Number of steps.
        every: Milestone spacing in percent.
    """

    def __init__(
        self,
        logger: logging.Logger,
        label: str,
        total: int,
        every: int = 10,
    ) -> None:
        if total < 1:
            raise ValueError(f'Total must be positive. Got {total}.')
        if not 0 < every <= 100:  # noqa: PLR2004
            raise ValueError(f'Every must be in (0, 100]. Got {every}.')
        self.logger = logger
        self.label = label
        self.total = total
        self.every = every
        self.done = 0
        self._milestone = 0

    def step(self, detail: str = '') -> int:
        """Count one step and log it; returns the level used."""
        self.done += 1
        percent = 100 * self.done // self.total
        level = TRACE_LOG_LEVEL
        milestone = percent >= self._milestone + self.every
        if milestone or self.done == self.total:
            self._milestone = percent - percent % self.every
            level = CMD_LOG_LEVEL
        suffix = f' ({detail})' if detail else ''
        self.logger.log(
            level,
            f'{self.label} {self.done}/{self.total} [{percent}%]{suffix}',
        )
        return level


def init_logging(
    logfile: pathlib.Path | None = None,
    level: int | str = logging.INFO,
    logfile_level: int | str | None = None,
    force: bool = False,
) -> None:
    """Register the custom levels and attach console and file handlers.

    Usage:
        ```python
        import logging
        from wavens.logging import init_logging
        from wavens.logging import CMD_LOG_LEVEL

        init_logging(...)

        logger = logging.getLogger(__name__)
        logger.log(CMD_LOG_LEVEL, 'message')
        ```

    Args:
        logfile: Optional filepath to write log to.
        level: Minimum console level. Names of the custom levels are
            accepted.
        logfile_level: Minimum logfile level. If `None`, defaults to
            `level`.
        force: Remove any existing handlers attached to the root
            handler. Note: should not be set when running inside pytest.
    """
    logging.addLevelName(RUN_LOG_LEVEL, 'RUN')
    logging.addLevelName(CMD_LOG_LEVEL, 'CMD')
    logging.addLevelName(TRACE_LOG_LEVEL, 'TRACE')

    stdout_handler = logging.StreamHandler(sys.stdout)
    stdout_handler.setLevel(level)

    handlers: list[logging.Handler] = [stdout_handler]
    if logfile is not None:
        logfile.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(logfile)
        handler.setLevel(level if logfile_level is None else logfile_level)
        handlers.append(handler)

    kwargs: dict[str, Any] = {}
    if force:  # pragma: no cover
        kwargs['force'] = force

    logging.basicConfig(
        format=_FORMAT,
        datefmt='%Y-%m-%d %H:%M:%S',
        level=TRACE_LOG_LEVEL,
        handlers=handlers,
        **kwargs,
    )

    # Must follow basicConfig so py.warnings reaches the handlers above.
    logging.captureWarnings(True)
