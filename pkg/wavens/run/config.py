from __future__ import annotations

import os
import pathlib
from datetime import datetime

from wavens.commands import CommandConfig
from wavens.commands._protocol import OUTPUT_DIR_ENV

DIR_FORMAT = 'runs/{name}_{timestamp}'
"""Default run directory relative to the working directory."""


def make_run_dir(config: CommandConfig) -> pathlib.Path:
    """Create and return the run directory of a command.

    The directory is `config.out` if set, else the value of
    `$WAVENS_OUTPUT_DIR` if set and non-empty, else
    `runs/{command}_{timestamp}`.
    """
    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if config.out is not None:
        run_dir = config.out
    elif env_dir:
        run_dir = pathlib.Path(env_dir)
    else:
        timestamp = datetime.now().strftime('%Y-%m-%d-%H-%M-%S')
        run_dir = pathlib.Path(
            DIR_FORMAT.format(name=config.name, timestamp=timestamp),
        )
    run_dir.mkdir(parents=True, exist_ok=True)
    return run_dir.resolve()
