from __future__ import annotations

import contextlib
import functools
import logging
import pathlib
import sys
from typing import Callable
from typing import Sequence

from proxystore.utils.timer import Timer
from pydantic import ValidationError

import wavens
from wavens.commands import CommandConfig
from wavens.errors import WavensError
from wavens.logging import init_logging
from wavens.logging import RUN_LOG_LEVEL
from wavens.run.config import make_run_dir
from wavens.run.env import Environment
from wavens.run.parse import parse_args_to_config
from wavens.run.utils import change_cwd
from wavens.run.utils import prettify_mapping
from wavens.run.utils import prettify_validation_error

logger = logging.getLogger('wavens.run')

CONFIG_FILENAME = 'config.toml'
ENV_FILENAME = 'environment.json'

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


def _cwd_run_dir(
    func: Callable[[CommandConfig, pathlib.Path], None],
) -> Callable[[CommandConfig, pathlib.Path], None]:
    @functools.wraps(func)
    def _decorator(config: CommandConfig, run_dir: pathlib.Path) -> None:
        with change_cwd(run_dir):
            logger.debug(f'changed working directory to {run_dir}')
            return func(config, run_dir)

    return _decorator


def _log_config_and_env(config: CommandConfig) -> None:
    env_info = Environment.collect()
    logger.log(RUN_LOG_LEVEL, f'environment:\n{env_info.format()}')
    env_info.write_json(ENV_FILENAME)
    logger.debug(f'wrote environment to {ENV_FILENAME}')
    unset = env_info.unset_threads()
    if unset:
        logger.debug(
            f'{", ".join(unset)} unset so BLAS picks its own thread '
            'count; low digits of results may vary across hosts',
        )

    logger.log(
        RUN_LOG_LEVEL,
        f'configuration:\n{prettify_mapping(config.model_dump())}',
    )
    if config.version != wavens.__version__:
        logger.warning(
            f'the configuration specifies wavens version {config.version} '
            f'but the installed version is {wavens.__version__}',
        )

    config.write_toml(CONFIG_FILENAME)
    logger.debug(f'wrote config to {CONFIG_FILENAME}')


@_cwd_run_dir
def run(config: CommandConfig, run_dir: pathlib.Path) -> None:
    """Run a command in its run directory.

    Writes the configuration and environment to the run directory, creates
    the command from the configuration, runs it, and closes it.

    Note:
        The working directory is changed to `run_dir` for the duration of
        the run. Paths in `config` are already absolute.

    Args:
        config: Command configuration.
        run_dir: Run directory.
    """
    timer = Timer()
    timer.start()

    logger.log(RUN_LOG_LEVEL, f'run directory: {run_dir}')
    _log_config_and_env(config)

    with Timer() as init_timer:
        command = config.get_command()
    logger.log(
        RUN_LOG_LEVEL,
        f'initialized command (name={config.name}, '
        f'type={type(command).__name__}, '
        f'elapsed={init_timer.elapsed_s:.3f}s)',
    )

    with contextlib.closing(command):
        command.run(run_dir)

    timer.stop()
    logger.log(
        RUN_LOG_LEVEL,
        f'finished command (name={config.name}, '
        f'elapsed={timer.elapsed_s:.3f}s)',
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Command line entry point.

    Returns:
        Exit status: 0 on success, 1 on usage and validation errors, and 2
        on IO errors.
    """
    argv = list(argv if argv is not None else sys.argv[1:])

    try:
        config = parse_args_to_config(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (None, 0) else EXIT_INVALID
    except ValidationError as e:
        print(prettify_validation_error(e), file=sys.stderr)
        return EXIT_INVALID
    except ValueError as e:
        print(e, file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(e, file=sys.stderr)
        return EXIT_IO

    try:
        run_dir = make_run_dir(config)
    except OSError as e:
        print(e, file=sys.stderr)
        return EXIT_IO

    log_file = (
        None
        if config.logging.file_name is None
        else run_dir / config.logging.file_name
    )
    init_logging(
        log_file,
        config.logging.level,
        config.logging.file_level,
        force=True,
    )
    logger.log(RUN_LOG_LEVEL, f'cli arguments: {" ".join(argv)}')

    try:
        run(config, run_dir)
    except (ValidationError, WavensError, ValueError):
        logger.exception('command failed on invalid input')
        return EXIT_INVALID
    except OSError:
        logger.exception('command failed on an io error')
        return EXIT_IO
    except Exception:
        logger.exception('caught unhandled exception')
        return EXIT_INVALID
    return EXIT_OK
