from __future__ import annotations

import logging
import pathlib

import pytest

from wavens.logging import CMD_LOG_LEVEL
from wavens.logging import init_logging
from wavens.logging import ProgressLog
from wavens.logging import RUN_LOG_LEVEL
from wavens.logging import TRACE_LOG_LEVEL


def test_logging_no_file() -> None:
    init_logging()

    logger = logging.getLogger()
    logger.log(RUN_LOG_LEVEL, 'test')
    assert logging.getLevelName(RUN_LOG_LEVEL) == 'RUN'
    assert logging.getLevelName(CMD_LOG_LEVEL) == 'CMD'
    assert logging.getLevelName(TRACE_LOG_LEVEL) == 'TRACE'


def test_logging_with_file(tmp_path: pathlib.Path) -> None:
    filepath = tmp_path / 'logs' / 'log.txt'

    init_logging(filepath, logfile_level=logging.DEBUG)

    logger = logging.getLogger()
    logger.info('test')
    assert filepath.parent.is_dir()


def test_custom_levels_are_ordered() -> None:
    assert logging.INFO < CMD_LOG_LEVEL < RUN_LOG_LEVEL < logging.WARNING
    assert TRACE_LOG_LEVEL < logging.DEBUG


def test_progress_log_milestones(caplog: pytest.LogCaptureFixture) -> None:
    logger = logging.getLogger('wavens.test')
    progress = ProgressLog(logger, 'lattice chunks', 20)
    with caplog.at_level(TRACE_LOG_LEVEL, logger='wavens.test'):
        levels = [progress.step() for _ in range(20)]

    # Every tenth percent of twenty steps is every second step.
    assert levels[1::2] == [CMD_LOG_LEVEL] * 10
    assert levels[0::2] == [TRACE_LOG_LEVEL] * 10
    assert caplog.messages[-1] == 'lattice chunks 20/20 [100%]'


def test_progress_log_few_steps() -> None:
    progress = ProgressLog(logging.getLogger('wavens.test'), 'epochs', 3)
    assert progress.step('val_loss=0.5') == CMD_LOG_LEVEL
    assert progress.step() == CMD_LOG_LEVEL
    assert progress.step() == CMD_LOG_LEVEL
    assert progress.done == 3


def test_progress_log_validation() -> None:
    logger = logging.getLogger('wavens.test')
    with pytest.raises(ValueError, match='Total'):
        ProgressLog(logger, 'epochs', 0)
    with pytest.raises(ValueError, match='Every'):
        ProgressLog(logger, 'epochs', 5, every=0)
