from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from concurrent.futures import ThreadPoolExecutor
from unittest import mock

import pytest
from pydantic import ValidationError

from wavens.executor.python import ProcessPoolConfig
from wavens.executor.python import ThreadPoolConfig


def test_thread_pool_config() -> None:
    config = ThreadPoolConfig(max_workers=1)
    with config.get_executor() as executor:
        assert isinstance(executor, ThreadPoolExecutor)
        assert executor.submit(sum, (1, 2)).result() == 3


def test_process_pool_config() -> None:
    config = ProcessPoolConfig(max_workers=1, context='spawn')
    with config.get_executor() as executor:
        assert isinstance(executor, ProcessPoolExecutor)
        assert executor.submit(sum, (1, 2)).result() == 3


def test_default_workers() -> None:
    with ThreadPoolConfig().get_executor() as executor:
        assert executor.submit(abs, -1).result() == 1


def test_workers() -> None:
    assert ThreadPoolConfig(max_workers=3).workers() == 3
    with mock.patch('psutil.cpu_count', return_value=4):
        assert ThreadPoolConfig().workers() == 4
    # Physical cores are unknown on some platforms.
    with mock.patch('psutil.cpu_count', return_value=None), mock.patch(
        'os.cpu_count',
        return_value=2,
    ):
        assert ProcessPoolConfig().workers() == 2


def test_config_validation() -> None:
    with pytest.raises(ValidationError):
        ThreadPoolConfig(max_workers=0)
    with pytest.raises(ValidationError):
        ProcessPoolConfig(context='threads')
    with pytest.raises(ValidationError):
        ThreadPoolConfig(max_threads=2)
