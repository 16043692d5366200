# ruff: noqa: F401
from __future__ import annotations

from wavens.executor._protocol import ExecutorConfig
from wavens.executor.python import ProcessPoolConfig
from wavens.executor.python import ThreadPoolConfig

__all__ = ('ExecutorConfig',)
