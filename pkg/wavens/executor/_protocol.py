from __future__ import annotations

import abc
import os
from concurrent.futures import Executor
from typing import Optional

import psutil
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field


class ExecutorConfig(abc.ABC, BaseModel):
    """Abstract [`Executor`][concurrent.futures.Executor] plugin configuration.

    The executor evaluates chunks of the weight lattice concurrently. A
    chunk is one matrix product of its weight rows with the prediction
    tensor followed by an argmax, so the work is numpy-bound and the
    default worker count is the number of physical cores.
    """  # noqa: E501

    name: str
    max_workers: Optional[int] = Field(  # noqa: UP007
        None,
        ge=1,
        description='Maximum number of workers (default: physical cores).',
    )

    model_config: ConfigDict = ConfigDict(  # type: ignore[misc]
        extra='forbid',
        validate_default=True,
        validate_return=True,
    )

    def workers(self) -> int:
        """Worker count with the default resolved for this host."""
        if self.max_workers is not None:
            return self.max_workers
        return psutil.cpu_count(logical=False) or os.cpu_count() or 1

    @abc.abstractmethod
    def get_executor(self) -> Executor:
        """Create an executor from the configuration."""
        ...
