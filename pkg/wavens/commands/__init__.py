from __future__ import annotations

from wavens.commands._protocol import Command
from wavens.commands._protocol import CommandConfig
from wavens.commands._protocol import LoggingConfig

__all__ = ('Command', 'CommandConfig', 'LoggingConfig')
