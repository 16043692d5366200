from __future__ import annotations

import pytest
from pydantic import ValidationError

from wavens.commands.configs.synth import SynthConfig
from wavens.commands.synth import SynthCommand
from wavens.data.synth import DEFAULT_TARGETS


def test_create_command() -> None:
    config = SynthConfig(models=3, samples=50)
    command = config.get_command()
    assert isinstance(command, SynthCommand)
    assert command.targets == DEFAULT_TARGETS[:3]
    assert command.feature_dim is None


def test_explicit_targets() -> None:
    config = SynthConfig(models=2, targets=[0.5, 0.6], classes=3)
    command = config.get_command()
    assert isinstance(command, SynthCommand)
    assert command.targets == (0.5, 0.6)


def test_validate_targets() -> None:
    with pytest.raises(ValidationError, match='Expected 3 accuracy targets'):
        SynthConfig(models=3, targets=[0.9])
    with pytest.raises(ValidationError, match='targets is required'):
        SynthConfig(models=8)
    with pytest.raises(ValidationError):
        SynthConfig(classes=1)
    with pytest.raises(ValidationError):
        SynthConfig(unknown_option=1)
