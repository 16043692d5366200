from __future__ import annotations

import sys
from typing import Literal
from typing import Optional

if sys.version_info >= (3, 11):  # pragma: >=3.11 cover
    from typing import Self
else:  # pragma: <3.11 cover
    from typing_extensions import Self

from pydantic import Field
from pydantic import model_validator

from wavens.commands import Command
from wavens.commands import CommandConfig
from wavens.data.synth import DEFAULT_TARGETS
from wavens.plugins import register


@register('command')
class SynthConfig(CommandConfig):
    """Synthetic prediction files and labels."""

    name: Literal['synth'] = Field('synth', description='Command name.')
    models: int = Field(7, ge=1, description='Number of models.')
    samples: int = Field(2000, ge=2, description='Number of samples.')
    classes: int = Field(5, ge=2, description='Number of classes.')
    targets: Optional[list[float]] = Field(  # noqa: UP007
        None,
        description=(
            'Accuracy target of each model in (1/classes, 1] '
            '(default: 0.93, 0.95, 0.96, 0.94, 0.95, 0.97, 0.98).'
        ),
    )
    temperature: float = Field(
        1.0,
        gt=0,
        description='Softmax temperature of the generated rows.',
    )
    margin: float = Field(
        0.5,
        gt=0,
        description='Minimum logit gap of the predicted class.',
    )
    split: float = Field(
        0.7,
        gt=0,
        lt=1,
        description='Fraction of each class in the tuning split.',
    )
    features: Optional[int] = Field(  # noqa: UP007
        None,
        ge=1,
        description='Also write a feature manifest of this dimension.',
    )
    separation: float = Field(
        3.0,
        gt=0,
        description='Spread of the class centers of the feature manifest.',
    )
    model_names: Optional[list[str]] = Field(  # noqa: UP007
        None,
        description='Model names (default: backbone names).',
    )
    class_names: Optional[list[str]] = Field(  # noqa: UP007
        None,
        description='Class names (default: leaf disease classes).',
    )

    @model_validator(mode='after')
    def _validate_targets(self) -> Self:
        if self.targets is None:
            if self.models > len(DEFAULT_TARGETS):
                raise ValueError(
                    f'Option targets is required when models > '
                    f'{len(DEFAULT_TARGETS)}.',
                )
        elif len(self.targets) != self.models:
            raise ValueError(
                f'Expected {self.models} accuracy targets. '
                f'Got {len(self.targets)}.',
            )
        return self

    def get_command(self) -> Command:
        """Create a command instance from the config."""
        from wavens.commands.synth import SynthCommand

        targets = (
            DEFAULT_TARGETS[: self.models]
            if self.targets is None
            else tuple(self.targets)
        )
        return SynthCommand(
            num_models=self.models,
            num_samples=self.samples,
            num_classes=self.classes,
            targets=targets,
            seed=self.seed,
            temperature=self.temperature,
            margin=self.margin,
            split=self.split,
            feature_dim=self.features,
            separation=self.separation,
            model_names=self.model_names,
            class_names=self.class_names,
        )
