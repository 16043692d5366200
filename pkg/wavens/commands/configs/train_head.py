from __future__ import annotations

from typing import Any
from typing import Literal

from pydantic import AliasChoices
from pydantic import Field
from pydantic import FilePath

from wavens.commands import Command
from wavens.commands import CommandConfig
from wavens.plugins import register


@register('command')
class TrainHeadConfig(CommandConfig):
    """Classifier head training configuration.

    The head's input dimension and class count come from the manifest;
    every other head option is a flat field of this config.
    """

    name: Literal['train-head'] = Field(
        'train-head',
        description='Command name.',
    )
    manifest: FilePath = Field(description='Feature manifest (JSON).')
    split: float = Field(
        0.7,
        gt=0,
        lt=1,
        description='Fraction of each class used for training.',
    )
    stratified: bool = Field(True, description='Split each class separately.')
    hidden_dims: list[int] = Field(
        [512, 256, 128],
        min_length=3,
        max_length=3,
        description='Widths of the three hidden dense layers.',
    )
    l1: float = Field(0.0001, ge=0, description='L1 coefficient.')
    dropout_rate: float = Field(0.3, ge=0, lt=1, description='Dropout rate.')
    epsilon: float = Field(1e-3, gt=0, description='Renorm variance offset.')
    r_max: float = Field(3.0, ge=1, description='Renorm r clip bound.')
    d_max: float = Field(5.0, ge=0, description='Renorm d clip bound.')
    momentum: float = Field(
        0.99,
        gt=0,
        le=1,
        description='Renorm running statistics momentum.',
    )
    learning_rate: float = Field(0.01, gt=0, description='Step size.')
    batch_size: int = Field(32, ge=2, description='Minibatch size.')
    max_epochs: int = Field(100, ge=1, description='Maximum epochs.')
    patience: int = Field(7, ge=0, description='Early stopping patience.')
    init_scale: float = Field(
        1.0,
        gt=0,
        description='Multiplier on the initialization bound.',
    )
    round_percent: bool = Field(
        False,
        validation_alias=AliasChoices('round_percent', 'paper_rounding'),
        description='Round percentages to integers in the CSV tables.',
    )

    def head_options(self) -> dict[str, Any]:
        """Head options other than the data-dependent dimensions."""
        return {
            'hidden_dims': tuple(self.hidden_dims),
            'l1': self.l1,
            'dropout_rate': self.dropout_rate,
            'epsilon': self.epsilon,
            'r_max': self.r_max,
            'd_max': self.d_max,
            'momentum': self.momentum,
            'learning_rate': self.learning_rate,
            'batch_size': self.batch_size,
            'max_epochs': self.max_epochs,
            'patience': self.patience,
            'init_scale': self.init_scale,
            'seed': self.seed,
        }

    def get_command(self) -> Command:
        """Create a command instance from the config."""
        from wavens.commands.train_head import TrainHeadCommand
        from wavens.data.manifest import SplitSpec

        return TrainHeadCommand(
            manifest=self.manifest,
            split=SplitSpec(
                train_fraction=self.split,
                seed=self.seed,
                stratified=self.stratified,
            ),
            head_options=self.head_options(),
            round_percent=self.round_percent,
        )
