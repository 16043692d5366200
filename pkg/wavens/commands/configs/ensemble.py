from __future__ import annotations

from typing import Any
from typing import Literal
from typing import Optional

from pydantic import AliasChoices
from pydantic import Field
from pydantic import field_validator
from pydantic import FilePath

from wavens.commands import Command
from wavens.commands import CommandConfig
from wavens.ensemble.search import DEFAULT_CHUNK_SIZE
from wavens.plugins import get_executor_configs
from wavens.plugins import register


class _EnsembleInputs(CommandConfig):
    predictions: list[FilePath] = Field(
        description='Prediction files, one per model (model order).',
    )
    labels: FilePath = Field(description='Labels of the evaluation split.')
    normalize: bool = Field(
        False,
        description='Divide combined.csv rows by the weight sum.',
    )
    round_percent: bool = Field(
        False,
        validation_alias=AliasChoices('round_percent', 'paper_rounding'),
        description='Round percentages to integers in the CSV tables.',
    )


@register('command')
class EnsembleAvgConfig(_EnsembleInputs):
    """Average ensemble sweep configuration."""

    name: Literal['ensemble-avg'] = Field(
        'ensemble-avg',
        description='Command name.',
    )

    def get_command(self) -> Command:
        """Create a command instance from the config."""
        from wavens.commands.ensemble import EnsembleAvgCommand

        return EnsembleAvgCommand(
            predictions=self.predictions,
            labels=self.labels,
            normalize=self.normalize,
            round_percent=self.round_percent,
        )


@register('command')
class EnsembleTuneConfig(_EnsembleInputs):
    """Grid-search weight tuning configuration."""

    name: Literal['ensemble-tune'] = Field(
        'ensemble-tune',
        description='Command name.',
    )
    tune_split: Optional[FilePath] = Field(  # noqa: UP007
        None,
        description=(
            'Labels of the tuning split (default: the evaluation labels, '
            'with a warning).'
        ),
    )
    step: float = Field(0.1, gt=0, le=1, description='Lattice step.')
    unconstrained: bool = Field(
        False,
        description='Search the box lattice {0, step, ..., upper}^M.',
    )
    upper: float = Field(
        1.0,
        gt=0,
        description='Largest weight of the box lattice.',
    )
    executor: Optional[str] = Field(  # noqa: UP007
        None,
        description='Executor evaluating lattice chunks (none to disable).',
    )
    workers: Optional[int] = Field(  # noqa: UP007
        None,
        ge=1,
        description='Executor workers (default: physical cores).',
    )
    chunk_size: int = Field(
        DEFAULT_CHUNK_SIZE,
        ge=1,
        description='Lattice points per chunk.',
    )

    @field_validator('executor', mode='before')
    @classmethod
    def _validate_executor(cls, value: Any) -> Any:
        if not isinstance(value, str):
            return value
        value = value.lower()
        if value == 'none':
            return None
        choices = sorted(get_executor_configs())
        if value not in choices:
            raise ValueError(
                f'Unknown executor {value!r}. Expected none or one of '
                f'{choices}.',
            )
        return value

    def get_command(self) -> Command:
        """Create a command instance from the config."""
        from wavens.commands.ensemble import EnsembleTuneCommand
        from wavens.ensemble.types import GridSpec

        executor = (
            None
            if self.executor is None
            else get_executor_configs()[self.executor](
                max_workers=self.workers,
            )
        )
        return EnsembleTuneCommand(
            predictions=self.predictions,
            labels=self.labels,
            tune_split=self.tune_split,
            spec=GridSpec(
                step=self.step,
                unconstrained=self.unconstrained,
                upper=self.upper,
            ),
            executor=executor,
            chunk_size=self.chunk_size,
            normalize=self.normalize,
            round_percent=self.round_percent,
        )


@register('command')
class EvalConfig(_EnsembleInputs):
    """Evaluation configuration.

    One prediction file is evaluated directly. Several files are combined
    with the weights of a `weights.json` or, without one, averaged.
    """

    name: Literal['eval'] = Field('eval', description='Command name.')
    weights: Optional[FilePath] = Field(  # noqa: UP007
        None,
        description='Tuned weights (weights.json) applied to the models.',
    )

    def get_command(self) -> Command:
        """Create a command instance from the config."""
        from wavens.commands.evaluate import EvalCommand

        return EvalCommand(
            predictions=self.predictions,
            labels=self.labels,
            weights=self.weights,
            normalize=self.normalize,
            round_percent=self.round_percent,
        )
