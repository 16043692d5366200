from __future__ import annotations

from typing import Literal
from typing import Optional

from pydantic import Field
from pydantic import FilePath

from wavens.commands import Command
from wavens.commands import CommandConfig
from wavens.plugins import register


@register('command')
class PredictConfig(CommandConfig):
    """Head prediction configuration."""

    name: Literal['predict'] = Field('predict', description='Command name.')
    head: FilePath = Field(description='Trained head (head.json).')
    manifest: FilePath = Field(description='Feature manifest (JSON).')
    samples: Optional[FilePath] = Field(  # noqa: UP007
        None,
        description=(
            'Labels file whose samples are predicted, in its order '
            '(default: every manifest sample).'
        ),
    )
    model_name: str = Field(
        'head',
        description='Model name written to the prediction file.',
    )

    def get_command(self) -> Command:
        """Create a command instance from the config."""
        from wavens.commands.predict import PredictCommand

        return PredictCommand(
            head=self.head,
            manifest=self.manifest,
            samples=self.samples,
            model_name=self.model_name,
        )
