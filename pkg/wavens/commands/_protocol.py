from __future__ import annotations

import abc
import pathlib
import sys
from typing import Any
from typing import Optional
from typing import Protocol
from typing import runtime_checkable
from typing import Tuple
from typing import Union

if sys.version_info >= (3, 11):  # pragma: >=3.11 cover
    import tomllib
    from typing import Self
else:  # pragma: <3.11 cover
    import tomli as tomllib
    from typing_extensions import Self

import tomli_w
from pydantic import BaseModel
from pydantic import Field
from pydantic import field_serializer
from pydantic import model_validator
from pydantic_settings import BaseSettings
from pydantic_settings import PydanticBaseSettingsSource
from pydantic_settings import SettingsConfigDict

import wavens

OUTPUT_DIR_ENV = 'WAVENS_OUTPUT_DIR'
"""Environment variable overriding the default output directory."""


@runtime_checkable
class Command(Protocol):
    """Command protocol."""

    def run(self, run_dir: pathlib.Path) -> None:
        """Run the command writing outputs to `run_dir`."""
        ...

    def close(self) -> None:
        """Release any resources held by the command."""
        ...


class LoggingConfig(BaseModel):
    """Logging configuration."""

    level: Union[int, str] = Field(  # noqa: UP007
        'INFO',
        description='Minimum logging level for stdout.',
    )
    file_level: Optional[Union[int, str]] = Field(  # noqa: UP007
        None,
        description='Override logging level for the log file.',
    )
    file_name: Optional[str] = Field(  # noqa: UP007
        'log.txt',
        description='Logging file name (none to disable).',
    )


class CommandConfig(BaseSettings, abc.ABC):
    """Command configuration.

    Command configs must define the `get_command()` method.

    Values come from (highest precedence first) CLI options, TOML files,
    and field defaults. Environment variables are not read.

    After instantiation, all [`pathlib.Path`][pathlib.Path] types will
    be resolved to convert them to absolute paths.
    """

    name: str
    out: Optional[pathlib.Path] = Field(  # noqa: UP007
        None,
        description=(
            f'Output directory (default: ${OUTPUT_DIR_ENV} or '
            '"runs/{command}_{timestamp}").'
        ),
    )
    seed: int = Field(0, ge=0, description='Random seed.')
    logging: LoggingConfig = Field(
        default_factory=LoggingConfig,
        description='Logging configuration.',
    )
    version: str = Field(
        wavens.__version__,
        description='wavens version (do not alter).',
    )

    model_config = SettingsConfigDict(
        extra='forbid',
        validate_default=True,
        validate_return=True,
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:  # noqa: UP006
        # CLI options are added by the parser; env vars are never read.
        return (init_settings,)

    @abc.abstractmethod
    def get_command(self) -> Command:
        """Initialize a command instance from this config."""
        ...

    @field_serializer('*')
    def _serialize_path_as_str(self, field: Any) -> Any:
        if isinstance(field, pathlib.Path):
            return str(field)
        if isinstance(field, (list, tuple)) and any(
            isinstance(v, pathlib.Path) for v in field
        ):
            return [str(v) for v in field]
        return field

    @model_validator(mode='after')
    def _resolve_path_types(self) -> Self:
        for name, value in self:
            if isinstance(value, pathlib.Path):
                setattr(self, name, value.resolve())
            elif isinstance(value, list) and all(
                isinstance(v, pathlib.Path) for v in value
            ):
                setattr(self, name, [v.resolve() for v in value])
        return self

    @classmethod
    def from_toml(cls, filepath: str | pathlib.Path) -> CommandConfig:
        """Load a configuration from a TOML file.

        On the base class, the registered config named by the file's
        `name` option is used.

        Raises:
            ValueError: If the file names no registered command.
        """
        with open(filepath, 'rb') as f:
            options = tomllib.load(f)

        config_cls: type[CommandConfig] = cls
        if cls is CommandConfig:
            from wavens.plugins import get_command_configs

            name = options.get('name')
            configs = get_command_configs()
            if name not in configs:
                raise ValueError(
                    f'Config file {filepath} names unknown command {name!r}. '
                    f'Expected one of {sorted(configs)}.',
                )
            config_cls = configs[name]
        return config_cls(**options)

    def write_toml(self, filepath: str | pathlib.Path) -> None:
        """Write the configuration to a TOML file."""
        model = self.model_dump(exclude_none=True)
        filepath = pathlib.Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)
        with open(filepath, 'wb') as f:
            tomli_w.dump(model, f)
