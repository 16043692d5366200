from __future__ import annotations

import pathlib
import sys
from datetime import datetime
from datetime import timedelta

if sys.version_info >= (3, 11):  # pragma: >=3.11 cover
    import tomllib
else:  # pragma: <3.11 cover
    import tomli as tomllib

import pytest
from pydantic import ValidationError

from testing.data import PredictionFiles
from wavens.commands import CommandConfig
from wavens.commands._protocol import OUTPUT_DIR_ENV
from wavens.commands.configs.ensemble import EnsembleTuneConfig
from wavens.commands.configs.synth import SynthConfig
from wavens.run.config import make_run_dir
from wavens.run.utils import change_cwd


def test_config_forbids_extra_args() -> None:
    with pytest.raises(ValidationError, match='unknown_options'):
        SynthConfig(unknown_options=True)  # type: ignore[call-arg]


def test_config_ignores_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv('MODELS', '3')
    monkeypatch.setenv('SEED', '9')
    config = SynthConfig()
    assert config.models == 7
    assert config.seed == 0


def test_config_equality() -> None:
    assert SynthConfig(models=2) == SynthConfig(models=2)
    assert SynthConfig(models=2) != SynthConfig(models=3)


def test_read_write_toml_config(
    prediction_files: PredictionFiles,
    tmp_path: pathlib.Path,
) -> None:
    config = EnsembleTuneConfig(
        predictions=prediction_files.paths,
        labels=prediction_files.test_file,
        step=0.25,
    )

    config_file = tmp_path / 'config.toml'
    config.write_toml(config_file)
    assert config_file.is_file()

    assert EnsembleTuneConfig.from_toml(config_file) == config
    # The base class picks the config type named by the file.
    loaded = CommandConfig.from_toml(config_file)
    assert isinstance(loaded, EnsembleTuneConfig)
    assert loaded == config


def test_write_toml_config_excludes_none(tmp_path: pathlib.Path) -> None:
    config = SynthConfig(models=2)

    config_file = tmp_path / 'config.toml'
    config.write_toml(config_file)

    with open(config_file, 'rb') as f:
        config_dict = tomllib.load(f)

    assert config_dict['name'] == 'synth'
    assert config_dict['logging']['level'] == 'INFO'
    assert 'targets' not in config_dict
    assert 'out' not in config_dict


def test_from_toml_unknown_command(tmp_path: pathlib.Path) -> None:
    config_file = tmp_path / 'config.toml'
    config_file.write_text('name = "train"\n')
    with pytest.raises(ValueError, match="unknown command 'train'"):
        CommandConfig.from_toml(config_file)


def test_make_run_dir_out(tmp_path: pathlib.Path) -> None:
    config = SynthConfig(out=tmp_path / 'explicit')
    run_dir = make_run_dir(config)
    assert run_dir == tmp_path / 'explicit'
    assert run_dir.is_dir()


def test_make_run_dir_environment(
    monkeypatch: pytest.MonkeyPatch,
    tmp_path: pathlib.Path,
) -> None:
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / 'from-env'))
    assert make_run_dir(SynthConfig()) == tmp_path / 'from-env'

    # An explicit output directory takes precedence.
    config = SynthConfig(out=tmp_path / 'explicit')
    assert make_run_dir(config) == tmp_path / 'explicit'


def test_make_run_dir_default(
    monkeypatch: pytest.MonkeyPatch,
    tmp_path: pathlib.Path,
) -> None:
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
    with change_cwd(tmp_path):
        run_dir = make_run_dir(SynthConfig())

    assert run_dir.parent == tmp_path / 'runs'
    name, timestamp_str = run_dir.name.split('_')
    assert name == 'synth'

    # Check timestamp is < 5 seconds from now
    timestamp = datetime.strptime(timestamp_str, '%Y-%m-%d-%H-%M-%S')
    assert datetime.now() - timestamp < timedelta(seconds=5)
