from __future__ import annotations

import argparse
import functools
import sys
from typing import Any
from typing import Sequence

if sys.version_info >= (3, 11):  # pragma: >=3.11 cover
    import tomllib
else:  # pragma: <3.11 cover
    import tomli as tomllib

from pydantic_settings import CliSettingsSource

from wavens.commands import CommandConfig
from wavens.plugins import get_command_configs
from wavens.run.utils import flatten_mapping

PROG = 'python -m wavens.run'

ENSEMBLE_MODES = ('avg', 'tune')
"""Modes of the `ensemble` command (`ensemble avg` is `ensemble-avg`)."""


def _parse_toml_options(filepath: str) -> dict[str, Any]:
    with open(filepath, 'rb') as f:
        return tomllib.load(f)


class _ArgparseFormatter(
    argparse.ArgumentDefaultsHelpFormatter,
    argparse.RawDescriptionHelpFormatter,
):
    pass


def _add_argument(
    parser: argparse.ArgumentParser,
    *names: str,
    **kwargs: Any,
) -> None:
    if '--name' in names:
        # The command name is chosen by the positional command argument.
        return

    dash_names = tuple(name.replace('_', '-') for name in names if '_' in name)
    parser.add_argument(*dash_names, *names, **kwargs)


def _add_argument_group(
    parser: argparse.ArgumentParser,
    **kwargs: Any,
) -> argparse._ArgumentGroup:
    # Reuse groups by title so CliSettingsSource does not duplicate them.
    title = kwargs.get('title')
    for group in parser._action_groups:
        if group.title == title:
            return group
    return parser.add_argument_group(**kwargs)


def _parse_args(
    parser: argparse.ArgumentParser,
    args: Sequence[str],
    namespace: argparse.Namespace,
) -> argparse.Namespace:
    return parser.parse_args(args, namespace)


def _command_usage() -> str:
    return ', '.join(
        name.replace('ensemble-', 'ensemble ', 1)
        for name in sorted(get_command_configs())
    )


def _base_parser(prog: str = PROG) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description=f"""\
Weighted average ensembles of classifier outputs.

Commands: {_command_usage()}.

Each command is configured with CLI options, TOML files passed with
--config, or both. CLI options take precedence over configuration files
and files are applied in order. A command can also be named by the "name"
option of a configuration file (e.g., the config.toml of a previous run).

List options take comma separated values (--predictions a.csv,b.csv).
""",
        prog=prog,
        formatter_class=_ArgparseFormatter,
    )
    parser.add_argument(
        '--config',
        '-c',
        default=argparse.SUPPRESS,
        nargs='+',
        help='TOML configuration files (parsed in order).',
    )
    return parser


def split_command(
    argv: Sequence[str],
    parser: argparse.ArgumentParser | None = None,
) -> tuple[str | None, list[str]]:
    """Split the command name from the remaining arguments.

    Returns:
        Registered command name (`None` when `argv` starts with an option)
        and the remaining arguments.
    """
    parser = _base_parser() if parser is None else parser
    argv = list(argv)
    if len(argv) == 0:
        parser.error(f'a command is required ({_command_usage()})')
    first = argv[0]
    if first.startswith('-'):
        return None, argv
    if first == 'ensemble':
        if len(argv) < 2 or argv[1] not in ENSEMBLE_MODES:  # noqa: PLR2004
            parser.error(
                f'ensemble requires a mode: {" or ".join(ENSEMBLE_MODES)}',
            )
        return f'ensemble-{argv[1]}', argv[2:]
    if first not in get_command_configs():
        parser.error(
            f'unknown command {first!r} (choose from {_command_usage()})',
        )
    return first, argv[1:]


def parse_args_to_config(argv: Sequence[str]) -> CommandConfig:
    """Parse CLI arguments into the configuration of a command.

    Usage errors (unknown command, option, or a missing command) exit
    through [`argparse.ArgumentParser.error()`][argparse.ArgumentParser.error].

    Args:
        argv: Arguments without the program name.

    Returns:
        Validated command configuration.

    Raises:
        SystemExit: On usage errors or `--help`.
        ValueError: If no command is named by the arguments or config files.
    """
    argv = list(argv)
    base_parser = _base_parser()
    if len(argv) > 0 and argv[0] in ('-h', '--help'):
        base_parser.parse_args(['--help'])
    name, rest = split_command(argv, base_parser)

    # Parse --config without --help to know the config files first. --help
    # is handled again once the command's options exist.
    _rest = [arg for arg in rest if arg not in ('-h', '--help')]
    base_options = vars(base_parser.parse_known_args(_rest)[0])
    toml_options: dict[str, Any] = {}
    for config_file in base_options.pop('config', []):
        toml_options.update(flatten_mapping(_parse_toml_options(config_file)))

    toml_name = toml_options.pop('name', None)
    name = name if name is not None else toml_name
    if name is None:
        raise ValueError(
            'A command is required. Either name it as the first argument or '
            'add the name option to a config file passed with --config.',
        )
    configs = get_command_configs()
    if name not in configs:
        raise ValueError(
            f'Unknown command {name!r}. Expected one of {sorted(configs)}.',
        )
    settings_cls = configs[name]

    display = name.replace('ensemble-', 'ensemble ', 1)
    parser = _base_parser(f'{PROG} {display}')
    parser.description = settings_cls.__doc__

    cli_settings: CliSettingsSource[CommandConfig] = CliSettingsSource(
        settings_cls,
        cli_avoid_json=True,
        cli_implicit_flags=True,
        cli_parse_args=rest,
        cli_parse_none_str='none',
        cli_use_class_docs_for_groups=False,
        root_parser=parser,
        add_argument_method=_add_argument,
        add_argument_group_method=_add_argument_group,
        parse_args_method=functools.partial(
            _parse_args,
            namespace=argparse.Namespace(**toml_options),
        ),
        formatter_class=_ArgparseFormatter,
    )

    return settings_cls(_cli_settings_source=cli_settings)
