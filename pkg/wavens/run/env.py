"""Record the environment a run executed in.

Head training and the weight search are deterministic given a seed, but the
last digits of a metric can still move between numpy builds and BLAS thread
counts. Every run directory therefore gets an `environment.json` next to
its `config.toml`.
"""

from __future__ import annotations

import dataclasses
import importlib.metadata
import json
import os
import pathlib
import platform
import sys
from dataclasses import field
from typing import Any
from typing import Dict
from typing import Optional

if sys.version_info >= (3, 11):  # pragma: >=3.11 cover
    from typing import Self
else:  # pragma: <3.11 cover
    from typing_extensions import Self

import numpy
import psutil

THREAD_VARIABLES = (
    'MKL_NUM_THREADS',
    'OMP_NUM_THREADS',
    'OPENBLAS_NUM_THREADS',
)
"""Environment variables that bound the BLAS thread pool."""


def _get_version(distribution: str) -> str:
    try:
        return importlib.metadata.version(distribution)
    except importlib.metadata.PackageNotFoundError:
        return 'not installed'


@dataclasses.dataclass(frozen=True)
class Host:
    """Machine the run executed on."""

    hostname: str = field(metadata={'description': 'Network name of node.'})
    platform: str = field(metadata={'description': 'Platform identifier.'})
    architecture: str = field(metadata={'description': 'CPU architecture.'})
    physical_cores: Optional[int] = field(  # noqa: UP007
        metadata={'description': 'CPU physical core count.'},
    )
    logical_cores: Optional[int] = field(  # noqa: UP007
        metadata={'description': 'CPU logical core count.'},
    )
    memory_gb: float = field(
        metadata={'description': 'Total memory in GB.'},
    )

    @classmethod
    def collect(cls) -> Self:
        """Collect host information."""
        return cls(
            hostname=platform.node(),
            platform=platform.platform(),
            architecture=platform.machine(),
            physical_cores=psutil.cpu_count(logical=False),
            logical_cores=psutil.cpu_count(logical=True),
            memory_gb=round(psutil.virtual_memory().total / 1e9, 2),
        )


@dataclasses.dataclass(frozen=True)
class Numerics:
    """Settings that can change the low digits of a result."""

    python: str = field(metadata={'description': 'Python version.'})
    float_eps: float = field(
        metadata={'description': 'Machine epsilon of float64.'},
    )
    bit_generator: str = field(
        metadata={'description': 'Bit generator behind seeded RNGs.'},
    )
    threads: Dict[str, Optional[str]] = field(  # noqa: UP006,UP007
        metadata={'description': 'BLAS thread limits; null when unset.'},
    )

    @classmethod
    def collect(cls) -> Self:
        """Collect numeric settings of this process."""
        rng = numpy.random.default_rng(0)
        return cls(
            python=platform.python_version(),
            float_eps=float(numpy.finfo(numpy.float64).eps),
            bit_generator=type(rng.bit_generator).__name__,
            threads={name: os.environ.get(name) for name in THREAD_VARIABLES},
        )


@dataclasses.dataclass(frozen=True)
class Packages:
    """Versions of the packages a run depends on."""

    numpy: str = field(metadata={'description': 'numpy version.'})
    proxystore: str = field(metadata={'description': 'ProxyStore version.'})
    psutil: str = field(metadata={'description': 'psutil version.'})
    pydantic: str = field(metadata={'description': 'pydantic version.'})
    pydantic_settings: str = field(
        metadata={'description': 'pydantic-settings version.'},
    )
    wavens: str = field(metadata={'description': 'wavens version.'})

    @classmethod
    def collect(cls) -> Self:
        """Collect installed distribution versions."""
        return cls(
            numpy=_get_version('numpy'),
            proxystore=_get_version('proxystore'),
            psutil=_get_version('psutil'),
            pydantic=_get_version('pydantic'),
            pydantic_settings=_get_version('pydantic-settings'),
            wavens=_get_version('wavens'),
        )


@dataclasses.dataclass(frozen=True)
class Environment:
    """Environment a run was executed in.

    To print the current environment:
    ```bash
    $ python -m wavens.run.env
    ```
    """

    host: Host = field(metadata={'description': 'Host information.'})
    numerics: Numerics = field(
        metadata={'description': 'Numeric settings.'},
    )
    packages: Packages = field(
        metadata={'description': 'Package versions.'},
    )

    @classmethod
    def collect(cls) -> Self:
        """Collect information on the current environment."""
        return cls(
            host=Host.collect(),
            numerics=Numerics.collect(),
            packages=Packages.collect(),
        )

    def unset_threads(self) -> list[str]:
        """Thread variables left unset, so BLAS picks its own pool size."""
        return [
            name
            for name, value in self.numerics.threads.items()
            if value is None
        ]

    def format(self) -> str:
        """Format the environment as indented text."""
        host = self.host
        numerics = self.numerics
        threads = ', '.join(
            f'{name}={value}'
            for name, value in numerics.threads.items()
            if value is not None
        )
        lines = [
            'host:',
            f'  {host.hostname} ({host.platform})',
            f'  cpu: {host.architecture} ({host.physical_cores} cores / '
            f'{host.logical_cores} logical), {host.memory_gb} GB',
            'numerics:',
            f'  python {numerics.python}, float64 eps {numerics.float_eps}, '
            f'{numerics.bit_generator}',
            f'  threads: {threads or "default"}',
            'packages:',
            *(
                f'  {name}: {version}'
                for name, version in dataclasses.asdict(self.packages).items()
            ),
        ]
        return '\n'.join(lines)

    def json(self) -> dict[str, Any]:
        """Get the environment as a JSON-compatible dictionary."""
        return dataclasses.asdict(self)

    def write_json(self, filepath: str | pathlib.Path) -> None:
        """Write the environment to a JSON file."""
        filepath = pathlib.Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)
        with open(filepath, 'w') as f:
            json.dump(self.json(), f, indent=4, sort_keys=True)


if __name__ == '__main__':
    print(Environment.collect().format())
