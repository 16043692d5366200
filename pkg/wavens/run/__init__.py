"""Command line interface.

```bash
$ python -m wavens.run --help
$ python -m wavens.run synth --out runs/fixture
$ python -m wavens.run ensemble tune --predictions a.csv,b.csv --labels labels.csv
```
"""  # noqa: E501
