from __future__ import annotations

import logging
import pathlib

from wavens.data.manifest import load_manifest
from wavens.data.predictions import read_labels
from wavens.data.predictions import write_prediction_file
from wavens.errors import FormatError
from wavens.head.layers import Mode
from wavens.head.model import head_forward
from wavens.head.serialize import load_head
from wavens.logging import CMD_LOG_LEVEL

logger = logging.getLogger(__name__)


class PredictCommand:
    """Write the class probabilities of a trained head as a prediction file.

    Args:
        head: Path of the trained head document.
        manifest: Path of the feature manifest.
        samples: Optional labels file selecting (and ordering) the samples.
        model_name: Model name of the prediction file, also used as the
            file stem in the run directory.
    """

    def __init__(
        self,
        head: pathlib.Path,
        manifest: pathlib.Path,
        samples: pathlib.Path | None = None,
        model_name: str = 'head',
    ) -> None:
        self.head = head
        self.manifest = manifest
        self.samples = samples
        self.model_name = model_name

    def close(self) -> None:
        """Close the command."""
        pass

    def run(self, run_dir: pathlib.Path) -> None:
        """Run the command.

        Args:
            run_dir: Directory for outputs.
        """
        params, config = load_head(self.head)
        manifest = load_manifest(self.manifest)
        if len(manifest.class_names) != config.num_classes:
            raise FormatError(
                self.manifest,
                f'{len(manifest.class_names)} classes but the head predicts '
                f'{config.num_classes}',
            )

        if self.samples is not None:
            ids, _ = read_labels(self.samples, manifest.class_names)
            position = {s: i for i, s in enumerate(manifest.sample_ids)}
            missing = [s for s in ids if s not in position]
            if missing:
                raise FormatError(
                    self.samples,
                    f'sample {missing[0]!r} is not in the manifest',
                )
            manifest = manifest.subset([position[s] for s in ids])

        probs = head_forward(params, config, manifest.features(), Mode.EVAL)
        path = run_dir / f'{self.model_name}.csv'
        write_prediction_file(
            path,
            self.model_name,
            manifest.class_names,
            manifest.sample_ids,
            probs,
        )
        logger.log(
            CMD_LOG_LEVEL,
            f'wrote predictions of {len(manifest)} samples to {path.name}',
        )
