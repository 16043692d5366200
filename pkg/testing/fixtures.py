from __future__ import annotations

import multiprocessing
import pathlib
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures import ThreadPoolExecutor
from typing import Generator

import pytest

from testing.data import make_predictions
from testing.data import PredictionFiles
from testing.data import write_prediction_files
from wavens.data.manifest import DatasetManifest
from wavens.data.synth import synth_manifest
from wavens.ensemble.types import PredictionSet
from wavens.numerics import IntArray


@pytest.fixture
def process_executor() -> Generator[ProcessPoolExecutor, None, None]:
    with ProcessPoolExecutor(
        max_workers=2,
        # Fork is unsafe once the thread pool fixture has started threads.
        mp_context=multiprocessing.get_context('spawn'),
    ) as executor:
        yield executor


@pytest.fixture
def thread_executor() -> Generator[ThreadPoolExecutor, None, None]:
    with ThreadPoolExecutor(4) as executor:
        yield executor


@pytest.fixture
def predictions() -> tuple[PredictionSet, IntArray]:
    return make_predictions()


@pytest.fixture
def prediction_files(
    predictions: tuple[PredictionSet, IntArray],
    tmp_path: pathlib.Path,
) -> PredictionFiles:
    preds, labels = predictions
    return write_prediction_files(tmp_path / 'inputs', preds, labels)


@pytest.fixture
def feature_manifest() -> DatasetManifest:
    return synth_manifest([30, 30, 30], feature_dim=6, seed=0, separation=4.0)
