from __future__ import annotations

from testing.fixtures import feature_manifest
from testing.fixtures import prediction_files
from testing.fixtures import predictions
from testing.fixtures import process_executor
from testing.fixtures import thread_executor
