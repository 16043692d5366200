"""Numpy classifier head.

Three `Dense(relu) -> BatchRenorm -> Dropout` blocks with L1-penalized
dense weights followed by a softmax output layer, trained with minibatch
gradient descent and early stopping.
"""

from __future__ import annotations

from wavens.head.layers import BatchRenormLayer
from wavens.head.layers import DenseLayer
from wavens.head.layers import DropoutSpec
from wavens.head.layers import Mode
from wavens.head.model import head_forward
from wavens.head.model import HeadConfig
from wavens.head.model import HeadParams
from wavens.head.model import init_head
from wavens.head.serialize import load_head
from wavens.head.serialize import save_head
from wavens.head.train import EarlyStopState
from wavens.head.train import LabeledFeatures
from wavens.head.train import train_head
from wavens.head.train import TrainingHistory

__all__ = (
    'BatchRenormLayer',
    'DenseLayer',
    'DropoutSpec',
    'EarlyStopState',
    'HeadConfig',
    'HeadParams',
    'LabeledFeatures',
    'Mode',
    'TrainingHistory',
    'head_forward',
    'init_head',
    'load_head',
    'save_head',
    'train_head',
)
