"""Weighted average ensembles of regularized classifier heads (wavens).

wavens takes the class-probability outputs of several classifiers,
combines them by plain or weighted averaging, tunes the ensemble weights
with an exhaustive grid search over a discrete weight lattice, and reports
a complete multiclass evaluation (confusion matrix, per-class and macro
precision/recall/F1, accuracy, one-vs-rest and micro-average ROC curves).

It also contains a small numpy implementation of the customized classifier
head placed on top of pretrained feature extractors: three
Dense + BatchRenorm + Dropout blocks with L1-penalized dense layers and a
softmax output layer, trained with minibatch gradient descent and early
stopping.
"""

from __future__ import annotations

import importlib.metadata as importlib_metadata

__version__ = importlib_metadata.version('wavens')
