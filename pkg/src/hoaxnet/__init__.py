"""Fake-news text classifiers (two-branch BiLSTM, two-branch CNN,
transformer encoder) with a Gaussian-process Bayesian hyperparameter tuner.

Kept import-light so the CLI can configure threading before numpy loads.
"""

__version__ = "0.1.0"
