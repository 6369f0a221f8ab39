"""Granular-ball AdaBoost (GAdaBoost.SA) with SAMME and Rob_SAMME baselines."""

from .boosting import (TrainedEnsemble, beta, gadaboost_sa_fit, loss_factor, predict_ensemble,
                       rob_samme_fit, samme_fit, staged_loss)
from .data import Dataset, inject_label_noise, load_csv, min_max_normalize, synth_blobs, train_test_split
from .granulation import Granulation, GranularBall, granulate
from .learners import LearnerSpec

__all__ = [
    "Dataset", "Granulation", "GranularBall", "LearnerSpec", "TrainedEnsemble", "beta",
    "gadaboost_sa_fit", "granulate", "inject_label_noise", "load_csv", "loss_factor",
    "min_max_normalize", "predict_ensemble", "rob_samme_fit", "samme_fit", "staged_loss",
    "synth_blobs", "train_test_split",
]
__version__ = "0.1.0"
