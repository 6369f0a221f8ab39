"""JSON round-trip for trained ensembles."""

from __future__ import annotations

import json
from dataclasses import asdict

import numpy as np

from .boosting import IterationRecord, TrainedEnsemble
from .data import atomic_write
from .learners import FittedModel, LearnerSpec

FORMAT_VERSION = 1


def _model_to_dict(m: FittedModel) -> dict:
    return {
        "feature": m.feature.tolist(),
        "threshold": m.threshold.tolist(),
        "left": m.left.tolist(),
        "right": m.right.tolist(),
        "value": m.value.tolist(),
        "n_features": m.n_features,
    }


def _model_from_dict(d: dict) -> FittedModel:
    return FittedModel(
        feature=np.array(d["feature"], dtype=np.int64),
        threshold=np.array(d["threshold"], dtype=np.float64),
        left=np.array(d["left"], dtype=np.int64),
        right=np.array(d["right"], dtype=np.int64),
        value=np.array(d["value"], dtype=np.float64).reshape(len(d["feature"]), -1),
        n_features=int(d["n_features"]),
    )


def ensemble_to_dict(ens: TrainedEnsemble) -> dict:
    return {
        "format": "gadaboost-ensemble",
        "version": FORMAT_VERSION,
        "algorithm": ens.algorithm,
        "n_classes": ens.n_classes,
        "spec": asdict(ens.spec),
        "params": ens.params,
        "stop_reason": ens.stop_reason,
        "members": [{"beta": b, "tree": _model_to_dict(m)} for m, b in ens.members],
        "history": [asdict(h) for h in ens.history],
        "final_subset_size": None if ens.final_subset is None else int(ens.final_subset.size),
    }


def ensemble_from_dict(d: dict) -> TrainedEnsemble:
    if d.get("format") != "gadaboost-ensemble":
        raise ValueError("not a serialized ensemble")
    if d.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported ensemble format version {d.get('version')}")
    return TrainedEnsemble(
        members=[(_model_from_dict(m["tree"]), float(m["beta"])) for m in d["members"]],
        n_classes=int(d["n_classes"]),
        algorithm=d["algorithm"],
        spec=LearnerSpec(**d["spec"]),
        history=[IterationRecord(**h) for h in d["history"]],
        stop_reason=d["stop_reason"],
        params=d.get("params", {}),
    )


def save_ensemble(ens: TrainedEnsemble, path) -> None:
    # json writes floats with repr, which round-trips exactly
    atomic_write(path, json.dumps(ensemble_to_dict(ens), indent=1))


def load_ensemble(path) -> TrainedEnsemble:
    with open(path) as fh:
        return ensemble_from_dict(json.load(fh))
