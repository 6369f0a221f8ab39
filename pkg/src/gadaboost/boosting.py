"""SAMME, Rob_SAMME and granular-ball SAMME (GAdaBoost.SA) behind one interface."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import learners
from .data import Dataset
from .granulation import Granulation, ball_boundary_order, granulate
from .learners import FittedModel, LearnerSpec

log = logging.getLogger(__name__)

EPS_CLAMP = 1e-10

ZERO_ERROR = "zero error"
SUBSET_CONVERGED = "subset converged"
CAP_REACHED = "cap reached"
NO_WEAK_LEARNER = "no weak learner"


class BoostingError(RuntimeError):
    pass


@dataclass
class IterationRecord:
    t: int
    epsilon: float
    beta: float
    admitted: bool
    subset_size: int | None = None
    loss_factor: float | None = None
    n_error_balls: int | None = None
    grown: int | None = None
    weights_reset: bool = False
    n_noise_flagged: int | None = None
    note: str = ""


@dataclass(eq=False)
class TrainedEnsemble:
    members: list[tuple[FittedModel, float]]
    n_classes: int
    algorithm: str
    spec: LearnerSpec
    history: list[IterationRecord] = field(default_factory=list)
    stop_reason: str = CAP_REACHED
    params: dict = field(default_factory=dict)
    final_subset: np.ndarray | None = None

    @property
    def stopped_early(self) -> bool:
        return self.stop_reason != CAP_REACHED

    @property
    def betas(self) -> np.ndarray:
        return np.array([b for _, b in self.members])

    def __len__(self):
        return len(self.members)


# ---------------------------------------------------------------- formulas

def clamp_eps(epsilon: float) -> float:
    return min(max(float(epsilon), EPS_CLAMP), 1.0 - EPS_CLAMP)


def beta(epsilon: float, K: int) -> float:
    """Classifier weight ln((1-e)/e) + ln(K-1), with e clamped away from 0 and 1."""
    e = clamp_eps(epsilon)
    return math.log((1.0 - e) / e) + math.log(K - 1)


def rob_beta(epsilon: float, K: int) -> float:
    return (K - 1) ** 2 / K * beta(epsilon, K)


def loss_factor(epsilon: float, K: int) -> float:
    """Per-iteration multiplier of the exponential loss for a learner with error ``epsilon``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("loss_factor needs 0 < epsilon < 1")
    e = epsilon
    return e + (1.0 - e) * (e / (1.0 - e)) ** (1.0 / K) * (1.0 / (K - 1)) ** (1.0 / K)


def subset_error(preds, truth) -> float:
    preds, truth = np.asarray(preds), np.asarray(truth)
    if preds.size == 0 or preds.shape != truth.shape:
        raise ValueError("subset_error needs equal, nonzero arity")
    return float(np.mean(preds != truth))


# ---------------------------------------------------------------- prediction and loss

def vote_scores(ens: TrainedEnsemble, X: np.ndarray, upto: int | None = None) -> np.ndarray:
    members = ens.members if upto is None else ens.members[:upto]
    scores = np.zeros((X.shape[0], ens.n_classes))
    rows = np.arange(X.shape[0])
    for model, b in members:
        scores[rows, learners.predict_arrays(model, X)] += b
    return scores


def predict_ensemble(ens: TrainedEnsemble, ds: Dataset, indices=None) -> np.ndarray:
    if not ens.members:
        raise BoostingError("empty ensemble")
    X = ds.features if indices is None else ds.features[np.asarray(indices, dtype=np.int64)]
    return np.argmax(vote_scores(ens, X), axis=1)


def staged_loss(ens: TrainedEnsemble, ds: Dataset, indices=None, upto: int | None = None) -> float:
    """Sum over samples of exp(-f_y(x) / K) using the first ``upto`` members."""
    upto = len(ens.members) if upto is None else upto
    if not 0 <= upto <= len(ens.members):
        raise ValueError("upto out of range")
    idx = np.arange(ds.n_samples) if indices is None else np.asarray(indices, dtype=np.int64)
    X, y = ds.features[idx], ds.labels[idx]
    f_true = vote_scores(ens, X, upto)[np.arange(idx.size), y]
    return float(np.exp(-f_true / ens.n_classes).sum())


# ---------------------------------------------------------------- SAMME

def _check(ds: Dataset, T: int):
    if T < 1:
        raise ValueError("T must be >= 1")
    if np.unique(ds.labels).size < 2:
        raise BoostingError("training data holds a single class")


def samme_step(ds: Dataset, spec: LearnerSpec, w: np.ndarray):
    """One SAMME round: fit on weights ``w``; return (model, miss, eps, beta, next weights)."""
    model = learners.fit(spec, ds, None, w)
    miss = learners.predict(model, ds) != ds.labels
    eps = float(w[miss].sum() / w.sum())
    b = beta(eps, ds.n_classes)
    w_next = w * np.exp(b * miss)
    return model, miss, eps, b, w_next / w_next.sum()


def samme_fit(ds: Dataset, spec: LearnerSpec, T: int) -> TrainedEnsemble:
    _check(ds, T)
    N, K = ds.n_samples, ds.n_classes
    uniform = np.full(N, 1.0 / N)
    w = uniform.copy()
    ens = TrainedEnsemble([], K, "samme", spec, params={"T": T})
    for t in range(1, T + 1):
        model, miss, eps, b, w_next = samme_step(ds, spec, w)
        rec = IterationRecord(t, eps, b, admitted=b > 0, subset_size=N)
        ens.history.append(rec)
        if b <= 0:
            # not better than chance: drop it and restart from uniform weights
            was_uniform = np.array_equal(w, uniform)
            w = uniform.copy()
            rec.weights_reset = True
            if was_uniform:
                ens.stop_reason = NO_WEAK_LEARNER
                break
            continue
        ens.members.append((model, b))
        if eps == 0.0:
            rec.note = "epsilon clamped"
            ens.stop_reason = ZERO_ERROR
            break
        w = w_next
    if not ens.members:
        raise BoostingError("no admissible base classifier")
    return ens


# ---------------------------------------------------------------- Rob_SAMME

def knn_indices(X: np.ndarray, k: int) -> np.ndarray:
    """k nearest neighbors of every row, excluding the row itself."""
    n = X.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < N, got k={k}, N={n}")
    dist, idx = cKDTree(X).query(X, k=k + 1)
    out = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        row = idx[i][idx[i] != i]
        out[i] = row[:k]
    return out


def rob_samme_fit(ds: Dataset, spec: LearnerSpec, T: int, k: int = 5) -> TrainedEnsemble:
    _check(ds, T)
    N, K = ds.n_samples, ds.n_classes
    nbrs = knn_indices(ds.features, k)
    uniform = np.full(N, 1.0 / N)
    w = uniform.copy()
    ens = TrainedEnsemble([], K, "rob_samme", spec, params={"T": T, "k": k})
    for t in range(1, T + 1):
        model = learners.fit(spec, ds, None, w)
        miss = learners.predict(model, ds) != ds.labels
        eps = float(w[miss].sum() / w.sum())
        b = rob_beta(eps, K)
        mu = miss[nbrs].mean(axis=1)
        noise = mu > mu.mean()
        rec = IterationRecord(t, eps, b, admitted=b > 0, subset_size=N,
                              n_noise_flagged=int(noise.sum()))
        ens.history.append(rec)
        if eps > (K - 1) / K or eps == 0.0:
            was_uniform = np.array_equal(w, uniform)
            w = uniform.copy()
            rec.weights_reset = True
            if b > 0:
                ens.members.append((model, b))
            if was_uniform:
                # the next fit would repeat this one exactly
                ens.stop_reason = ZERO_ERROR if eps == 0.0 else NO_WEAK_LEARNER
                break
            continue
        if b > 0:
            ens.members.append((model, b))
        w = w.copy()
        w[miss & ~noise] *= math.exp(b)
        w[~miss & noise] = 0.0
        total = w.sum()
        if total <= 0:
            log.warning("Rob_SAMME iteration %d zeroed every weight; resetting", t)
            w = uniform.copy()
            rec.weights_reset = True
        else:
            w /= total
    if not ens.members:
        raise BoostingError("no admissible base classifier")
    return ens


# ---------------------------------------------------------------- GAdaBoost.SA

class SubsetState:
    """Boundary-first sampling bookkeeping over a granulation."""

    def __init__(self, gran: Granulation, per_ball: int):
        self.granulation = gran
        self.orders = [ball_boundary_order(b) for b in gran.balls]
        self.sampled = np.array([min(per_ball, o.size) for o in self.orders], dtype=np.int64)
        self.subset = np.sort(np.concatenate([o[:s] for o, s in zip(self.orders, self.sampled)]))

    def grow(self, ball_ids) -> int:
        """Admit the next unsampled boundary member of each listed ball."""
        added = []
        for b in ball_ids:
            s = self.sampled[b]
            if s < self.orders[b].size:
                added.append(self.orders[b][s])
                self.sampled[b] = s + 1
        if added:
            self.subset = np.sort(np.concatenate([self.subset, np.array(added, dtype=np.int64)]))
        return len(added)


def initial_per_ball(cap: int, q: int) -> int:
    return min(int(math.floor(0.5 * cap)), q)


def gadaboost_sa_fit(ds: Dataset, spec: LearnerSpec, T: int,
                     granulation: Granulation | None = None) -> TrainedEnsemble:
    """Boost on incrementally grown ball-boundary subsets.

    Each round fits an unweighted learner on the current subset, then adds
    the next farthest-from-center member of every ball that still holds a
    misclassified subset sample. Stops on zero subset error, when no ball
    can grow, or after ``T`` rounds.
    """
    _check(ds, T)
    K = ds.n_classes
    gran = granulation if granulation is not None else granulate(ds)
    state = SubsetState(gran, initial_per_ball(gran.capacity, ds.n_features))
    ens = TrainedEnsemble([], K, "gsa", spec, params={"T": T, "capacity": gran.capacity,
                                                     "per_ball": initial_per_ball(gran.capacity, ds.n_features)})
    for t in range(1, T + 1):
        D = state.subset
        model = learners.fit(spec, ds, D)
        preds = learners.predict(model, ds, D)
        eps = subset_error(preds, ds.labels[D])
        miss = preds != ds.labels[D]
        b = beta(eps, K)
        rf = loss_factor(clamp_eps(eps), K)
        error_balls = np.unique(gran.ball_of[D[miss]])
        rec = IterationRecord(t, eps, b, admitted=b > 0, subset_size=int(D.size),
                              loss_factor=rf, n_error_balls=int(error_balls.size))
        ens.history.append(rec)
        if b > 0:
            ens.members.append((model, b))
        if error_balls.size == 0:
            rec.note = "epsilon clamped"
            ens.stop_reason = ZERO_ERROR
            break
        rec.grown = state.grow(error_balls)
        if rec.grown == 0:
            ens.stop_reason = SUBSET_CONVERGED
            break
    ens.final_subset = state.subset
    if not ens.members:
        raise BoostingError("no admissible base classifier")
    return ens


def fit_algorithm(algo: str, ds: Dataset, spec: LearnerSpec, T: int, k: int = 5) -> TrainedEnsemble:
    if algo == "gsa":
        return gadaboost_sa_fit(ds, spec, T)
    if algo == "samme":
        return samme_fit(ds, spec, T)
    if algo == "rob_samme":
        return rob_samme_fit(ds, spec, T, k)
    raise ValueError(f"unknown algorithm {algo!r}")
