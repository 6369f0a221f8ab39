"""Accuracy / macro-F1 scoring, timing, and win-loss-tie comparison tables."""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

TIE_TOL = 1e-4


@dataclass
class EvalReport:
    accuracy: float
    macro_f1: float
    precision: list[float]
    recall: list[float]
    f1: list[float]
    confusion: list[list[int]]
    fit_ms: float | None = None
    predict_ms: float | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "per_class": {"precision": self.precision, "recall": self.recall, "f1": self.f1},
            "confusion": self.confusion,
            "fit_ms": self.fit_ms,
            "predict_ms": self.predict_ms,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        pc = d["per_class"]
        return cls(d["accuracy"], d["macro_f1"], pc["precision"], pc["recall"], pc["f1"],
                   d["confusion"], d.get("fit_ms"), d.get("predict_ms"), d.get("meta", {}))


def confusion_matrix(preds, truth, K: int) -> np.ndarray:
    preds, truth = np.asarray(preds, dtype=np.int64), np.asarray(truth, dtype=np.int64)
    if preds.shape != truth.shape or preds.size == 0:
        raise ValueError("preds and truth must have equal, nonzero length")
    # rows: true class, columns: predicted class
    return np.bincount(truth * K + preds, minlength=K * K).reshape(K, K)


def score(preds, truth, K: int) -> EvalReport:
    """Accuracy and macro-averaged F1.

    Classes with no support and no predictions get F1 = 0, so macro-F1 is
    the plain mean over all K classes.
    """
    cm = confusion_matrix(preds, truth, K)
    tp = np.diag(cm).astype(float)
    pred_tot = cm.sum(axis=0)
    true_tot = cm.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        prec = np.where(pred_tot > 0, tp / pred_tot, 0.0)
        rec = np.where(true_tot > 0, tp / true_tot, 0.0)
        f1 = np.where(prec + rec > 0, 2 * prec * rec / (prec + rec), 0.0)
    return EvalReport(
        accuracy=float(tp.sum() / cm.sum()),
        macro_f1=float(f1.mean()),
        precision=prec.tolist(),
        recall=rec.tolist(),
        f1=f1.tolist(),
        confusion=cm.tolist(),
    )


def timed(run, warmup: bool = False):
    """Run ``run()`` and return ``(result, wall ms)``; optionally discard one warm-up call."""
    if warmup:
        run()
    t0 = time.perf_counter()
    result = run()
    return result, (time.perf_counter() - t0) * 1e3


def timed_mean(run, repeats: int = 5, warmup: bool = True):
    """Mean wall ms over ``repeats`` timed calls; returns the last result."""
    if warmup:
        run()
    times = []
    result = None
    for _ in range(repeats):
        result, ms = timed(run)
        times.append(ms)
    return result, float(np.mean(times)), times


def _wlt(a: float, b: float, tol: float = TIE_TOL) -> str:
    if abs(a - b) < tol:
        return "tie"
    return "win" if a > b else "loss"


def compare(rows: list[dict], reference: str, metrics=("accuracy", "macro_f1"),
            tol: float = TIE_TOL) -> list[dict]:
    """Win/loss/tie of ``reference`` against every other algorithm.

    ``rows`` are flat records with keys ``dataset, algorithm, noise, seed`` and
    the metric columns. Groups are keyed by (dataset, noise, seed); output has
    one record per (noise, rival, metric), rivals ordered by mean accuracy
    descending.
    """
    groups: dict[tuple, dict[str, dict]] = defaultdict(dict)
    for r in rows:
        key = (r["dataset"], r["noise"], r["seed"])
        groups[key][r["algorithm"]] = r
    algos = sorted({r["algorithm"] for r in rows})
    if reference not in algos:
        raise ValueError(f"reference {reference!r} missing from rows")
    if len(algos) < 2:
        raise ValueError("comparison needs at least two algorithms")
    for key, g in groups.items():
        if set(g) != set(algos):
            raise ValueError(f"group {key} lacks algorithms {sorted(set(algos) - set(g))}")
    mean_acc = {a: np.mean([r["accuracy"] for r in rows if r["algorithm"] == a]) for a in algos}
    rivals = sorted((a for a in algos if a != reference), key=lambda a: (-mean_acc[a], a))

    out = []
    for noise in sorted({k[1] for k in groups}):
        keys = [k for k in groups if k[1] == noise]
        for rival in rivals:
            for m in metrics:
                tally = {"win": 0, "loss": 0, "tie": 0}
                for k in keys:
                    tally[_wlt(groups[k][reference][m], groups[k][rival][m], tol)] += 1
                out.append({"noise": noise, "reference": reference, "rival": rival, "metric": m,
                            **tally})
    return out


def ranking(rows: list[dict]) -> list[tuple[str, float]]:
    algos = sorted({r["algorithm"] for r in rows})
    means = [(a, float(np.mean([r["accuracy"] for r in rows if r["algorithm"] == a]))) for a in algos]
    return sorted(means, key=lambda t: (-t[1], t[0]))
