"""Desk-scale robustness and efficiency experiments shared by scripts and the acceptance suite."""

from __future__ import annotations

import gc
import time
from dataclasses import dataclass, field

import numpy as np

from . import boosting
from .cli import RunConfig, prepare
from .data import synth_blobs
from .granulation import granulate
from .learners import LearnerSpec


@dataclass
class RobustnessConfig:
    n: int = 5000
    q: int = 10
    K: int = 5
    spread: float = 0.1
    depth: int = 5
    T: int = 100
    rates: tuple = (0.2, 0.25, 0.3)
    seeds: tuple = tuple(range(10))
    algos: tuple = ("gsa", "samme")


@dataclass
class RobustnessResult:
    config: RobustnessConfig
    # accuracy[algo][rate] -> one value per seed
    accuracy: dict = field(default_factory=dict)

    def mean(self, algo: str, rate: float) -> float:
        return float(np.mean(self.accuracy[algo][rate]))

    def strict_wins(self, algo: str, rival: str, rate: float) -> int:
        a = np.asarray(self.accuracy[algo][rate])
        b = np.asarray(self.accuracy[rival][rate])
        return int(np.sum(a > b))


def robustness(cfg: RobustnessConfig = RobustnessConfig(), progress=None) -> RobustnessResult:
    """Test accuracy per algorithm, noise rate and seed on noisy-train / clean-test blobs."""
    res = RobustnessResult(cfg, {a: {r: [] for r in cfg.rates} for a in cfg.algos})
    spec = LearnerSpec(max_depth=cfg.depth)
    for seed in cfg.seeds:
        ds = synth_blobs(cfg.n, cfg.q, cfg.K, cfg.spread, seed=seed)
        for rate in cfg.rates:
            run = RunConfig(noise=rate, noise_seed=seed, split_seed=seed)
            train, test, _, _ = prepare(ds, run)
            for algo in cfg.algos:
                ens = boosting.fit_algorithm(algo, train, spec, cfg.T)
                acc = float(np.mean(boosting.predict_ensemble(ens, test) == test.labels))
                res.accuracy[algo][rate].append(acc)
                if progress:
                    progress(f"seed {seed} noise {rate:g} {algo}: {acc:.4f} (T'={len(ens)})")
    return res


def best_time(run, repeats: int = 3) -> tuple[object, float]:
    """Minimum wall seconds over ``repeats`` calls after one warm-up; returns the last result."""
    result = run()
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = run()
        best = min(best, time.perf_counter() - t0)
    return result, float(best)


@dataclass
class EfficiencyResult:
    fit_seconds: dict
    members: dict
    stop_reason: dict
    granulation_seconds: dict

    @property
    def fit_ratio(self) -> float:
        return self.fit_seconds["gsa"] / self.fit_seconds["samme"]

    @property
    def granulation_ratio(self) -> float:
        small, large = sorted(self.granulation_seconds)
        return self.granulation_seconds[large] / self.granulation_seconds[small]


def efficiency(n: int = 50_000, q: int = 10, K: int = 5, depth: int = 5, T: int = 100,
               gran_sizes=(10_000, 40_000), repeats: int = 3, seed: int = 0) -> EfficiencyResult:
    """Fit time of GAdaBoost.SA (granulation included) against SAMME, plus granulation scaling."""
    ds = synth_blobs(n, q, K, seed=seed)
    train, _, _, _ = prepare(ds, RunConfig(split_seed=seed))
    spec = LearnerSpec(max_depth=depth)
    fit_s, members, reasons = {}, {}, {}
    for algo in ("gsa", "samme"):
        ens, fit_s[algo] = best_time(lambda: boosting.fit_algorithm(algo, train, spec, T), repeats)
        members[algo], reasons[algo] = len(ens), ens.stop_reason
    return EfficiencyResult(fit_s, members, reasons, granulation_scaling(gran_sizes, q, K, seed))


def granulation_scaling(sizes=(10_000, 40_000), q: int = 10, K: int = 5, seed: int = 0,
                        repeats: int = 7) -> dict:
    """Minimum granulation seconds per dataset size.

    Sizes are timed in interleaved rounds so machine-load drift hits all of
    them alike; the ratio of minima is then far steadier than separate runs.
    """
    data = {n: synth_blobs(n, q, K, seed=seed) for n in sizes}
    best = {n: np.inf for n in sizes}
    for n in sizes:
        granulate(data[n])
    for _ in range(repeats):
        for n in sizes:
            gc.collect()
            t0 = time.perf_counter()
            granulate(data[n])
            best[n] = min(best[n], time.perf_counter() - t0)
    return {n: float(t) for n, t in best.items()}
