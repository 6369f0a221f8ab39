"""Command line: noisify, granulate, train, eval, bench."""

from __future__ import annotations

import argparse
import json
import logging
import os
import shutil
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import boosting, granulation
from .data import (DataError, Dataset, MinMax, inject_label_noise, load_csv, min_max_normalize,
                   relabel_text, split_indices, synth_blobs, atomic_write)
from .evaluation import EvalReport, compare, ranking, score, timed
from .learners import LearnerSpec
from .serialize import ensemble_from_dict, ensemble_to_dict

log = logging.getLogger("gadaboost")

NOISE_SWEEP = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3)
OUT_ENV = "GADABOOST_OUT"
ALGOS = ("gsa", "samme", "rob_samme")


@dataclass
class RunConfig:
    data: str = ""
    label_col: str = "-1"
    algo: str = "gsa"
    depth: int = 5
    min_leaf: int = 1
    iters: int = 100
    k: int = 5
    noise: float = 0.0
    noise_seed: int = 0
    split: float = 0.2
    split_seed: int = 0
    normalize: bool = True
    repeats: int = 1
    out: str = "runs"


# ---------------------------------------------------------------- data resolution

def resolve_data(spec: str, label_col="-1") -> tuple[Dataset, str]:
    """Load a file, or build synthetic data from ``blobs:n=..,q=..,k=..,spread=..,seed=..``."""
    if spec.startswith("blobs:") or spec == "blobs":
        kw = {"n": 1000, "q": 2, "k": 3, "spread": 0.1, "seed": 0}
        body = spec.partition(":")[2]
        for part in filter(None, body.split(",")):
            key, _, val = part.partition("=")
            if key not in kw:
                raise DataError(f"unknown blobs parameter {key!r}")
            kw[key] = float(val) if key == "spread" else int(val)
        ds = synth_blobs(kw["n"], kw["q"], kw["k"], kw["spread"], kw["seed"])
        name = "blobs_n{n}_q{q}_k{k}_s{spread:g}_seed{seed}".format(**kw)
        return ds, name
    path = Path(spec)
    if not path.exists():
        raise DataError(f"data file not found: {spec}")
    return load_csv(path, label_col), path.stem


# ---------------------------------------------------------------- single run

def prepare(ds: Dataset, cfg: RunConfig, repeat: int = 0):
    tr_idx, te_idx = split_indices(ds, cfg.split, cfg.split_seed + repeat)
    train, test = ds.subset(tr_idx), ds.subset(te_idx)
    record = None
    if cfg.noise > 0:
        train, record = inject_label_noise(train, cfg.noise, cfg.noise_seed + repeat)
    scaler = None
    if cfg.normalize:
        scaler = MinMax.fit(train)
        train, test = min_max_normalize(train, scaler), min_max_normalize(test, scaler)
    return train, test, scaler, record


_warmed: set = set()


def run_once(ds: Dataset, cfg: RunConfig, repeat: int = 0, warmup: bool = False):
    train, test, scaler, record = prepare(ds, cfg, repeat)
    spec = LearnerSpec(max_depth=cfg.depth, min_leaf=cfg.min_leaf)

    def fit():
        return boosting.fit_algorithm(cfg.algo, train, spec, cfg.iters, cfg.k)

    if warmup and cfg.algo not in _warmed:
        # first call in a process pays import/allocation costs
        fit()
        _warmed.add(cfg.algo)
    ens, fit_ms = timed(fit)
    preds, pred_ms = timed(lambda: boosting.predict_ensemble(ens, test))
    rep = score(preds, test.labels, ds.n_classes)
    rep.fit_ms, rep.predict_ms = fit_ms, pred_ms
    rep.meta = {
        "algorithm": cfg.algo,
        "repeat": repeat,
        "split_seed": cfg.split_seed + repeat,
        "noise_seed": cfg.noise_seed + repeat,
        "noise": cfg.noise,
        "n_flipped": 0 if record is None else int(record.flipped_indices.size),
        "T_prime": len(ens.members),
        "iterations": len(ens.history),
        "stop_reason": ens.stop_reason,
        "stopped_early": ens.stopped_early,
        "subset_final": None if ens.final_subset is None else int(ens.final_subset.size),
        "n_train": train.n_samples,
        "n_test": test.n_samples,
    }
    return ens, rep, scaler


def _ensemble_doc(ens, scaler, cfg: RunConfig) -> dict:
    doc = ensemble_to_dict(ens)
    doc["minmax"] = None if scaler is None else {"low": scaler.low.tolist(), "span": scaler.span.tolist()}
    doc["config"] = asdict(cfg)
    return doc


def _mean_report(reps: list[EvalReport], cfg: RunConfig) -> dict:
    keys = ("accuracy", "macro_f1", "fit_ms", "predict_ms")
    return {
        "config": asdict(cfg),
        "mean": {k: float(np.mean([getattr(r, k) for r in reps])) for k in keys},
        "repeats": [r.to_dict() for r in reps],
    }


def _write_json(path: Path, obj) -> None:
    atomic_write(path, json.dumps(obj, indent=1, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


# ---------------------------------------------------------------- subcommands

def cmd_noisify(args, cfg: RunConfig) -> int:
    src = Path(cfg.data)
    if not src.exists():
        raise DataError(f"data file not found: {cfg.data}")
    ds = load_csv(src, cfg.label_col)
    rates = NOISE_SWEEP if args.sweep else tuple(args.rates or (cfg.noise,))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for rate in rates:
        noisy, rec = inject_label_noise(ds, rate, cfg.noise_seed)
        stem = f"{src.stem}_noise{rate:g}"
        dst = out / f"{stem}{src.suffix}"
        if rec.flipped_indices.size == 0:
            tmp = dst.with_name(dst.name + ".tmp")
            shutil.copyfile(src, tmp)
            tmp.replace(dst)
        else:
            names = ds.class_names
            atomic_write(dst, relabel_text(src, cfg.label_col,
                                           {i: names[j] for i, j in rec.new_labels.items()}))
        rows = ["index,original_label,new_label,seed,rate"]
        for i in rec.flipped_indices:
            i = int(i)
            rows.append(f"{i},{ds.class_names[rec.original_labels[i]]},"
                        f"{ds.class_names[rec.new_labels[i]]},{cfg.noise_seed},{rate:g}")
        atomic_write(out / f"{stem}.noise.csv", "\n".join(rows) + "\n")
        print(f"{dst}: {rec.flipped_indices.size} of {ds.n_samples} labels flipped")
    return 0


def cmd_granulate(args, cfg: RunConfig) -> int:
    ds, name = resolve_data(cfg.data, cfg.label_col)
    if cfg.normalize:
        ds = min_max_normalize(ds)
    gran = granulation.granulate(ds)
    rep = granulation.report(gran, ds)
    rep["dataset"] = name
    out = Path(cfg.out)
    _write_json(out / f"{name}.granulation.json", rep)
    if args.dump:
        rows = ["ball_id,sample_index,radial_distance"]
        rows += [f"{b},{i},{r!r}" for b, i, r in granulation.membership_rows(gran)]
        atomic_write(out / f"{name}.balls.csv", "\n".join(rows) + "\n")
    print(f"{name}: {rep['n_balls']} balls, capacity {rep['capacity']}, "
          f"{rep['n_discarded']} discarded, {rep['impure_balls']} impure")
    return 0


def cmd_train(args, cfg: RunConfig) -> int:
    ds, name = resolve_data(cfg.data, cfg.label_col)
    out = Path(cfg.out)
    reps = []
    for r in range(cfg.repeats):
        ens, rep, scaler = run_once(ds, cfg, r)
        reps.append(rep)
        _write_json(out / f"{name}.{cfg.algo}.r{r}.ensemble.json", _ensemble_doc(ens, scaler, cfg))
    doc = _mean_report(reps, cfg)
    doc["dataset"] = name
    _write_json(out / f"{name}.{cfg.algo}.report.json", doc)
    m = doc["mean"]
    print(f"{name} {cfg.algo}: accuracy {m['accuracy']:.4f} macro-F1 {m['macro_f1']:.4f} "
          f"fit {m['fit_ms']:.1f} ms over {cfg.repeats} repeat(s)")
    return 0


def cmd_eval(args, cfg: RunConfig) -> int:
    if not args.model:
        raise DataError("eval needs --model")
    with open(args.model) as fh:
        doc = json.load(fh)
    ens = ensemble_from_dict(doc)
    ds, name = resolve_data(cfg.data, cfg.label_col)
    if doc.get("minmax"):
        mm = doc["minmax"]
        ds = min_max_normalize(ds, MinMax(np.array(mm["low"]), np.array(mm["span"])))
    preds, ms = timed(lambda: boosting.predict_ensemble(ens, ds))
    rep = score(preds, ds.labels, ens.n_classes)
    rep.predict_ms = ms
    rep.meta = {"algorithm": ens.algorithm, "model": str(args.model), "dataset": name}
    _write_json(Path(cfg.out) / f"{name}.{ens.algorithm}.eval.json", rep.to_dict())
    print(f"{name} {ens.algorithm}: accuracy {rep.accuracy:.4f} macro-F1 {rep.macro_f1:.4f}")
    return 0


def _bench_job(job):
    data, label_col, cfg, repeat = job
    try:
        ds, name = resolve_data(data, label_col)
        _, rep, _ = run_once(ds, cfg, repeat, warmup=True)
        return name, cfg, repeat, rep, None
    except Exception as e:  # reported per run key, not fatal for the sweep
        return Path(data).stem, cfg, repeat, None, f"{type(e).__name__}: {e}"


def cmd_bench(args, cfg: RunConfig) -> int:
    algos = [a.strip() for a in args.algos.split(",")]
    for a in algos:
        if a not in ALGOS:
            raise DataError(f"unknown algorithm {a!r}")
    rates = tuple(args.rates) if args.rates else NOISE_SWEEP
    datasets = args.datasets or [cfg.data]
    jobs = []
    for data in datasets:
        for rate in rates:
            for r in range(cfg.repeats):
                for a in algos:
                    c = RunConfig(**{**asdict(cfg), "algo": a, "noise": rate, "data": data})
                    jobs.append((data, cfg.label_col, c, r))
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(_bench_job, jobs))
    else:
        results = [_bench_job(j) for j in jobs]

    out = Path(cfg.out)
    rows, failed = [], []
    for name, c, r, rep, err in results:
        key = f"{name}/{c.algo}/noise{c.noise:g}/seed{r}"
        if err:
            failed.append(f"{key}: {err}")
            continue
        rows.append({"dataset": name, "algorithm": c.algo, "noise": c.noise, "seed": r,
                     "accuracy": rep.accuracy, "macro_f1": rep.macro_f1, "fit_ms": rep.fit_ms,
                     "Tprime": rep.meta["T_prime"], "subset_final": rep.meta["subset_final"]})
        _write_json(out / "runs" / f"{name}.{c.algo}.noise{c.noise:g}.seed{r}.json",
                    {**rep.to_dict(), "config": asdict(c)})

    cols = ["dataset", "algorithm", "noise", "seed", "accuracy", "macro_f1", "fit_ms", "Tprime",
            "subset_final"]
    lines = [",".join(cols)] + [",".join("" if row[k] is None else str(row[k]) for k in cols)
                                for row in rows]
    atomic_write(out / "results.csv", "\n".join(lines) + "\n")

    plot = ["noise,algorithm,mean_accuracy"]
    for rate in sorted({row["noise"] for row in rows}):
        for a in algos:
            accs = [row["accuracy"] for row in rows if row["noise"] == rate and row["algorithm"] == a]
            if accs:
                plot.append(f"{rate:g},{a},{np.mean(accs)}")
    atomic_write(out / "plot_data.csv", "\n".join(plot) + "\n")

    if len(algos) > 1 and rows and not failed:
        table = compare(rows, args.reference or algos[0])
        cmp_cols = ["noise", "reference", "rival", "metric", "win", "loss", "tie"]
        atomic_write(out / "comparison.csv", "\n".join(
            [",".join(cmp_cols)] + [",".join(str(t[k]) for k in cmp_cols) for t in table]) + "\n")
        print("ranking by mean accuracy: " + ", ".join(f"{a} {m:.4f}" for a, m in ranking(rows)))
        for t in table:
            print(f"noise {t['noise']:g} {t['reference']} vs {t['rival']} [{t['metric']}]: "
                  f"{t['win']}/{t['loss']}/{t['tie']}")
    print(f"{len(rows)} runs written to {out}")
    if failed:
        print("failed runs:\n  " + "\n  ".join(failed), file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------- argument parsing

def read_config(path) -> dict:
    """Flat ``key=value`` file; ``#`` starts a comment."""
    conf = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise DataError(f"{path}:{ln}: expected key=value")
        conf[key.strip().replace("-", "_")] = val.strip()
    return conf


def _coerce(cfg_dict: dict) -> RunConfig:
    base = RunConfig()
    kwargs = {}
    for k, v in cfg_dict.items():
        if not hasattr(base, k):
            raise DataError(f"unknown config key {k!r}")
        default = getattr(base, k)
        if isinstance(default, bool):
            v = v if isinstance(v, bool) else str(v).lower() in ("1", "true", "yes", "on")
        elif isinstance(default, int):
            v = int(v)
        elif isinstance(default, float):
            v = float(v)
        else:
            v = str(v)
        kwargs[k] = v
    return RunConfig(**kwargs)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--data", help="delimited text file or blobs:n=..,q=..,k=..,spread=..,seed=..")
    common.add_argument("--label-col", help="label column index (0-based, negative ok) or name")
    common.add_argument("--algo", choices=ALGOS)
    common.add_argument("--depth", type=int, help="tree depth (default 5)")
    common.add_argument("--min-leaf", type=int)
    common.add_argument("--iters", type=int, help="boosting iteration cap T (default 100)")
    common.add_argument("--k", type=int, help="Rob_SAMME neighbor count (default 5)")
    common.add_argument("--noise", type=float, help="label noise rate on the training split")
    common.add_argument("--noise-seed", type=int)
    common.add_argument("--split", type=float, help="test fraction (default 0.2)")
    common.add_argument("--split-seed", type=int)
    common.add_argument("--repeats", type=int)
    common.add_argument("--no-normalize", dest="normalize", action="store_const", const=False)
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./runs)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--dump", action="store_true", help="granulate: write ball membership")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="gadaboost", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    n = sub.add_parser("noisify", parents=[common], help="write label-noise copies of a dataset")
    n.add_argument("--rates", type=float, nargs="+")
    n.add_argument("--sweep", action="store_true", help="rates 0.05 .. 0.30 in steps of 0.05")
    sub.add_parser("granulate", parents=[common], help="granulate a dataset and report")
    sub.add_parser("train", parents=[common], help="fit one algorithm, save ensemble and report")
    e = sub.add_parser("eval", parents=[common], help="score a saved ensemble on a dataset")
    e.add_argument("--model")
    b = sub.add_parser("bench", parents=[common], help="algorithms x noise sweep x seeds")
    b.add_argument("--algos", default="gsa,samme")
    b.add_argument("--rates", type=float, nargs="+")
    b.add_argument("--datasets", nargs="+")
    b.add_argument("--reference")
    return p


_FIELDS = [f for f in RunConfig.__dataclass_fields__]


def resolve_config(args) -> RunConfig:
    merged = {"out": os.environ.get(OUT_ENV, RunConfig.out)}
    if args.config:
        merged.update(read_config(args.config))
    for f in _FIELDS:
        v = getattr(args, f, None)
        if v is not None:
            merged[f] = v
    if args.command == "bench" and getattr(args, "repeats", None) is None and "repeats" not in merged:
        merged["repeats"] = 5
    return _coerce(merged)


COMMANDS = {"noisify": cmd_noisify, "granulate": cmd_granulate, "train": cmd_train,
            "eval": cmd_eval, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if not cfg.data and not getattr(args, "datasets", None):
            raise DataError("--data is required")
        return COMMANDS[args.command](args, cfg)
    except (DataError, granulation.EmptyGranulation, boosting.BoostingError, ValueError, OSError) as e:
        print(f"gadaboost {args.command}: error: {e}", file=sys.stderr)
        return 2
