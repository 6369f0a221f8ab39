"""Accuracy of GAdaBoost.SA against SAMME (and optionally Rob_SAMME) under label noise on blobs."""

import argparse
import json

from gadaboost.experiments import RobustnessConfig, robustness


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--q", type=int, default=10)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--spread", type=float, default=0.1)
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--rates", type=float, nargs="+", default=[0.2, 0.25, 0.3])
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--algos", default="gsa,samme")
    p.add_argument("--json", help="write per-seed accuracies here")
    a = p.parse_args()
    cfg = RobustnessConfig(a.n, a.q, a.classes, a.spread, a.depth, a.iters, tuple(a.rates),
                           tuple(range(a.seeds)), tuple(a.algos.split(",")))
    res = robustness(cfg, progress=print)
    print()
    print("noise  " + "  ".join(f"{x:>9}" for x in cfg.algos))
    for r in cfg.rates:
        print(f"{r:<6g} " + "  ".join(f"{res.mean(x, r):9.4f}" for x in cfg.algos))
    if "gsa" in cfg.algos and "samme" in cfg.algos:
        for r in cfg.rates:
            print(f"noise {r:g}: GSA strictly beats SAMME on {res.strict_wins('gsa', 'samme', r)}"
                  f"/{len(cfg.seeds)} seeds")
    if a.json:
        with open(a.json, "w") as fh:
            json.dump({x: {str(r): v for r, v in d.items()} for x, d in res.accuracy.items()}, fh, indent=1)


if __name__ == "__main__":
    main()
