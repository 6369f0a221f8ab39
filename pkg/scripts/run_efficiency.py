"""Fit time of GAdaBoost.SA against SAMME on large blobs, plus granulation time scaling."""

import argparse

from gadaboost.experiments import efficiency, granulation_scaling


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=50_000)
    p.add_argument("--q", type=int, default=10)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--sizes", type=int, nargs="+", default=[10_000, 40_000],
                   help="granulation sizes; ratios are taken against the first")
    a = p.parse_args()
    res = efficiency(a.n, a.q, a.classes, a.depth, a.iters, gran_sizes=a.sizes[:2], repeats=a.repeats)
    for algo in ("gsa", "samme"):
        print(f"{algo:6s} fit {res.fit_seconds[algo]:8.3f} s  members {res.members[algo]:3d}  "
              f"stop: {res.stop_reason[algo]}")
    print(f"fit time ratio GSA/SAMME: {res.fit_ratio:.3f}")
    times = granulation_scaling(tuple(a.sizes), a.q, a.classes)
    base = a.sizes[0]
    for n in a.sizes:
        print(f"granulate N={n:>7d}: {times[n]:.4f} s  (x{times[n] / times[base]:.2f} vs N={base})")


if __name__ == "__main__":
    main()
