"""Train GAdaBoost.SA on local KEEL files with the tuned per-dataset hyperparameters.

Expects ``<keel_dir>/<name>.dat`` for each dataset named in
keel_reference_params.csv; datasets without a file are skipped.
"""

import argparse
import csv
import sys
from pathlib import Path

from gadaboost.cli import main as cli_main

PARAMS = Path(__file__).with_name("keel_reference_params.csv")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("keel_dir", type=Path)
    p.add_argument("--algo", default="gsa")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--out", default="runs/keel")
    a = p.parse_args()
    status = 0
    for row in csv.DictReader(open(PARAMS)):
        path = a.keel_dir / f"{row['dataset']}.dat"
        if not path.exists():
            continue
        rc = cli_main(["train", "--data", str(path), "--algo", a.algo, "--noise", row["noise"],
                       "--depth", row["depth"], "--iters", row["iters"], "--repeats", str(a.repeats),
                       "--out", f"{a.out}/noise{row['noise']}"])
        status = status or rc
    return status


if __name__ == "__main__":
    sys.exit(main())
