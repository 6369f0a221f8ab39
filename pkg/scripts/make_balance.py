"""Regenerate tests/data/balance.dat.

The balance-scale data is the full 5^4 grid of (left weight, left distance,
right weight, right distance); the class says which way the scale tips.
Written in KEEL layout so the loader's directive handling is exercised.
"""

import itertools
import sys
from pathlib import Path

out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parents[1] / "tests/data/balance.dat")
lines = [
    "@relation balance",
    "@attribute Left-weight real [1.0, 5.0]",
    "@attribute Left-distance real [1.0, 5.0]",
    "@attribute Right-weight real [1.0, 5.0]",
    "@attribute Right-distance real [1.0, 5.0]",
    "@attribute Balance_scale {L, B, R}",
    "@inputs Left-weight, Left-distance, Right-weight, Right-distance",
    "@outputs Balance_scale",
    "@data",
]
for lw, ld, rw, rd in itertools.product(range(1, 6), repeat=4):
    left, right = lw * ld, rw * rd
    cls = "B" if left == right else ("L" if left > right else "R")
    lines.append(f"{lw}.0, {ld}.0, {rw}.0, {rd}.0, {cls}")
out.write_text("\n".join(lines) + "\n")
print(f"wrote {len(lines) - 9} rows to {out}")
