"""Reconstruction sweep over dimensions and seeds, one CSV row per oracle.

    python scripts/tingley_sweep.py --max-n 12 --seeds 50 --trials 500 --out sweep.csv
"""

import argparse
import csv
import sys
import time
from dataclasses import dataclass

import numpy as np

from sphereiso.tingley import generate_oracle, recover_structure, verify_theorem


@dataclass
class SweepConfig:
    max_n: int = 8
    seeds: int = 20
    trials: int = 1000


def run(cfg: SweepConfig):
    for n in range(1, cfg.max_n + 1):
        for seed in range(cfg.seeds):
            t0 = time.perf_counter()
            T, truth = generate_oracle(n, seed)
            R = recover_structure(T)
            rep = verify_theorem(T, R, cfg.trials, np.random.default_rng([n, seed]))
            yield {
                "n": n,
                "seed": seed,
                "round_trip": R.equals(truth),
                "pass": rep["pass"],
                "max_residual": rep["max_residual"],
                "conjugated": int((R.signs < 0).sum()),
                "seconds": round(time.perf_counter() - t0, 4),
            }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--out")
    a = p.parse_args(argv)
    fh = open(a.out, "w", newline="") if a.out else sys.stdout
    w = None
    for row in run(SweepConfig(a.max_n, a.seeds, a.trials)):
        if w is None:
            w = csv.DictWriter(fh, fieldnames=list(row))
            w.writeheader()
        w.writerow(row)
    if a.out:
        fh.close()


if __name__ == "__main__":
    main()
