"""Recovery error and runtime against the number of measurements.

Writes one CSV row per (constraint count, seed) and prints per-count means.
"""

import argparse
import csv
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from bcr.generators import SyntheticSpec, gen_synthetic, relative_error
from bcr.model import default_config
from bcr.solver import solve


@dataclass
class SweepConfig:
    n: int = 64
    rank: int = 3
    counts: list = field(default_factory=lambda: [50, 150, 300, 450, 600])
    seeds: int = 20
    x_update: str = "closed"
    out: str = "synthetic_sweep.csv"


def run(cfg: SweepConfig) -> list:
    rows = []
    for m in cfg.counts:
        for seed in range(cfg.seeds):
            problem, truth = gen_synthetic(SyntheticSpec(cfg.n, cfg.rank, m, seed))
            t0 = time.perf_counter()
            res = solve(problem, default_config(problem, x_update=cfg.x_update))
            rows.append({"num_constraints": m, "seed": seed,
                         "runtime_ms": 1000 * (time.perf_counter() - t0),
                         "iterations": res.iterations,
                         "rel_error": relative_error(res.X @ res.X.T, truth)})
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--rank", type=int, default=3)
    p.add_argument("--counts", default="50,150,300,450,600")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--x-update", choices=["closed", "gradient"], default="closed")
    p.add_argument("--out", default="synthetic_sweep.csv")
    a = p.parse_args()
    cfg = SweepConfig(a.n, a.rank, [int(c) for c in a.counts.split(",")], a.seeds,
                      a.x_update, a.out)
    print(asdict(cfg))

    rows = run(cfg)
    with open(cfg.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)

    for m in cfg.counts:
        sel = [r for r in rows if r["num_constraints"] == m]
        err = np.mean([r["rel_error"] for r in sel])
        ms = np.mean([r["runtime_ms"] for r in sel])
        print(f"m={m:4d}  mean rel_error={err:.4f}  mean runtime={ms:.1f} ms")


if __name__ == "__main__":
    main()
