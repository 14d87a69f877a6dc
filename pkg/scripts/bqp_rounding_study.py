"""Graph-cut BQPs: rounded objective against the brute-force optimum.

Compares initializer scalings and plain vs swept hyperplanes on the same
instances, so the effect of each choice can be read off one table.
"""

import argparse
from dataclasses import dataclass

from bcr.errors import Infeasible
from bcr.generators import GraphCutSpec, gen_graphcut
from bcr.model import Style, default_config
from bcr.oracle import brute_force_bqp
from bcr.rounding import hyperplane_round
from bcr.solver import solve


@dataclass
class StudyConfig:
    n: int = 10
    instances: int = 50
    kappa: float = 0.6
    rank: int = 2
    trials: int = 100
    slack: float = 0.05


VARIANTS = [
    ("fit + sweep", "fit", True),
    ("fit, plain", "fit", False),
    ("eigenvalue + sweep", "eigenvalue", True),
    ("eigenvalue, plain", "eigenvalue", False),
]


def instances(cfg: StudyConfig):
    seed = 0
    found = 0
    while found < cfg.instances:
        p, cost = gen_graphcut(GraphCutSpec(n=cfg.n, kappa=cfg.kappa, rank=cfg.rank, seed=seed))
        try:
            bf = brute_force_bqp(cost, [(c.factor, c.bound, c.sense) for c in p.constraints])
        except Infeasible:
            seed += 1
            continue
        yield seed, p, cost, bf.best_objective
        found += 1
        seed += 1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--instances", type=int, default=50)
    ap.add_argument("--kappa", type=float, default=0.6)
    ap.add_argument("--rank", type=int, default=2)
    ap.add_argument("--trials", type=int, default=100)
    a = ap.parse_args()
    cfg = StudyConfig(a.n, a.instances, a.kappa, a.rank, a.trials)

    stats = {name: [0, 0, 0] for name, _, _ in VARIANTS}  # within, infeasible, below
    for seed, p, cost, opt in instances(cfg):
        for name, scale, sweep in VARIANTS:
            res = solve(p, default_config(p, Style.BQP, init_scale=scale))
            lab = hyperplane_round(res.X, cost, cfg.trials, seed, problem=p, sweep=sweep)
            s = stats[name]
            s[0] += lab.feasible and lab.objective <= opt + cfg.slack * abs(opt)
            s[1] += not lab.feasible
            s[2] += lab.objective < opt - 1e-9 * (1 + abs(opt))

    print(f"{'variant':22s} within{cfg.slack:.0%}  infeasible  below-opt")
    for name, (w, inf, below) in stats.items():
        print(f"{name:22s} {w:4d}/{cfg.instances:<4d} {inf:9d} {below:10d}")


if __name__ == "__main__":
    main()
