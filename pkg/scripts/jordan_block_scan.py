"""Exploratory scan for orbits of a single real Jordan block with rho >= 2.

Reports measured nearest-approach statistics only; no density claim is made.
"""

import argparse
import json
from dataclasses import dataclass

from grassdyn.recipes import run_recipe


@dataclass
class Config:
    N_values: tuple = (2, 3)
    K: int = 5_000
    targets: int = 30
    seed: int = 23


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--N", type=int, nargs="+", default=list(Config.N_values), help="block sizes rho")
    p.add_argument("--K", type=int, default=Config.K)
    p.add_argument("--targets", type=int, default=Config.targets)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args(argv)
    cfg = Config(tuple(a.N), a.K, a.targets, a.seed)
    _, payload = run_recipe("jordan-block-open-question", N_values=cfg.N_values, K=cfg.K,
                            targets=cfg.targets, seed=cfg.seed)
    print(json.dumps(payload, indent=2, default=str))


if __name__ == "__main__":
    main()
