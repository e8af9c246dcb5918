"""Empirical point-density scan of T^k M for the two-rotation operator family.

Prints hit counts and the worst nearest-approach distance as the iterate budget
grows, which shows how fast the orbit fills the sphere.
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from grassdyn import Subspace, example_operator, orbit_point_density
from grassdyn.grassmann import random_unit_vectors


@dataclass
class Config:
    angles: tuple = (1.0, math.sqrt(2.0))
    odd: bool = False
    budgets: tuple = (1_000, 10_000, 100_000)
    eps: float = 0.05
    targets: int = 100
    seed: int = 42


def run(cfg: Config):
    T = example_operator(list(cfg.angles), odd=cfg.odd)
    N = T.shape[0]
    M = Subspace.coordinate(N, [0, 2])
    X = random_unit_vectors(np.random.default_rng(cfg.seed), N, cfg.targets)
    rows = []
    for K in cfg.budgets:
        rep = orbit_point_density(T, M, X, K, cfg.eps, seed=cfg.seed)
        rows.append((K, rep.hits, float(rep.min_distances.max())))
    return N, rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--angles", type=float, nargs="+", default=list(Config.angles))
    p.add_argument("--odd", action="store_true", help="append a scalar 1x1 block")
    p.add_argument("--budgets", type=int, nargs="+", default=list(Config.budgets))
    p.add_argument("--eps", type=float, default=Config.eps)
    p.add_argument("--targets", type=int, default=Config.targets)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args(argv)
    cfg = Config(tuple(a.angles), a.odd, tuple(a.budgets), a.eps, a.targets, a.seed)
    N, rows = run(cfg)
    print(f"R^{N}  eps={cfg.eps}  targets={cfg.targets}  seed={cfg.seed}")
    print(f"{'K':>10s} {'hits':>6s} {'worst':>10s}")
    for K, hits, worst in rows:
        print(f"{K:10d} {hits:6d} {worst:10.5f}")


if __name__ == "__main__":
    main()
