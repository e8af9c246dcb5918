"""First-hit times for simultaneous phase approximation k*theta ~ phi (mod 2 pi).

Sweeps eps and reports the smallest k found, which scales roughly like
eps^(-d) for d independent angles.
"""

import argparse
import math
from dataclasses import dataclass

from grassdyn import kronecker_find


@dataclass
class Config:
    angles: tuple = (1.0, math.sqrt(2.0))
    phases: tuple = (math.pi / 2, math.pi)
    eps_values: tuple = (0.1, 0.05, 0.02, 0.01)
    K: int = 10_000_000


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--angles", type=float, nargs="+", default=list(Config.angles))
    p.add_argument("--phases", type=float, nargs="+", default=list(Config.phases))
    p.add_argument("--eps", type=float, nargs="+", default=list(Config.eps_values))
    p.add_argument("--K", type=int, default=Config.K)
    a = p.parse_args(argv)
    cfg = Config(tuple(a.angles), tuple(a.phases), tuple(a.eps), a.K)
    for eps in cfg.eps_values:
        k = kronecker_find(cfg.angles, cfg.phases, eps, cfg.K)
        print(f"eps={eps:<8g} k={'none within K' if k is None else k}")


if __name__ == "__main__":
    main()
