"""Run every bundled recipe (or a chosen subset) and print one verdict line each."""

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field

from grassdyn.recipes import RECIPES, run_recipe


@dataclass
class Config:
    names: list = field(default_factory=lambda: sorted(RECIPES))
    out: str = None


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("names", nargs="*", help="recipe names (default: all)")
    p.add_argument("--out", help="write all payloads as JSON")
    a = p.parse_args(argv)
    unknown = sorted(set(a.names) - set(RECIPES))
    if unknown:
        p.error(f"unknown recipes {unknown}; choose from {sorted(RECIPES)}")
    cfg = Config(a.names or sorted(RECIPES), a.out)
    results, failed = {}, 0
    for name in cfg.names:
        t0 = time.perf_counter()
        verdicts, payload = run_recipe(name)
        ok = all(verdicts.values())
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name:28s} {time.perf_counter() - t0:7.2f}s  {verdicts}")
        results[name] = {"verdicts": verdicts, "payload": payload}
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": asdict(cfg), "results": results}, fh, indent=2, default=str)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
