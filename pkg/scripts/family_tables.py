"""Distinguishability excesses and Bell factor for the standard state families.

    python scripts/family_tables.py --family werner --steps 11
    python scripts/family_tables.py --family depolarized --steps 5
"""
import argparse
from dataclasses import dataclass

import numpy as np

import qduality as q


@dataclass
class Config:
    family: str = "werner"
    steps: int = 11


def werner_rows(cfg):
    for R in np.linspace(0, 1, cfg.steps):
        s = q.werner(R)
        rep = q.saturation_search(s)
        yield {
            "R": R,
            "dD": q.distinguishability_excess(s, q.Z),
            "dD'": q.distinguishability_excess(s, q.X),
            "B": q.bell_max(s),
            "entangled": q.bell.is_entangled(s),
            "slack": rep.slack,
        }


def depolarized_rows(cfg):
    grid = np.linspace(0, 1, cfg.steps)
    for r1 in grid:
        for r2 in grid:
            s = q.depolarized_state(r1, r2)
            yield {
                "R1": r1,
                "R2": r2,
                "dD": q.distinguishability_excess(s, q.Z),
                "dD'": q.distinguishability_excess(s, q.X),
                "B": q.bell_max(s),
                "slack": q.saturation_search(s).slack,
            }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--family", choices=("werner", "depolarized"), default="werner")
    p.add_argument("--steps", type=int, default=11)
    cfg = Config(**vars(p.parse_args()))
    rows = list((werner_rows if cfg.family == "werner" else depolarized_rows)(cfg))
    keys = list(rows[0])
    print("  ".join(f"{k:>9s}" for k in keys))
    for r in rows:
        print("  ".join(f"{v!s:>9s}" if isinstance(v, (bool, np.bool_)) else f"{v:9.5f}" for v in r.values()))


if __name__ == "__main__":
    main()
