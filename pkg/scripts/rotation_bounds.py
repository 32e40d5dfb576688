"""Compare the rotated-state excess bounds with the exact excesses.

Also evaluates the variant of the first bound with alpha in place of gamma,
which is not an upper bound.
"""
import argparse

import numpy as np

import qduality as q
from qduality.bell import complementary_slot
from qduality.linalg import so3_to_su2


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)

    worst = -np.inf
    alpha_fails = 0
    for i in range(args.trials):
        s = q.random_state(rng, i % 4 + 1)
        nf = q.normal_form(s)
        base = q.apply_local_unitary(s, nf.u_S, nf.u_M)
        tbar = tuple(nf.tbar)
        e = q.EulerAngles.random(rng)
        rotated = q.apply_local_unitary(base, so3_to_su2(q.euler_rotation(e)), np.eye(2))
        bz, bp = q.rotated_excess_bounds(tbar, e)
        dz = q.distinguishability_excess(rotated, q.Z)
        dp = q.distinguishability_excess(rotated, (q.X, q.Y)[complementary_slot(tbar)])
        worst = max(worst, dz**2 - bz, dp**2 - bp)
        t33, t11, t22 = tbar
        alt = t33**2 * np.cos(e.beta) ** 2 + np.sin(e.beta) ** 2 * (
            t11**2 * np.cos(e.alpha) ** 2 + t22**2 * np.sin(e.alpha) ** 2
        )
        alpha_fails += dz**2 > alt + 1e-9
    print(f"trials {args.trials}: largest (excess^2 - bound) = {worst:.3e}")
    print(f"alpha variant of the first bound violated in {alpha_fails} trials")


if __name__ == "__main__":
    main()
