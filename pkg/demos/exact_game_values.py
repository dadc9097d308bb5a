"""Exact minimax values for small expert games, with dual certificates.

Walks through: the value of the two-constant-experts game at several
horizons, lower-bound certificates from random committed adversaries, and
the Bayes mixture strategy holding its log|F| regret ceiling on random
sequences.
"""

import math

import numpy as np

from logloss_lab.core import ExpertClass
from logloss_lab.game import (
    BayesMixture,
    FixedSequence,
    GameInstance,
    dual_value,
    exact_minimax,
    optimal_prediction,
    random_dual_strategy,
    run_strategy,
)


def main():
    rng = np.random.default_rng(0)

    print("=== exact minimax values, constants {0.3, 0.7} ===")
    ec = ExpertClass.constants([0.3, 0.7])
    for n in range(1, 7):
        g = GameInstance(horizon=n, expert_class=ec)
        v = exact_minimax(g)
        print(f"  n = {n}:  value = {v:.6f}   (log|F| ceiling = {math.log(2):.6f})")

    print()
    print("=== two contexts: the adversary's choice matters ===")
    ec2 = ExpertClass(contexts=["a", "b"], experts=[[0.2, 0.9], [0.8, 0.1]])
    g2 = GameInstance(horizon=3, expert_class=ec2)
    v2 = exact_minimax(g2)
    print(f"  n = 3, value = {v2:.6f}")
    for x in ec2.contexts:
        print(f"  first-round optimal prediction given x = {x!r}: "
              f"{optimal_prediction(g2, (), x):.6f}")

    print()
    print("=== dual certificates (every dual value <= minimax value) ===")
    best = -math.inf
    for _ in range(500):
        best = max(best, dual_value(g2, random_dual_strategy(g2, rng)))
    print(f"  best of 500 random duals = {best:.6f}, gap = {v2 - best:.6f}")

    print()
    print("=== Bayes mixture never exceeds log|F| ===")
    ec3 = ExpertClass.constants(rng.uniform(size=6))
    g3 = GameInstance(horizon=8, expert_class=ec3)
    strat = BayesMixture(ec3)
    worst = -math.inf
    for _ in range(200):
        contexts = [0] * g3.horizon
        outcomes = rng.integers(0, 2, size=g3.horizon).tolist()
        tr = run_strategy(g3, strat, FixedSequence(contexts, outcomes))
        worst = max(worst, tr.regret)
    print(f"  worst regret over 200 random sequences = {worst:.6f}")
    print(f"  log|F| = {math.log(6):.6f}")


if __name__ == "__main__":
    main()
