"""Lower bound scaling: regret against the sign class grows like n^{p/(p+1)}.

Builds bump classes at the critical scale epsilon = n^{-1/(p+1)}/8, plays
the exact factorized Bayes strategy against datasets drawn from random sign
vectors, and fits the slope of median regret against n on log-log axes.
The closed-form lower bound n^{p/(p+1)}/128 is printed alongside.
"""

import numpy as np

from logloss_lab.assouad import (
    SignClassBayes,
    build_assouad_class,
    lower_bound_value,
    scaling_experiment,
)


def main():
    p = 1.0
    ns = [2**k for k in range(8, 15)]

    ac = build_assouad_class(1, 1 / 16)
    print(f"example class at epsilon = 1/16: {ac.n_centers} centers at "
          f"{np.round(ac.centers.ravel(), 4).tolist()}")
    print()

    res = scaling_experiment(p, ns, SignClassBayes, range(11))
    print(f"p = {p:g}, target slope p/(p+1) = {p / (p + 1):.3f}")
    print(f"{'n':>8s} {'epsilon':>10s} {'median regret':>14s} {'lower bound':>12s}")
    for n, eps, med in zip(res.ns, res.epsilons, res.medians):
        lb, _ = lower_bound_value(p, n)
        print(f"{n:8d} {eps:10.5f} {med:14.4f} {lb:12.4f}")
    print()
    print(f"fitted log-log slope = {res.slope:.4f}")


if __name__ == "__main__":
    main()
