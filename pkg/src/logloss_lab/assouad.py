"""Hypercube lower-bound construction for Lipschitz Bernoulli regression.

Bins of width 4*eps tile [0,1]^dim; each sign vector v in {-1,+1}^N picks
a mean value in {eps, 4*eps} per bin center, and data are drawn i.i.d.
with x uniform over centers and y | x Bernoulli.  Averaging an online
strategy's predictions gives a batch estimator whose KL risk connects
regret to the n^{p/(p+1)} lower-bound rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import kl_bernoulli, log_loss

__all__ = [
    "AssouadClass",
    "BatchEstimator",
    "build_assouad_class",
    "sample_dataset",
    "ConstantStrategy",
    "EmpiricalMeanStrategy",
    "SignClassBayes",
    "online_to_batch",
    "kl_risk",
    "lower_bound_value",
    "ScalingResult",
    "scaling_experiment",
]

_MAX_CENTERS = 1 << 20


@dataclass
class AssouadClass:
    dim: int
    epsilon: float
    centers: np.ndarray  # (N, dim) coordinates

    @property
    def n_centers(self) -> int:
        return self.centers.shape[0]

    def values(self, v) -> np.ndarray:
        """Per-center means under the sign vector v."""
        v = np.asarray(v)
        if v.shape != (self.n_centers,):
            raise ValueError("sign vector length must match center count")
        if not np.all(np.abs(v) == 1):
            raise ValueError("signs must be +-1")
        return np.where(v == 1, 4.0 * self.epsilon, self.epsilon)


@dataclass
class BatchEstimator:
    table: np.ndarray  # per-center probability

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=float)
        if np.any((self.table < 0) | (self.table > 1)):
            raise ValueError("estimates must lie in [0, 1]")


def build_assouad_class(dim: int, epsilon: float) -> AssouadClass:
    """Regular grid of bin centers at (4 eps)(i - 1/2) per coordinate."""
    if not 0 < epsilon < 0.125:
        raise ValueError("epsilon must lie in (0, 1/8)")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    m = int(math.floor(1.0 / (4.0 * epsilon)))
    if m**dim > _MAX_CENTERS:
        raise ValueError("too many centers")
    axis = 4.0 * epsilon * (np.arange(1, m + 1) - 0.5)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    centers = np.stack([g.ravel() for g in grids], axis=1)
    return AssouadClass(dim=dim, epsilon=epsilon, centers=centers)


def sample_dataset(ac: AssouadClass, v, n: int, seed: int):
    """n i.i.d. (center_id, outcome) pairs: x uniform over centers,
    y | x ~ Ber(f_v(x))."""
    means = ac.values(v)
    rng = np.random.default_rng(seed)
    cids = rng.integers(0, ac.n_centers, size=n)
    ys = (rng.random(n) < means[cids]).astype(int)
    return list(zip(cids.tolist(), ys.tolist()))


class ConstantStrategy:
    def __init__(self, ac: AssouadClass, value: float = 0.5):
        self.n_centers = ac.n_centers
        self.value = float(value)

    def predict(self, cid: int) -> float:
        return self.value

    def update(self, cid: int, y: int) -> None:
        pass

    def table(self) -> np.ndarray:
        return np.full(self.n_centers, self.value)


class EmpiricalMeanStrategy:
    """Per-center running mean with add-one smoothing."""

    def __init__(self, ac: AssouadClass):
        self.ones = np.zeros(ac.n_centers)
        self.total = np.zeros(ac.n_centers)

    def predict(self, cid: int) -> float:
        return (self.ones[cid] + 1.0) / (self.total[cid] + 2.0)

    def update(self, cid: int, y: int) -> None:
        self.ones[cid] += y
        self.total[cid] += 1

    def table(self) -> np.ndarray:
        return (self.ones + 1.0) / (self.total + 2.0)


class SignClassBayes:
    """Exact Bayes mixture over the 2^N sign class, uniform prior.

    The prior is a product over centers and the likelihood factorizes by
    center, so the posterior stays a product; per center it suffices to
    track the two sign log-likelihoods, which keeps the mixture exact at
    any N.
    """

    def __init__(self, ac: AssouadClass):
        self.hi = 4.0 * ac.epsilon
        self.lo = ac.epsilon
        n = ac.n_centers
        self.log_w_hi = np.zeros(n)
        self.log_w_lo = np.zeros(n)

    def _posterior_mean(self, lw_hi, lw_lo):
        # softmax over the two signs at each center
        m = np.maximum(lw_hi, lw_lo)
        w_hi = np.exp(lw_hi - m)
        w_lo = np.exp(lw_lo - m)
        return (w_hi * self.hi + w_lo * self.lo) / (w_hi + w_lo)

    def predict(self, cid: int) -> float:
        return float(
            self._posterior_mean(self.log_w_hi[cid], self.log_w_lo[cid])
        )

    def update(self, cid: int, y: int) -> None:
        if y == 1:
            self.log_w_hi[cid] += math.log(self.hi)
            self.log_w_lo[cid] += math.log(self.lo)
        else:
            self.log_w_hi[cid] += math.log1p(-self.hi)
            self.log_w_lo[cid] += math.log1p(-self.lo)

    def table(self) -> np.ndarray:
        return self._posterior_mean(self.log_w_hi, self.log_w_lo)


def online_to_batch(strategy, dataset, ac: AssouadClass) -> BatchEstimator:
    """Average of the strategy's per-round prediction tables."""
    if len(dataset) == 0:
        return BatchEstimator(np.full(ac.n_centers, 0.5))
    acc = np.zeros(ac.n_centers)
    for cid, y in dataset:
        acc += strategy.table()
        strategy.update(cid, y)
    return BatchEstimator(acc / len(dataset))


def kl_risk(ac: AssouadClass, v, est: BatchEstimator) -> float:
    """(1/N) sum_i KL(f_v(x_i) || est(x_i))."""
    means = ac.values(v)
    if est.table.shape != means.shape:
        raise ValueError("estimator table size must match center count")
    return float(np.mean(kl_bernoulli(means, est.table)))


def lower_bound_value(p: float, n: int):
    """The n^{p/(p+1)}/128 lower bound and the epsilon it uses."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if p <= 0:
        raise ValueError("p must be positive")
    eps = n ** (-1.0 / (p + 1.0)) / 8.0
    return n ** (p / (p + 1.0)) / 128.0, eps


def _sign_class_regret(ac: AssouadClass, strategy, dataset) -> float:
    """Cumulative log loss of the strategy minus the best sign vector's.

    The best competitor decomposes per center: each center independently
    picks whichever of {eps, 4 eps} has smaller total loss there.
    """
    player = 0.0
    ones = np.zeros(ac.n_centers)
    total = np.zeros(ac.n_centers)
    for cid, y in dataset:
        pred = strategy.predict(cid)
        player += log_loss(pred, y)
        strategy.update(cid, y)
        ones[cid] += y
        total[cid] += 1
    zeros = total - ones
    lo, hi = ac.epsilon, 4.0 * ac.epsilon
    loss_lo = -ones * math.log(lo) - zeros * math.log1p(-lo)
    loss_hi = -ones * math.log(hi) - zeros * math.log1p(-hi)
    best = float(np.minimum(loss_lo, loss_hi).sum())
    return player - best


@dataclass
class ScalingResult:
    p: float
    ns: list
    epsilons: list
    regrets: np.ndarray  # (len(ns), n_seeds)
    medians: np.ndarray
    slope: float


def scaling_experiment(
    p: float, n_grid, strategy_factory, seeds, master_seed: int = 0
) -> ScalingResult:
    """Median online regret against the sign class as n grows, with
    epsilon = n^{-1/(p+1)}/8 per cell; returns the log-log slope fit.

    strategy_factory maps an AssouadClass to a fresh strategy.
    """
    dim = int(round(p))
    if abs(dim - p) > 1e-12 or dim < 1:
        raise ValueError("the experiment needs an integer dimension p")
    ns = [int(n) for n in n_grid]
    if len(ns) < 2:
        raise ValueError("need at least two grid points")
    seeds = list(seeds)
    regrets = np.zeros((len(ns), len(seeds)))
    epsilons = []
    for i, n in enumerate(ns):
        eps = n ** (-1.0 / (p + 1.0)) / 8.0
        epsilons.append(eps)
        ac = build_assouad_class(dim, eps)
        for j, seed in enumerate(seeds):
            rng = np.random.default_rng([master_seed, seed, n])
            v = rng.choice([-1, 1], size=ac.n_centers)
            data_seed = int(rng.integers(0, 2**31))
            dataset = sample_dataset(ac, v, n, data_seed)
            strat = strategy_factory(ac)
            regrets[i, j] = _sign_class_regret(ac, strat, dataset)
    medians = np.median(regrets, axis=1)
    if np.any(medians <= 0):
        raise ValueError("nonpositive median regret; cannot fit a slope")
    slope = float(np.polyfit(np.log(ns), np.log(medians), 1)[0])
    return ScalingResult(
        p=p,
        ns=ns,
        epsilons=epsilons,
        regrets=regrets,
        medians=medians,
        slope=slope,
    )
