import itertools
import math

import numpy as np
import pytest

from logloss_lab.core import BinaryTree, ExpertClass
from logloss_lab.game import (
    BayesMixture,
    ConstantStrategy,
    DualStrategy,
    FixedSequence,
    GameInstance,
    MaximinSearch,
    MinimaxOptimal,
    PreviousOutcomes,
    StaticContexts,
    StochasticAdversary,
    dual_value,
    exact_minimax,
    optimal_prediction,
    random_dual_strategy,
    run_strategy,
    worst_case_search,
)


def shtarkov_oracle(ec, context_assignment, n):
    """log sum over paths of the best expert's likelihood for a fixed
    context tree given as a flat node -> context list."""
    total = 0.0
    for y in range(1 << n):
        best = 0.0
        for i in range(ec.n_experts):
            lik = 1.0
            for t in range(1, n + 1):
                x = context_assignment[(1 << (t - 1)) - 1 + (y & ((1 << (t - 1)) - 1))]
                f = ec.value(i, x)
                lik *= f if (y >> (t - 1)) & 1 else 1.0 - f
            best = max(best, lik)
        total += best
    return math.log(total)


def brute_force_minimax(ec, n):
    """Max over all context trees of the path-sum value."""
    n_nodes = (1 << n) - 1
    best = -math.inf
    for assign in itertools.product(ec.contexts, repeat=n_nodes):
        best = max(best, shtarkov_oracle(ec, assign, n))
    return best


def test_single_context_shtarkov():
    ec = ExpertClass.constants([0.3, 0.7])
    g = GameInstance(horizon=3, expert_class=ec)
    val = exact_minimax(g)
    oracle = shtarkov_oracle(ec, [0] * 7, 3)
    assert val == pytest.approx(oracle, abs=1e-12)


def test_zero_one_experts():
    # experts {0, 1}: only the two constant paths get likelihood 1
    ec = ExpertClass.constants([0.0, 1.0])
    for n in (1, 2, 4):
        g = GameInstance(horizon=n, expert_class=ec)
        assert exact_minimax(g) == pytest.approx(math.log(2), abs=1e-12)


def test_singleton_class_no_regret():
    ec = ExpertClass.constants([0.42])
    g = GameInstance(horizon=4, expert_class=ec)
    assert exact_minimax(g) == pytest.approx(0.0, abs=1e-12)


def test_minimax_matches_context_tree_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(10):
        n_ctx = int(rng.integers(1, 4))
        n_exp = int(rng.integers(1, 5))
        n = int(rng.integers(1, 4))
        ec = ExpertClass(
            contexts=list(range(n_ctx)),
            experts=rng.uniform(size=(n_exp, n_ctx)),
        )
        g = GameInstance(horizon=n, expert_class=ec)
        assert exact_minimax(g) == pytest.approx(
            brute_force_minimax(ec, n), abs=1e-9
        )


def test_optimal_prediction_is_a_probability():
    ec = ExpertClass(
        contexts=["a", "b"], experts=[[0.2, 0.6], [0.8, 0.4], [0.5, 0.5]]
    )
    g = GameInstance(horizon=3, expert_class=ec)
    p = optimal_prediction(g, (), "a")
    assert 0.0 <= p <= 1.0
    p2 = optimal_prediction(g, (("a", 1),), "b")
    assert 0.0 <= p2 <= 1.0
    with pytest.raises(ValueError):
        optimal_prediction(g, (("a", 1),) * 3, "a")


def test_dual_never_exceeds_primal():
    rng = np.random.default_rng(5)
    ec = ExpertClass(
        contexts=[0, 1], experts=rng.uniform(size=(4, 2))
    )
    g = GameInstance(horizon=3, expert_class=ec)
    primal = exact_minimax(g)
    for _ in range(50):
        s = random_dual_strategy(g, rng)
        assert dual_value(g, s) <= primal + 1e-9


def test_dual_depth_mismatch():
    ec = ExpertClass.constants([0.5])
    g = GameInstance(horizon=3, expert_class=ec)
    s = DualStrategy(
        context_tree=BinaryTree(2, values=np.zeros(3, dtype=object)),
        prob_tree=BinaryTree(2, fill=0.5),
    )
    with pytest.raises(ValueError):
        dual_value(g, s)


def test_dual_zero_prob_branches():
    # deterministic adversary: all mass on the all-ones path
    ec = ExpertClass.constants([0.25, 0.75])
    g = GameInstance(horizon=2, expert_class=ec)
    s = DualStrategy(
        context_tree=BinaryTree(2, values=np.zeros(3, dtype=object)),
        prob_tree=BinaryTree(2, fill=1.0),
    )
    # player matches p = 1 and pays 0; best expert pays 2*log(4/3)
    expected = 0.0 - 2 * math.log(1 / 0.75)
    assert dual_value(g, s) == pytest.approx(expected, abs=1e-12)


def test_minimax_strategy_achieves_value():
    ec = ExpertClass(
        contexts=[0, 1], experts=[[0.3, 0.6], [0.7, 0.2]]
    )
    g = GameInstance(horizon=3, expert_class=ec)
    value = exact_minimax(g)
    strat = MinimaxOptimal(g)
    _, worst_regret = worst_case_search(g, strat)
    assert worst_regret == pytest.approx(value, abs=1e-9)


def test_bayes_mixture_regret_bound():
    rng = np.random.default_rng(7)
    ec = ExpertClass(
        contexts=[0, 1, 2], experts=rng.uniform(0.05, 0.95, size=(5, 3))
    )
    g = GameInstance(horizon=4, expert_class=ec)
    strat = BayesMixture(ec)
    bound = math.log(ec.n_experts)
    for _ in range(50):
        contexts = rng.integers(0, 3, size=4).tolist()
        outcomes = rng.integers(0, 2, size=4).tolist()
        trace = run_strategy(g, strat, FixedSequence(contexts, outcomes))
        assert trace.regret <= bound + 1e-9
        assert trace.recompute_regret(ec) == pytest.approx(
            trace.regret, abs=1e-9
        )


def test_bayes_worst_case_also_bounded():
    ec = ExpertClass.constants([0.1, 0.5, 0.9])
    g = GameInstance(horizon=5, expert_class=ec)
    _, worst = worst_case_search(g, BayesMixture(ec))
    assert worst <= math.log(3) + 1e-9
    trace = run_strategy(g, BayesMixture(ec), MaximinSearch())
    assert trace.regret == pytest.approx(worst, abs=1e-9)


def test_constant_strategy_and_stochastic_adversary():
    ec = ExpertClass.constants([0.2, 0.8])
    g = GameInstance(horizon=3, expert_class=ec)
    adv = StochasticAdversary(
        context_tree=BinaryTree(3, values=np.zeros(7, dtype=object)),
        prob_tree=BinaryTree(3, fill=0.5),
        seed=1,
    )
    trace = run_strategy(g, ConstantStrategy(0.5), adv)
    assert trace.player_loss == pytest.approx(3 * math.log(2), abs=1e-12)
    assert trace.regret >= 0.0 or trace.best_expert_loss > trace.player_loss


def test_previous_outcomes_rule():
    # experts keyed by the outcome history; markov-style availability
    contexts = [()]
    for n in (1, 2):
        contexts += [t for t in itertools.product((0, 1), repeat=n)]
    rng = np.random.default_rng(0)
    ec = ExpertClass(
        contexts=contexts, experts=rng.uniform(size=(3, len(contexts)))
    )
    g = GameInstance(
        horizon=3, expert_class=ec, availability=PreviousOutcomes()
    )
    val = exact_minimax(g)
    assert math.isfinite(val)
    assert val <= math.log(3) + 1e-9  # one context per round: Shtarkov <= log|F|
    p = optimal_prediction(g, (), ())
    assert 0.0 <= p <= 1.0


def test_instance_guards():
    ec = ExpertClass.constants(np.linspace(0.1, 0.9, 5))
    with pytest.raises(ValueError):
        GameInstance(horizon=0, expert_class=ec)
    big = GameInstance(horizon=30, expert_class=ec)
    with pytest.raises(ValueError):
        exact_minimax(big)
    with pytest.raises(ValueError):
        StaticContexts(())


def test_worst_case_search_tiebreak_deterministic():
    ec = ExpertClass.constants([0.5])
    g = GameInstance(horizon=2, expert_class=ec)
    seq1, r1 = worst_case_search(g, ConstantStrategy(0.5))
    seq2, r2 = worst_case_search(g, ConstantStrategy(0.5))
    assert seq1 == seq2
    assert r1 == r2
