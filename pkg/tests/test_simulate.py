"""Monte Carlo cross-checks: determinism, worker invariance, 4-sigma accuracy."""

import math

import pytest

from coincomp import composer, game_tree, simulate, walk
from coincomp.cheat_model import CheatModel, PRIME


def within_4se(report, key, exact):
    return abs(report.estimates[key] - exact) <= 4.0 * report.stderr[key]


class TestTree:
    def test_counts_partition_trials(self, bo3):
        m = CheatModel(1.0, 2.0)
        res = composer.leading_order(bo3, 1.0, 2.0, 0.2)
        r = simulate.simulate_tree(bo3, m, res.strategy, 40_000, 3)
        assert r.wins + r.losses + r.catches == r.trials == 40_000
        assert r.overruns == 0

    def test_single_trial(self, bo3):
        m = CheatModel(1.0, 2.0)
        strategy = {p: 0.0 for p, _ in game_tree.annotate(bo3).internal()}
        r = simulate.simulate_tree(bo3, m, strategy, 1, 42)
        assert r.wins + r.losses + r.catches == 1

    def test_honest_one_flip_near_half(self):
        tree = game_tree.gen_full(1, [0, 1])
        r = simulate.simulate_tree(tree, CheatModel(1.0, 2.0), {"": 0.0},
                                   200_000, 42)
        assert r.catches == 0
        assert within_4se(r, "win", 0.5)

    def test_estimates_match_exact_recursion(self, bo3):
        m = CheatModel(1.0, 2.0)
        res = composer.leading_order(bo3, 1.0, 2.0, 0.1)
        exact = composer.exact_outcome(bo3, m, res.strategy)
        r = simulate.simulate_tree(bo3, m, res.strategy, 200_000, 42)
        assert within_4se(r, "win", exact.p0)
        assert within_4se(r, "loss", exact.p1)
        assert within_4se(r, "catch", exact.pc)

    def test_deterministic_in_seed(self, bo3):
        m = CheatModel(1.0, 2.0)
        res = composer.leading_order(bo3, 1.0, 2.0, 0.1)
        a = simulate.simulate_tree(bo3, m, res.strategy, 70_000, 9)
        b = simulate.simulate_tree(bo3, m, res.strategy, 70_000, 9)
        c = simulate.simulate_tree(bo3, m, res.strategy, 70_000, 10)
        assert a == b
        assert a != c

    def test_worker_count_invisible(self, bo3):
        # spans a few scheduling blocks so the parallel path is exercised
        m = CheatModel(1.0, 2.0)
        res = composer.leading_order(bo3, 1.0, 2.0, 0.1)
        reports = [simulate.simulate_tree(bo3, m, res.strategy, 150_000, 42,
                                          workers=w) for w in (1, 3, 8)]
        assert reports[0] == reports[1] == reports[2]

    def test_pure_catch_strategy(self):
        # eps at the domain edge of a=4,b=2 is caught with certainty
        tree = game_tree.gen_full(1, [0, 1])
        r = simulate.simulate_tree(tree, CheatModel(4.0, 2.0), {"": 0.5},
                                   1_000, 0)
        assert r.catches == 1_000

    def test_strategy_must_cover_internal_nodes(self, bo3):
        with pytest.raises(ValueError, match="missing"):
            simulate.simulate_tree(bo3, CheatModel(1.0, 2.0), {"": 0.0},
                                   10, 1)

    def test_trials_validated(self):
        tree = game_tree.gen_full(1, [0, 1])
        with pytest.raises(ValueError):
            simulate.simulate_tree(tree, CheatModel(1.0, 2.0), {"": 0.0},
                                   0, 1)

    def test_report_shape(self, bo3):
        m = CheatModel(1.0, 2.0)
        strategy = {p: 0.0 for p, _ in game_tree.annotate(bo3).internal()}
        r = simulate.simulate_tree(bo3, m, strategy, 100, 17)
        d = r.to_json_dict()
        assert set(d) == {"trials", "wins", "losses", "catches", "overruns",
                          "estimates", "stderr", "seed"}
        assert set(d["estimates"]) == {"win", "loss", "catch"}
        for key, p in d["estimates"].items():
            assert d["stderr"][key] == math.sqrt(p * (1.0 - p) / 100)
        assert d["seed"] == 17


class TestWalk:
    def test_honest_near_half(self):
        g = walk.WalkGame(5, CheatModel(1.0, 1.0, PRIME))
        r = simulate.simulate_walk(g, walk.honest_policy(g), 200_000, 42)
        assert within_4se(r, "win", 0.5)
        assert r.catches == 0
        assert r.overruns == 0

    def test_catch_continuation_matches_folded_value(self):
        # evaluate_policy folds a catch into the terminal ramp payoff; the
        # simulator instead keeps flipping a fair coin after the catch.
        # Both must agree.
        g = walk.WalkGame(1, CheatModel(1.0, 1.0, PRIME))
        policy = {0: 0.25}
        exact = walk.evaluate_policy(g, policy).w[0]
        assert exact == 0.875
        r = simulate.simulate_walk(g, policy, 200_000, 42)
        assert r.catches > 0
        assert r.wins + r.losses == r.trials
        assert within_4se(r, "win", exact)

    def test_optimal_policy_agrees_with_solver(self):
        g = walk.WalkGame(10, CheatModel(1.0, 1.0, PRIME))
        sol = walk.optimize(g)
        r = simulate.simulate_walk(g, sol.policy, 200_000, 42)
        assert within_4se(r, "win", sol.bias + 0.5)

    def test_overruns_settled_not_dropped(self):
        # a tight step cap leaves some honest walks unabsorbed; they settle
        # by one fair draw at the ramp value and still count
        g = walk.WalkGame(20, CheatModel(1.0, 1.0, PRIME))
        r = simulate.simulate_walk(g, walk.honest_policy(g), 100_000, 5,
                                   step_cap=1600)
        assert r.overruns == 901
        assert r.wins + r.losses == r.trials
        assert within_4se(r, "win", 0.5)

    def test_step_cap_floor_enforced(self):
        g = walk.WalkGame(5, CheatModel(1.0, 1.0, PRIME))
        with pytest.raises(ValueError):
            simulate.simulate_walk(g, walk.honest_policy(g), 100, 1,
                                   step_cap=99)

    def test_policy_validated_before_running(self):
        g = walk.WalkGame(3, CheatModel(1.0, 1.0, PRIME))
        with pytest.raises(ValueError):
            simulate.simulate_walk(g, {0: 0.0}, 100, 1)

    def test_worker_count_invisible(self):
        g = walk.WalkGame(5, CheatModel(1.0, 1.0, PRIME))
        pol = walk.optimize(g).policy
        reports = [simulate.simulate_walk(g, pol, 150_000, 42, workers=w)
                   for w in (1, 3, 8)]
        assert reports[0] == reports[1] == reports[2]

    def test_deterministic_in_seed(self):
        g = walk.WalkGame(3, CheatModel(1.0, 1.0, PRIME))
        pol = walk.honest_policy(g)
        assert simulate.simulate_walk(g, pol, 50_000, 1) == \
            simulate.simulate_walk(g, pol, 50_000, 1)
        assert simulate.simulate_walk(g, pol, 50_000, 1) != \
            simulate.simulate_walk(g, pol, 50_000, 2)

    def test_std_variant_accepted(self):
        g = walk.WalkGame(2, CheatModel(1.0, 1.0))
        sol = walk.optimize(g)
        r = simulate.simulate_walk(g, sol.policy, 200_000, 8)
        assert within_4se(r, "win", sol.bias + 0.5)
