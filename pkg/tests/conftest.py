"""Shared tree fixtures.

FAIR_SUITE collects fair trees (P_W(root) = 1/2) of varied shape; the small
subset keeps brute-force enumeration affordable (at most 5 internal nodes).
"""

import pytest

from coincomp import game_tree


def _fair_suite():
    trees = {
        "one_flip": game_tree.gen_full(1, [0, 1]),
        "best_of_3": game_tree.gen_best_of(3),
        "best_of_5": game_tree.gen_best_of(5),
        "best_of_7": game_tree.gen_best_of(7),
        "full2_a": game_tree.gen_full(2, [0, 1, 1, 0]),
        "full2_b": game_tree.gen_full(2, [0, 0, 1, 1]),
        "full3": game_tree.gen_full(3, [0, 1, 1, 0, 1, 0, 0, 1]),
        "full4": game_tree.gen_full(4, [0, 1] * 8),
    }
    for seed in range(20):
        trees[f"random_fair_{seed}"] = game_tree.gen_random_fair(6, seed)
    return trees


FAIR_SUITE = _fair_suite()

SMALL_SUITE = {name: FAIR_SUITE[name]
               for name in ("one_flip", "best_of_3", "full2_a", "full2_b")}


@pytest.fixture(params=sorted(FAIR_SUITE), ids=sorted(FAIR_SUITE))
def fair_tree(request):
    return FAIR_SUITE[request.param]


@pytest.fixture(params=sorted(SMALL_SUITE), ids=sorted(SMALL_SUITE))
def small_tree(request):
    return SMALL_SUITE[request.param]


@pytest.fixture
def bo3():
    return game_tree.gen_best_of(3)
