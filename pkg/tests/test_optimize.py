import random
from collections import Counter

import pytest

from replica_harmony.cost import CostModel
from replica_harmony.errors import Infeasible, SearchSpaceTooLarge
from replica_harmony.model import (
    AllocationVector,
    DataItem,
    Gateway,
    LinkMatrix,
    MiniCloud,
    Topology,
)
from replica_harmony.optimize import (
    FOAParams,
    GAParams,
    Harmony,
    HarmonyMemory,
    OptParams,
    PlacementProblem,
    combine_harmonies,
    exhaustive_best,
    foa_optimize,
    ga_optimize,
    hs_optimize,
    random_allocation,
    random_search,
    roulette_select_pair,
)

from conftest import make_topology


class ScriptedRng(random.Random):
    """random() pops from a fixed script; everything else stays seeded."""

    def __new__(cls, script):
        return super().__new__(cls)

    def __init__(self, script):
        super().__init__(0)
        self.script = list(script)

    def random(self):
        if self.script:
            return self.script.pop(0)
        return super().random()


def make_problem(seed: int, num_clouds: int = 8, replicas: int = 3) -> PlacementProblem:
    rng = random.Random(seed)
    t = make_topology(rng, 5, num_clouds)
    d = DataItem(0, float(rng.randint(20, 100)), rng.randrange(5), replicas)
    return PlacementProblem(t, d, CostModel(t).objective(d))


def tiny_problem() -> PlacementProblem:
    """Two clouds, two replicas: a single-point search space."""
    gateway = Gateway(0, 1.0, 0.1)
    clouds = (MiniCloud(0, 2.0, 1.0, 0.05, 1e6), MiniCloud(1, 2.0, 3.0, 0.02, 1e6))
    links = LinkMatrix([[1000.0, 2000.0]], [[0.0, 500.0], [500.0, 0.0]])
    t = Topology((gateway,), clouds, links)
    d = DataItem(0, 100.0, 0, 2)
    return PlacementProblem(t, d, CostModel(t).objective(d))


def test_placement_problem_feasibility():
    rng = random.Random(1)
    t = make_topology(rng, 2, 4, capacity=(100.0, 100.0))
    big = DataItem(0, 150.0, 0, 1)
    with pytest.raises(Infeasible):
        PlacementProblem(t, big)
    ok = PlacementProblem(t, DataItem(0, 50.0, 0, 2))
    assert ok.feasible_clouds == (0, 1, 2, 3)


def test_placement_problem_excludes_full_clouds():
    rng = random.Random(2)
    t = make_topology(rng, 2, 4, capacity=(100.0, 100.0))
    import dataclasses

    crowded = dataclasses.replace(
        t, clouds=(dataclasses.replace(t.clouds[0], used_capacity=90.0),) + t.clouds[1:]
    )
    problem = PlacementProblem(crowded, DataItem(0, 50.0, 0, 2))
    assert problem.feasible_clouds == (1, 2, 3)


def test_random_allocation_contract():
    problem = make_problem(0)
    rng = random.Random(0)
    for _ in range(200):
        vec = random_allocation(problem, rng)
        assert len(vec) == 3
        assert len(set(vec)) == 3
        assert all(0 <= c < 8 for c in vec)


def test_random_allocation_full_set_when_r_equals_n():
    problem = make_problem(3, num_clouds=5, replicas=5)
    vec = random_allocation(problem, random.Random(1))
    assert sorted(vec) == [0, 1, 2, 3, 4]


def test_random_allocation_is_uniform_over_subsets():
    problem = make_problem(4, num_clouds=4, replicas=2)
    rng = random.Random(99)
    counts = Counter()
    draws = 10_000
    for _ in range(draws):
        counts[tuple(sorted(random_allocation(problem, rng)))] += 1
    assert len(counts) == 6
    for subset, count in counts.items():
        assert abs(count / draws - 1 / 6) <= 0.02, subset


def test_roulette_first_draw_distribution():
    memory = HarmonyMemory(
        [Harmony(AllocationVector((i,)), float(i)) for i in range(3)]
    )
    rng = random.Random(5)
    counts = Counter()
    draws = 30_000
    for _ in range(draws):
        first, second = roulette_select_pair(memory, rng)
        assert first != second
        counts[first] += 1
    # rank weights 3,2,1 over 6
    assert abs(counts[0] / draws - 1 / 2) <= 0.02
    assert abs(counts[1] / draws - 1 / 3) <= 0.02
    assert abs(counts[2] / draws - 1 / 6) <= 0.02


def test_roulette_is_rank_based_on_equal_costs():
    memory = HarmonyMemory([Harmony(AllocationVector((i,)), 1.0) for i in range(3)])
    rng = random.Random(6)
    counts = Counter()
    draws = 30_000
    for _ in range(draws):
        counts[roulette_select_pair(memory, rng)[0]] += 1
    assert abs(counts[0] / draws - 1 / 2) <= 0.02


def test_combine_identical_parents_returns_parent():
    parent = Harmony(AllocationVector((1, 2, 3)), 0.0)
    child = combine_harmonies(parent, parent, (0, 1, 2, 3, 4), random.Random(0))
    assert child.clouds == (1, 2, 3)


def test_combine_with_scripted_coins():
    a = Harmony(AllocationVector((1, 2, 3)), 0.0)
    b = Harmony(AllocationVector((4, 5, 6)), 0.0)
    # < 0.5 takes parent a's cell, otherwise parent b's
    rng = ScriptedRng([0.1, 0.9, 0.1])
    child = combine_harmonies(a, b, (1, 2, 3, 4, 5, 6), rng)
    assert child.clouds == (1, 5, 3)


def test_combine_repairs_duplicates():
    a = Harmony(AllocationVector((1, 2)), 0.0)
    b = Harmony(AllocationVector((2, 1)), 0.0)
    feasible = (0, 1, 2, 3)
    for seed in range(50):
        rng = ScriptedRng([0.1, 0.9])  # raw child (1, 1)
        rng.seed(seed)
        rng.script = [0.1, 0.9]
        child = combine_harmonies(a, b, feasible, rng)
        assert child.clouds[0] == 1
        assert child.clouds[1] in {0, 2, 3}


def test_combine_always_duplicate_free():
    problem = make_problem(7)
    rng = random.Random(7)
    for _ in range(300):
        a = Harmony(random_allocation(problem, rng), 0.0)
        b = Harmony(random_allocation(problem, rng), 0.0)
        child = combine_harmonies(a, b, problem.feasible_clouds, rng)
        assert len(set(child.clouds)) == len(child.clouds) == 3


def test_harmony_memory_sorted_after_replacements():
    rng = random.Random(8)
    memory = HarmonyMemory(
        [Harmony(AllocationVector((i,)), rng.uniform(0, 10)) for i in range(10)]
    )
    assert memory.is_sorted()
    for i in range(50):
        before = sorted(h.cost for h in memory.harmonies)
        new = Harmony(AllocationVector((i + 10,)), rng.uniform(0, 10))
        if new.cost < memory.worst.cost:
            memory.replace_worst(new)
            after = sorted(h.cost for h in memory.harmonies)
            # the multiset changed by exactly one element
            assert len(set_diff(before, after)) == 1
        assert memory.is_sorted()


def set_diff(before, after):
    remaining = list(after)
    for value in before:
        if value in remaining:
            remaining.remove(value)
    return remaining


def test_opt_params_validation():
    with pytest.raises(ValueError):
        OptParams(memory_size_hms=1)
    with pytest.raises(ValueError):
        OptParams(exercises=0)
    with pytest.raises(ValueError):
        OptParams(exercises_range=(0, 5))


def test_hs_single_point_space():
    problem = tiny_problem()
    result = hs_optimize(problem, OptParams(exercises=50, seed=3))
    assert sorted(result.best.clouds) == [0, 1]
    assert result.best_cost == 1.05


def test_hs_trace_and_determinism():
    problem = make_problem(9)
    params = OptParams(exercises=40, seed=17)
    first = hs_optimize(problem, params)
    second = hs_optimize(problem, params)
    assert first == second
    assert len(first.trace) == 40
    assert first.evaluations == 10 + 40
    assert first.best_cost == first.trace[-1]
    assert all(a >= b for a, b in zip(first.trace, first.trace[1:]))
    assert first.best_cost == problem.objective(first.best)


def test_hs_draws_exercises_from_range_when_unset():
    problem = make_problem(10)
    for seed in range(20):
        result = hs_optimize(problem, OptParams(seed=seed))
        assert 5 <= len(result.trace) <= 10
        assert result.evaluations == 10 + len(result.trace)


def test_random_search_contract():
    problem = make_problem(11)
    rng = random.Random(0)
    single = random_search(problem, 1, rng)
    assert len(single.trace) == 1
    assert single.best_cost == single.trace[0]

    result = random_search(problem, 80, random.Random(1))
    assert all(a >= b for a, b in zip(result.trace, result.trace[1:]))
    assert result.evaluations == 80
    with pytest.raises(ValueError):
        random_search(problem, 0, rng)


def test_random_search_finds_small_optimum():
    # 6 subsets, 100 draws: miss probability (5/6)^100 ~ 1.2e-8
    for seed in range(5):
        problem = make_problem(12 + seed, num_clouds=4, replicas=2)
        best = exhaustive_best(problem)
        found = random_search(problem, 100, random.Random(seed))
        assert found.best_cost == best.best_cost


def test_ga_single_point_space():
    result = ga_optimize(tiny_problem(), GAParams(seed=1, budget=40))
    assert sorted(result.best.clouds) == [0, 1]


def test_ga_budget_and_trace():
    problem = make_problem(13)
    result = ga_optimize(problem, GAParams(seed=2, budget=560))
    assert result.evaluations <= 560
    assert all(a >= b for a, b in zip(result.trace, result.trace[1:]))
    assert result.best_cost == problem.objective(result.best)
    assert ga_optimize(problem, GAParams(seed=2, budget=560)) == result


def test_ga_without_variation_keeps_best_constant():
    problem = make_problem(14)
    result = ga_optimize(
        problem, GAParams(crossover_rate=0.0, mutation_rate=0.0, seed=3, budget=200)
    )
    assert all(value == result.trace[0] for value in result.trace)


def test_ga_majority_optimal_at_matched_budget():
    hits = 0
    for seed in range(100):
        problem = make_problem(20_000 + seed)
        best = exhaustive_best(problem)
        got = ga_optimize(problem, GAParams(seed=seed, budget=560))
        assert got.best_cost >= best.best_cost
        hits += got.best_cost == best.best_cost
    assert hits > 50


def test_foa_single_point_space():
    result = foa_optimize(tiny_problem(), FOAParams(seed=1, budget=40))
    assert sorted(result.best.clouds) == [0, 1]


def test_foa_budget_trace_determinism():
    problem = make_problem(15)
    params = FOAParams(seed=4, budget=560)
    result = foa_optimize(problem, params)
    assert result.evaluations <= 560
    assert all(a >= b for a, b in zip(result.trace, result.trace[1:]))
    assert foa_optimize(problem, params) == result
    assert result.best_cost == problem.objective(result.best)


def test_foa_majority_optimal_at_matched_budget():
    hits = 0
    for seed in range(100):
        problem = make_problem(30_000 + seed)
        best = exhaustive_best(problem)
        got = foa_optimize(problem, FOAParams(seed=seed, budget=560))
        assert got.best_cost >= best.best_cost
        hits += got.best_cost == best.best_cost
    assert hits > 50


def test_exhaustive_counts_subsets():
    problem = make_problem(16, num_clouds=4, replicas=2)
    result = exhaustive_best(problem)
    assert result.evaluations == 6
    assert len(result.trace) == 6


def test_exhaustive_limit():
    problem = make_problem(17, num_clouds=8, replicas=3)
    with pytest.raises(SearchSpaceTooLarge):
        exhaustive_best(problem, limit=55)


def test_exhaustive_tie_break_is_lexicographic():
    # fully symmetric topology: every subset costs the same
    gateways = (Gateway(0, 10.0, 0.5),)
    clouds = tuple(MiniCloud(c, 10.0, 10.0, 0.5, 1e6) for c in range(5))
    links = LinkMatrix(
        [[1000.0] * 5],
        [[0.0 if a == b else 1000.0 for b in range(5)] for a in range(5)],
    )
    t = Topology(gateways, clouds, links)
    d = DataItem(0, 40.0, 0, 2)
    result = exhaustive_best(PlacementProblem(t, d, CostModel(t).objective(d)))
    assert result.best.clouds == (0, 1)


def test_exhaustive_dominates_every_optimizer():
    for seed in range(20):
        problem = make_problem(40_000 + seed)
        floor = exhaustive_best(problem).best_cost
        assert hs_optimize(problem, OptParams(exercises=20, seed=seed)).best_cost >= floor
        assert random_search(problem, 30, random.Random(seed)).best_cost >= floor
        assert ga_optimize(problem, GAParams(seed=seed, budget=30)).best_cost >= floor
        assert foa_optimize(problem, FOAParams(seed=seed, budget=30)).best_cost >= floor
