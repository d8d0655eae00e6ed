"""Allocation optimizers: harmony search plus comparison baselines.

All optimizers minimize the same objective (replication cost of one datum)
over duplicate-free cloud-id vectors of fixed length r, drawn from the
clouds with enough free capacity. Each run owns a single random stream, so
results are reproducible bit-for-bit from the seed.

The harmony search follows the concrete procedure: fill a cost-sorted
memory with random vectors, then per exercise pick two harmonies by
rank-weighted roulette, combine them position-wise with duplicate repair,
and replace the current worst harmony when the child is strictly better.
The canonical memory-consideration/pitch-adjustment formulation is not
used here.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

from .errors import Infeasible, SearchSpaceTooLarge
from .model import AllocationVector, DataItem, Topology


class PlacementProblem:
    """One datum against the current topology state.

    feasible_clouds holds the ids with free capacity for the datum, in
    ascending order. Construction fails with Infeasible when fewer than
    replica_count clouds qualify.
    """

    def __init__(
        self,
        topology: Topology,
        datum: DataItem,
        objective: Callable[[AllocationVector], float] | None = None,
    ):
        self.topology = topology
        self.datum = datum
        self.feasible_clouds: tuple[int, ...] = tuple(
            c.id for c in topology.clouds if c.free_capacity >= datum.size
        )
        if datum.replica_count > len(self.feasible_clouds):
            raise Infeasible(
                f"datum {datum.id} needs {datum.replica_count} replicas but only "
                f"{len(self.feasible_clouds)} clouds have {datum.size} bytes free"
            )
        if objective is None:
            from .cost import CostModel

            objective = CostModel(topology).objective(datum)
        self.objective = objective

    @property
    def replica_count(self) -> int:
        return self.datum.replica_count


@dataclass(frozen=True)
class Harmony:
    vector: AllocationVector
    cost: float


class HarmonyMemory:
    """Fixed-capacity pool of harmonies kept sorted ascending by cost."""

    def __init__(self, harmonies: Sequence[Harmony]):
        self.harmonies = sorted(harmonies, key=lambda h: h.cost)

    def __len__(self) -> int:
        return len(self.harmonies)

    @property
    def best(self) -> Harmony:
        return self.harmonies[0]

    @property
    def worst(self) -> Harmony:
        return self.harmonies[-1]

    def replace_worst(self, h: Harmony) -> None:
        self.harmonies[-1] = h
        self.harmonies.sort(key=lambda x: x.cost)

    def is_sorted(self) -> bool:
        costs = [h.cost for h in self.harmonies]
        return all(a <= b for a, b in zip(costs, costs[1:]))


@dataclass(frozen=True)
class OptParams:
    """Harmony-search knobs.

    exercises=None draws the budget uniformly from exercises_range at the
    start of the run, which mirrors the 5..10 iteration setting of the
    experiments; pass an explicit count to override.
    """

    memory_size_hms: int = 10
    exercises: int | None = None
    exercises_range: tuple[int, int] = (5, 10)
    seed: int = 0

    def __post_init__(self):
        if self.memory_size_hms < 2:
            raise ValueError("memory size must be >= 2")
        if self.exercises is not None and self.exercises < 1:
            raise ValueError("exercises must be >= 1")
        lo, hi = self.exercises_range
        if not (1 <= lo <= hi):
            raise ValueError(f"bad exercises range [{lo}, {hi}]")


@dataclass(frozen=True)
class OptResult:
    best: AllocationVector
    best_cost: float
    trace: tuple[float, ...]
    evaluations: int


def random_allocation(problem: PlacementProblem, rng: random.Random) -> AllocationVector:
    """Sample r distinct feasible cloud ids uniformly."""
    r = problem.replica_count
    if r > len(problem.feasible_clouds):
        raise Infeasible(f"only {len(problem.feasible_clouds)} feasible clouds for r={r}")
    return AllocationVector(tuple(rng.sample(problem.feasible_clouds, r)))


def roulette_select_pair(memory: HarmonyMemory, rng: random.Random) -> tuple[int, int]:
    """Two distinct indices; sorted rank k gets weight (size - k + 1)."""
    m = len(memory)
    if m < 2:
        raise ValueError("need at least two harmonies to select a pair")
    weights = list(range(m, 0, -1))
    first = _roulette_draw(weights, rng)
    weights[first] = 0
    second = _roulette_draw(weights, rng)
    return first, second


def _roulette_draw(weights: Sequence[int], rng: random.Random) -> int:
    total = sum(weights)
    x = rng.random() * total
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if x < acc:
            return i
    return max(i for i, w in enumerate(weights) if w > 0)


def combine_harmonies(
    a: Harmony,
    b: Harmony,
    feasible: Sequence[int],
    rng: random.Random,
) -> AllocationVector:
    """Position-wise coin flip between the parents, then duplicate repair."""
    if len(a.vector) != len(b.vector):
        raise ValueError("parent vectors must have equal length")
    raw = tuple(
        x if rng.random() < 0.5 else y for x, y in zip(a.vector.clouds, b.vector.clouds)
    )
    return AllocationVector(_repair_duplicates(raw, feasible, rng))


def _repair_duplicates(
    values: Sequence[int], feasible: Sequence[int], rng: random.Random
) -> tuple[int, ...]:
    """Left-to-right scan: a value already seen is replaced by a random
    unused feasible cloud."""
    seen: set[int] = set()
    out = []
    for v in values:
        if v in seen:
            unused = [c for c in feasible if c not in seen]
            if not unused:
                raise Infeasible("duplicate repair ran out of feasible clouds")
            v = rng.choice(unused)
        seen.add(v)
        out.append(v)
    return tuple(out)


def _mutate_one_position(
    vector: tuple[int, ...], feasible: Sequence[int], rng: random.Random
) -> tuple[int, ...]:
    """Replace one random position with a random unused feasible cloud.

    Returns the vector unchanged when every feasible cloud is already used
    (r equal to the feasible count leaves no move).
    """
    used = set(vector)
    unused = [c for c in feasible if c not in used]
    if not unused:
        return tuple(vector)
    pos = rng.randrange(len(vector))
    out = list(vector)
    out[pos] = rng.choice(unused)
    return tuple(out)


def hs_optimize(problem: PlacementProblem, params: OptParams = OptParams()) -> OptResult:
    rng = random.Random(params.seed)
    exercises = params.exercises
    if exercises is None:
        exercises = rng.randint(*params.exercises_range)

    memory = HarmonyMemory(
        [
            _evaluated(problem, random_allocation(problem, rng))
            for _ in range(params.memory_size_hms)
        ]
    )
    evaluations = params.memory_size_hms

    trace = []
    for _ in range(exercises):
        i, j = roulette_select_pair(memory, rng)
        child = combine_harmonies(
            memory.harmonies[i], memory.harmonies[j], problem.feasible_clouds, rng
        )
        # A child already present in the memory explores nothing, and once the
        # memory fills with copies of one harmony every child would be such a
        # repeat and the search would stall; spend the exercise on a fresh
        # random vector instead (the random-selection rule).
        if any(m.vector.clouds == child.clouds for m in memory.harmonies):
            child = random_allocation(problem, rng)
        harmony = _evaluated(problem, child)
        evaluations += 1
        if harmony.cost < memory.worst.cost:
            memory.replace_worst(harmony)
        trace.append(memory.best.cost)

    best = memory.best
    return OptResult(best.vector, best.cost, tuple(trace), evaluations)


def _evaluated(problem: PlacementProblem, vector: AllocationVector) -> Harmony:
    return Harmony(vector, problem.objective(vector))


def random_search(problem: PlacementProblem, budget: int, rng: random.Random) -> OptResult:
    """Uniform independent samples; returns the running minimum."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    best: Harmony | None = None
    trace = []
    for _ in range(budget):
        h = _evaluated(problem, random_allocation(problem, rng))
        if best is None or h.cost < best.cost:
            best = h
        trace.append(best.cost)
    return OptResult(best.vector, best.cost, tuple(trace), budget)


@dataclass(frozen=True)
class GAParams:
    """Stand-in configuration; the source experiments never state one."""

    population: int = 20
    generations: int | None = None  # derived from budget when None
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    seed: int = 0
    budget: int | None = None  # evaluation cap, matches HS when set


def ga_optimize(problem: PlacementProblem, params: GAParams = GAParams()) -> OptResult:
    rng = random.Random(params.seed)
    r = problem.replica_count
    feasible = problem.feasible_clouds

    pop_size = params.population
    if params.budget is not None:
        pop_size = max(2, min(pop_size, params.budget))
    generations = params.generations
    if generations is None:
        if params.budget is not None:
            generations = max(0, (params.budget - pop_size) // (pop_size - 1))
        else:
            generations = 25

    population = sorted(
        (_evaluated(problem, random_allocation(problem, rng)) for _ in range(pop_size)),
        key=lambda h: h.cost,
    )
    evaluations = pop_size
    best = population[0]
    trace = [best.cost]

    for _ in range(generations):
        next_gen = [best]  # elite carried over, not re-evaluated
        while len(next_gen) < pop_size:
            p1 = _tournament(population, rng)
            p2 = _tournament(population, rng)
            if r >= 2 and rng.random() < params.crossover_rate:
                point = rng.randint(1, r - 1)
                raw = p1.vector.clouds[:point] + p2.vector.clouds[point:]
                child = _repair_duplicates(raw, feasible, rng)
            else:
                child = p1.vector.clouds
            if rng.random() < params.mutation_rate:
                child = _mutate_one_position(child, feasible, rng)
            h = _evaluated(problem, AllocationVector(child))
            evaluations += 1
            next_gen.append(h)
        population = sorted(next_gen, key=lambda h: h.cost)
        best = population[0]
        trace.append(best.cost)

    return OptResult(best.vector, best.cost, tuple(trace), evaluations)


def _tournament(population: Sequence[Harmony], rng: random.Random) -> Harmony:
    i = rng.randrange(len(population))
    j = rng.randrange(len(population))
    return population[i] if population[i].cost <= population[j].cost else population[j]


@dataclass(frozen=True)
class FOAParams:
    """Stand-in configuration; the source experiments never state one."""

    area_limit: int = 30
    life_time: int = 6
    local_seeding: int = 2
    global_fraction: float = 0.1
    seed: int = 0
    budget: int | None = None  # evaluation cap, matches HS when set


@dataclass
class _Tree:
    harmony: Harmony
    age: int = 0


def foa_optimize(problem: PlacementProblem, params: FOAParams = FOAParams()) -> OptResult:
    """Simplified forest optimization on allocation vectors.

    New trees (age 0) spawn local_seeding one-position neighbors per
    iteration; everything ages, over-age trees fall into a candidate pool,
    the worst beyond area_limit follow them, and a fraction of the pool
    re-enters as fresh random trees. The best tree's age is pinned to 0 so
    the forest always keeps one seeding tree.
    """
    rng = random.Random(params.seed)
    feasible = problem.feasible_clouds
    budget = params.budget if params.budget is not None else 200

    init_size = max(1, min(params.area_limit, budget))
    forest = [
        _Tree(_evaluated(problem, random_allocation(problem, rng))) for _ in range(init_size)
    ]
    evaluations = init_size
    best = min(forest, key=lambda t: t.harmony.cost).harmony
    trace = [best.cost]

    while evaluations < budget:
        new_trees = []
        for tree in forest:
            if tree.age != 0:
                continue
            for _ in range(params.local_seeding):
                if evaluations >= budget:
                    break
                vec = _mutate_one_position(tree.harmony.vector.clouds, feasible, rng)
                new_trees.append(_Tree(_evaluated(problem, AllocationVector(vec))))
                evaluations += 1
        for tree in forest:
            tree.age += 1
        forest.extend(new_trees)

        candidates = [t for t in forest if t.age > params.life_time]
        forest = [t for t in forest if t.age <= params.life_time]
        forest.sort(key=lambda t: t.harmony.cost)
        if len(forest) > params.area_limit:
            candidates.extend(forest[params.area_limit :])
            forest = forest[: params.area_limit]

        reseeds = int(params.global_fraction * len(candidates))
        for _ in range(reseeds):
            if evaluations >= budget:
                break
            forest.append(_Tree(_evaluated(problem, random_allocation(problem, rng))))
            evaluations += 1

        forest.sort(key=lambda t: t.harmony.cost)
        forest[0].age = 0
        if forest[0].harmony.cost < best.cost:
            best = forest[0].harmony
        trace.append(best.cost)

    return OptResult(best.vector, best.cost, tuple(trace), evaluations)


def exhaustive_best(problem: PlacementProblem, limit: int = 100_000) -> OptResult:
    """Enumerate every r-subset of the feasible clouds; the global optimum.

    Subset order stands in for vector order (the cost is permutation
    invariant); ties go to the lexicographically smallest sorted vector.
    """
    r = problem.replica_count
    feasible = problem.feasible_clouds
    space = math.comb(len(feasible), r)
    if space > limit:
        raise SearchSpaceTooLarge(f"C({len(feasible)},{r}) = {space} exceeds limit {limit}")

    best: Harmony | None = None
    trace = []
    for combo in combinations(feasible, r):
        h = _evaluated(problem, AllocationVector(combo))
        if best is None or h.cost < best.cost:
            best = h
        trace.append(best.cost)
    return OptResult(best.vector, best.cost, tuple(trace), space)
