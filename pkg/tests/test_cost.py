import math
import random

import pytest

from replica_harmony.cost import (
    CostModel,
    EnergyParams,
    access_delay,
    placement_energy,
    replication_cost,
)
from replica_harmony.errors import InvalidAllocation
from replica_harmony.model import AllocationVector, DataItem, Gateway, LinkMatrix, MiniCloud, Topology

from conftest import make_topology


def naive_replication_cost(t: Topology, d: DataItem, a: AllocationVector) -> float:
    """Straight transcription of the cost formula, no shared code with CostModel."""
    size = d.size
    g = t.gateways[d.source_gateway]
    best = math.inf
    for entry in a.clouds:
        c = t.clouds[entry]
        first = g.waiting_time_s + (
            1.0 / t.links.gw_to_cloud[g.id][entry]
            + g.read_delay_ms / 1000.0
            + c.write_delay_ms / 1000.0
        ) * size
        worst_branch = 0.0
        for other in a.clouds:
            if other == entry:
                continue
            c2 = t.clouds[other]
            branch = c.waiting_time_s + (
                1.0 / t.links.cloud_to_cloud[entry][other]
                + c.read_delay_ms / 1000.0
                + c2.write_delay_ms / 1000.0
            ) * size
            worst_branch = max(worst_branch, branch)
        best = min(best, first + worst_branch)
    return best


def random_instance(seed: int):
    rng = random.Random(seed)
    n_clouds = rng.randint(2, 8)
    t = make_topology(rng, rng.randint(1, 8), n_clouds)
    r = rng.randint(1, min(4, n_clouds))
    d = DataItem(0, float(rng.randint(20, 100)), rng.randrange(t.num_gateways), r)
    a = AllocationVector(tuple(rng.sample(range(n_clouds), r)))
    return t, d, a


def test_single_replica_worked_example(example_topology):
    breakdown = replication_cost(example_topology, DataItem(0, 100.0, 0, 1), AllocationVector((0,)))
    assert breakdown.total == 0.5
    assert breakdown.propagation_cost == 0.0
    assert breakdown.entry_cloud == 0


def test_two_replica_worked_example(example_topology):
    breakdown = replication_cost(example_topology, DataItem(0, 100.0, 0, 2), AllocationVector((0, 1)))
    assert breakdown.total == 1.05
    assert breakdown.entry_cloud == 0
    assert breakdown.entry_cost == 0.5
    assert breakdown.propagation_cost == pytest.approx(0.55, rel=1e-12)
    per = dict(breakdown.per_candidate)
    assert per[0] == 1.05
    assert per[1] == pytest.approx(1.17, rel=1e-12)


def test_zero_size_and_zero_waits_cost_zero():
    gateway = Gateway(0, 5.0, 0.0)
    clouds = tuple(MiniCloud(c, 5.0, 5.0, 0.0, 1000.0) for c in range(3))
    links = LinkMatrix([[100.0] * 3], [[0.0 if a == b else 100.0 for b in range(3)] for a in range(3)])
    t = Topology((gateway,), clouds, links)
    d = DataItem(0, 0.0, 0, 2)
    for vec in ((0,), (0, 1), (2, 0, 1)):
        assert replication_cost(t, d, AllocationVector(vec)).total == 0.0
    assert access_delay(t, d, AllocationVector((0, 1)), 0) == 0.0


def test_breakdown_invariants_hold_on_random_instances():
    for seed in range(200):
        t, d, a = random_instance(seed)
        breakdown = replication_cost(t, d, a)
        assert len(breakdown.per_candidate) == len(a)
        assert breakdown.total == min(total for _, total in breakdown.per_candidate)
        assert breakdown.total == breakdown.entry_cost + breakdown.propagation_cost
        assert breakdown.total >= 0.0


def test_matches_naive_oracle():
    for seed in range(300):
        t, d, a = random_instance(seed)
        got = replication_cost(t, d, a).total
        want = naive_replication_cost(t, d, a)
        assert got == pytest.approx(want, rel=1e-12)


def test_permutation_invariance_is_exact():
    import itertools

    for seed in range(100):
        t, d, a = random_instance(seed)
        model = CostModel(t)
        base_cost = model.total(d, a)
        base_delay = model.access_delay(d, a, 0)
        base_energy = placement_energy(d, a)
        for perm in itertools.permutations(a.clouds):
            vec = AllocationVector(perm)
            assert model.total(d, vec) == base_cost
            assert model.access_delay(d, vec, 0) == base_delay
            assert placement_energy(d, vec) == base_energy


def test_scaling_by_powers_of_two_is_exact():
    for seed in range(50):
        rng = random.Random(9_000 + seed)
        t = make_topology(rng, 3, 5)
        # zero the waiting times so every term scales with the size
        t = Topology(
            tuple(Gateway(g.id, g.read_delay_ms, 0.0) for g in t.gateways),
            tuple(
                MiniCloud(c.id, c.write_delay_ms, c.read_delay_ms, 0.0, c.total_capacity)
                for c in t.clouds
            ),
            t.links,
        )
        a = AllocationVector(tuple(rng.sample(range(5), 3)))
        base = CostModel(t).total(DataItem(0, 64.0, 0, 3), a)
        for k in (0.0, 0.5, 2.0, 8.0):
            scaled = CostModel(t).total(DataItem(0, 64.0 * k, 0, 3), a)
            assert scaled == base * k


def test_access_delay_worked_example(example_topology):
    d = DataItem(0, 100.0, 0, 2)
    assert access_delay(example_topology, d, AllocationVector((0, 1)), 0) == 0.25


def test_access_delay_monotone_under_added_replica():
    for seed in range(200):
        rng = random.Random(3_000 + seed)
        t = make_topology(rng, 2, 6)
        d = DataItem(0, float(rng.randint(20, 100)), rng.randrange(2), 2)
        model = CostModel(t)
        ids = rng.sample(range(6), 3)
        smaller = AllocationVector(tuple(ids[:2]))
        larger = AllocationVector(tuple(ids))
        requester = rng.randrange(2)
        assert model.access_delay(d, larger, requester) <= model.access_delay(d, smaller, requester)


def test_placement_energy_examples():
    d = DataItem(0, 100.0, 0, 2)
    assert placement_energy(d, AllocationVector((0, 1))) == pytest.approx(190e-6, rel=1e-12)
    assert placement_energy(DataItem(0, 0.0, 0, 2), AllocationVector((0, 1))) == 0.0
    p = EnergyParams()
    single = placement_energy(d, AllocationVector((0,)), p)
    assert single == d.size * p.e_uplink + d.size * p.e_write


def test_placement_energy_strictly_increasing_in_replica_count():
    d = DataItem(0, 50.0, 0, 1)
    previous = -1.0
    for r in range(1, 6):
        energy = placement_energy(d, AllocationVector(tuple(range(r))))
        assert energy > previous
        previous = energy


def test_energy_params_reject_negative():
    with pytest.raises(ValueError):
        EnergyParams(e_uplink=-1.0)


def test_invalid_inputs_raise(example_topology):
    model = CostModel(example_topology)
    with pytest.raises(InvalidAllocation):
        model.total(DataItem(0, 10.0, 0, 1), AllocationVector((5,)))
    with pytest.raises(InvalidAllocation):
        model.total(DataItem(0, 10.0, 3, 1), AllocationVector((0,)))
    with pytest.raises(InvalidAllocation):
        model.access_delay(DataItem(0, 10.0, 0, 1), AllocationVector((0,)), requester=2)
