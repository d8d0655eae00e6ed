"""Seeded generators for the benchmark scenarios.

Four built-in scenarios pair gateway/cloud counts of (22,8), (25,10),
(32,15), (40,25) with shared defaults: 500 timesteps, data sizes 20..100
bytes, per-byte read/write delays 20..70 ms, a 0.1 arrival probability per
gateway per timestep, and 5..10 optimizer exercises per datum. Link rates,
capacities, and waiting times have no published ranges; the defaults below
are sized so scenario 1 stresses but rarely exhausts capacity over a full
run. Every field is overridable.

Generation draws in a pinned order (gateways, clouds, then link rows), so
a spec plus a seed reproduces a topology bit-for-bit.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import Infeasible, UnknownScenario
from .model import DataItem, Gateway, LinkMatrix, MiniCloud, Policy, Topology

BUILTIN_SIZES = {1: (22, 8), 2: (25, 10), 3: (32, 15), 4: (40, 25)}


def _pair(value) -> tuple:
    a, b = value
    return (a, b)


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    num_gateways: int
    num_clouds: int
    timesteps: int = 500
    data_size_range_bytes: tuple[int, int] = (20, 100)
    rw_delay_range_ms_per_byte: tuple[float, float] = (20.0, 70.0)
    exercises_range: tuple[int, int] = (5, 10)
    arrival_probability: float = 0.1
    gw_rate_range_bytes_per_s: tuple[float, float] = (500.0, 5000.0)
    cloud_rate_range_bytes_per_s: tuple[float, float] = (500.0, 5000.0)
    capacity_range_bytes: tuple[float, float] = (50_000.0, 200_000.0)
    waiting_time_range_s: tuple[float, float] = (0.1, 1.0)
    policy: Policy = field(default_factory=lambda: Policy(2, 4))
    seed: int = 0

    def __post_init__(self):
        for name in (
            "data_size_range_bytes",
            "rw_delay_range_ms_per_byte",
            "exercises_range",
            "gw_rate_range_bytes_per_s",
            "cloud_rate_range_bytes_per_s",
            "capacity_range_bytes",
            "waiting_time_range_s",
        ):
            lo, hi = _pair(getattr(self, name))
            object.__setattr__(self, name, (lo, hi))
            if lo > hi:
                raise ValueError(f"{name} is empty: [{lo}, {hi}]")
        if self.num_gateways < 1 or self.num_clouds < 1:
            raise ValueError("scenario needs at least one gateway and one cloud")
        if self.timesteps < 1:
            raise ValueError("timesteps must be >= 1")
        if not (0.0 <= self.arrival_probability <= 1.0):
            raise ValueError("arrival probability must be in [0, 1]")


def builtin_scenario(k: int) -> ScenarioSpec:
    if k not in BUILTIN_SIZES:
        raise UnknownScenario(f"unknown builtin scenario {k}; valid: 1..4")
    gateways, clouds = BUILTIN_SIZES[k]
    return ScenarioSpec(
        name=f"builtin:{k}",
        num_gateways=gateways,
        num_clouds=clouds,
        policy=Policy(2, min(4, clouds)),
    )


def generate_topology(spec: ScenarioSpec, rng: random.Random) -> Topology:
    delay = spec.rw_delay_range_ms_per_byte
    wait = spec.waiting_time_range_s
    gateways = tuple(
        Gateway(
            id=g,
            read_delay_ms=rng.uniform(*delay),
            waiting_time_s=rng.uniform(*wait),
        )
        for g in range(spec.num_gateways)
    )
    clouds = tuple(
        MiniCloud(
            id=c,
            write_delay_ms=rng.uniform(*delay),
            read_delay_ms=rng.uniform(*delay),
            waiting_time_s=rng.uniform(*wait),
            total_capacity=rng.uniform(*spec.capacity_range_bytes),
        )
        for c in range(spec.num_clouds)
    )
    gw_to_cloud = [
        [rng.uniform(*spec.gw_rate_range_bytes_per_s) for _ in range(spec.num_clouds)]
        for _ in range(spec.num_gateways)
    ]
    cloud_to_cloud = [
        [
            0.0 if a == b else rng.uniform(*spec.cloud_rate_range_bytes_per_s)
            for b in range(spec.num_clouds)
        ]
        for a in range(spec.num_clouds)
    ]
    return Topology(gateways, clouds, LinkMatrix(gw_to_cloud, cloud_to_cloud))


def generate_workload(spec: ScenarioSpec, topology: Topology, rng: random.Random) -> list[DataItem]:
    """Bernoulli arrivals: each gateway spawns a datum with the spec
    probability at every timestep 1..timesteps, in (timestep, gateway) order."""
    max_replicas = min(spec.policy.max_replicas, topology.num_clouds)
    if spec.policy.min_replicas > max_replicas:
        raise Infeasible(
            f"policy needs {spec.policy.min_replicas} replicas but the topology "
            f"has only {topology.num_clouds} clouds"
        )
    size_lo, size_hi = spec.data_size_range_bytes
    items: list[DataItem] = []
    for timestep in range(1, spec.timesteps + 1):
        for g in range(topology.num_gateways):
            if rng.random() < spec.arrival_probability:
                items.append(
                    DataItem(
                        id=len(items),
                        size=float(rng.randint(size_lo, size_hi)),
                        source_gateway=g,
                        replica_count=rng.randint(spec.policy.min_replicas, max_replicas),
                        arrival_timestep=timestep,
                    )
                )
    return items


# --- JSON (de)serialization ------------------------------------------------

def scenario_to_dict(spec: ScenarioSpec) -> dict:
    return {
        "name": spec.name,
        "num_gateways": spec.num_gateways,
        "num_clouds": spec.num_clouds,
        "timesteps": spec.timesteps,
        "data_size_range_bytes": list(spec.data_size_range_bytes),
        "rw_delay_range_ms_per_byte": list(spec.rw_delay_range_ms_per_byte),
        "exercises_range": list(spec.exercises_range),
        "arrival_probability": spec.arrival_probability,
        "gw_rate_range_bytes_per_s": list(spec.gw_rate_range_bytes_per_s),
        "cloud_rate_range_bytes_per_s": list(spec.cloud_rate_range_bytes_per_s),
        "capacity_range_bytes": list(spec.capacity_range_bytes),
        "waiting_time_range_s": list(spec.waiting_time_range_s),
        "policy": {
            "min_replicas": spec.policy.min_replicas,
            "max_replicas": spec.policy.max_replicas,
        },
        "seed": spec.seed,
    }


def scenario_from_dict(doc: dict) -> ScenarioSpec:
    defaults = ScenarioSpec(name="_", num_gateways=1, num_clouds=1)

    def get(key):
        return doc.get(key, getattr(defaults, key))

    policy = doc.get("policy")
    return ScenarioSpec(
        name=str(doc["name"]),
        num_gateways=int(doc["num_gateways"]),
        num_clouds=int(doc["num_clouds"]),
        timesteps=int(get("timesteps")),
        data_size_range_bytes=_pair(get("data_size_range_bytes")),
        rw_delay_range_ms_per_byte=_pair(get("rw_delay_range_ms_per_byte")),
        exercises_range=_pair(get("exercises_range")),
        arrival_probability=float(get("arrival_probability")),
        gw_rate_range_bytes_per_s=_pair(get("gw_rate_range_bytes_per_s")),
        cloud_rate_range_bytes_per_s=_pair(get("cloud_rate_range_bytes_per_s")),
        capacity_range_bytes=_pair(get("capacity_range_bytes")),
        waiting_time_range_s=_pair(get("waiting_time_range_s")),
        policy=Policy(int(policy["min_replicas"]), int(policy["max_replicas"]))
        if policy
        else defaults.policy,
        seed=int(get("seed")),
    )


def scenario_to_json(spec: ScenarioSpec) -> str:
    return json.dumps(scenario_to_dict(spec), indent=2, sort_keys=True) + "\n"


def scenario_from_json(text: str) -> ScenarioSpec:
    return scenario_from_dict(json.loads(text))
