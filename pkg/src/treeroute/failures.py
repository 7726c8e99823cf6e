"""Failure scenario generators.

Two models: Random removes round-half-up(rate * k) edges uniformly (k being
the graph's edge connectivity), Clustered fails each edge independently with
probability rate * (1 - pf_delta)^h where h is the closer endpoint's hop
distance to the destination (so edges at d fail with the full rate and the
chance decays per hop).  A subtractive decay variant, max(0, rate -
pf_delta*h), is available behind the decay switch for sensitivity checks.

Clustered draws use one uniform per edge in canonical edge order, which makes
scenarios with a shared seed monotone in the rate (a lower-rate failure set
is a subset of a higher-rate one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import Graph
from .rng import spawn

MODEL_RANDOM = "random"
MODEL_CLUSTERED = "clustered"
MODELS = (MODEL_RANDOM, MODEL_CLUSTERED)

DECAY_MULTIPLICATIVE = "multiplicative"
DECAY_SUBTRACTIVE = "subtractive"

_TAG_RANDOM = 11
_TAG_CLUSTERED = 12


@dataclass
class FailureScenario:
    model: str
    rate: float
    seed: int
    failed: list[tuple[int, int]]
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        doc = {"model": self.model, "rate": self.rate, "seed": self.seed,
               "failed": [list(e) for e in self.failed]}
        doc.update(self.params)
        return doc

    @staticmethod
    def from_json(doc: dict) -> "FailureScenario":
        extra = {k: v for k, v in doc.items()
                 if k not in ("model", "rate", "seed", "failed")}
        return FailureScenario(doc["model"], doc["rate"], doc.get("seed", 0),
                               [tuple(e) for e in doc["failed"]], extra)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def random_failures(g: Graph, rate: float, k: int, seed: int) -> FailureScenario:
    """Exactly round-half-up(rate * k) distinct edges, uniform without
    replacement."""
    if rate < 0:
        raise ValueError(f"failure rate must be >= 0, got {rate}")
    count = round_half_up(rate * k)
    if count > g.m:
        raise ValueError(
            f"cannot fail {count} edges, graph has only {g.m}")
    rng = spawn(seed, _TAG_RANDOM)
    chosen = sorted(rng.choice(g.m, size=count, replace=False).tolist())
    failed = [g.edge_endpoints(e) for e in chosen]
    return FailureScenario(MODEL_RANDOM, rate, seed, failed, {"k": k})


def clustered_failures(g: Graph, d: int, rate: float, seed: int,
                       pf_delta: float = 0.3,
                       decay: str = DECAY_MULTIPLICATIVE) -> FailureScenario:
    """Independent per-edge failures concentrated around d."""
    if not 0 <= rate <= 1:
        raise ValueError(f"failure rate must be in [0, 1], got {rate}")
    if not 0 <= pf_delta <= 1:
        raise ValueError(f"pf_delta must be in [0, 1], got {pf_delta}")
    if decay not in (DECAY_MULTIPLICATIVE, DECAY_SUBTRACTIVE):
        raise ValueError(f"unknown decay {decay!r}")
    dist = g.hop_distances(d)
    rng = spawn(seed, _TAG_CLUSTERED)
    draws = rng.random(g.m)
    failed = []
    for e in range(g.m):
        u, v = g.edge_endpoints(e)
        h = min(int(dist[u]), int(dist[v]))
        if decay == DECAY_MULTIPLICATIVE:
            p = rate * (1.0 - pf_delta) ** h
        else:
            p = max(0.0, rate - pf_delta * h)
        if draws[e] < p:
            failed.append((u, v))
    return FailureScenario(MODEL_CLUSTERED, rate, seed, failed,
                           {"destination": d, "pf_delta": pf_delta,
                            "decay": decay})
