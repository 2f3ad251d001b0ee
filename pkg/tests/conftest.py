"""Shared test helpers: seeded random DAG samplers independent of synth."""

import random
from itertools import combinations

from marvel.graph import Dag


def random_dag(rng: random.Random, p: int, m: int | None = None) -> Dag:
    """Uniform m-edge skeleton oriented by a uniform random vertex order."""
    pairs = list(combinations(range(p), 2))
    if m is None:
        m = rng.randint(0, len(pairs))
    chosen = rng.sample(pairs, m)
    order = list(range(p))
    rng.shuffle(order)
    pos = {v: k for k, v in enumerate(order)}
    edges = [(i, j) if pos[i] < pos[j] else (j, i) for i, j in chosen]
    return Dag(p, edges)


def random_query(rng: random.Random, p: int) -> tuple[int, int, frozenset[int]]:
    x, y = rng.sample(range(p), 2)
    rest = [v for v in range(p) if v not in (x, y)]
    k = rng.randint(0, len(rest))
    return x, y, frozenset(rng.sample(rest, k))
