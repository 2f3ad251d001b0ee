"""Random graph generators and linear-Gaussian data simulation.

Three graph families cover the experiment grid: uniform m-edge DAGs, DAGs
with a capped in-degree, and the disjoint-clique family that forces any
conditional-independence learner to spend exponentially many tests inside
each clique. Data comes from linear structural models with Gaussian noise,
sampled in topological order.

Every generator is a pure function of its parameters and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .ci import Dataset
from .graph import Dag

RngSeed = int

DEFAULT_COEFF_RANGE = (0.5, 1.0)
DEFAULT_SD_RANGE = (1.0, math.sqrt(3.0))
# alternate regime used for the real-world-structure experiments
WIDE_COEFF_RANGE = (0.5, 2.0)
NARROW_SD_RANGE = (1.0, math.sqrt(2.0))


@dataclass
class ScmSpec:
    """Linear-Gaussian structural model: one weight per edge, one noise
    standard deviation per vertex."""

    dag: Dag
    coeffs: dict[tuple[int, int], float]
    noise_sd: tuple[float, ...]

    def __post_init__(self) -> None:
        if set(self.coeffs) != set(self.dag.edges()):
            raise ValueError("coefficients must be keyed exactly by the edges")
        if len(self.noise_sd) != self.dag.p:
            raise ValueError("need one noise sd per vertex")
        if any(sd <= 0 for sd in self.noise_sd):
            raise ValueError("noise sds must be positive")


def erdos_renyi_dag(p: int, m: int, seed: RngSeed) -> Dag:
    """Uniform m-edge skeleton oriented by a uniform random vertex order."""
    pairs = list(combinations(range(p), 2))
    if m > len(pairs):
        raise ValueError(f"m={m} exceeds the {len(pairs)} available pairs")
    rng = np.random.default_rng(seed)
    chosen = [pairs[k] for k in rng.choice(len(pairs), size=m, replace=False)]
    pos = {int(v): k for k, v in enumerate(rng.permutation(p))}
    return Dag(p, [(i, j) if pos[i] < pos[j] else (j, i) for i, j in chosen])


def fixed_indegree_dag(p: int, delta_in: int, seed: RngSeed) -> Dag:
    """DAG whose max in-degree is capped by delta_in.

    Fixes a uniform random vertex order, draws delta_in distinct candidate
    parents per vertex, and keeps the candidates that precede the vertex in
    the order.
    """
    if not 0 <= delta_in < p:
        raise ValueError("need 0 <= delta_in < p")
    rng = np.random.default_rng(seed)
    pos = {int(v): k for k, v in enumerate(rng.permutation(p))}
    edges = []
    for v in range(p):
        others = [u for u in range(p) if u != v]
        candidates = rng.choice(len(others), size=delta_in, replace=False)
        edges.extend(
            (others[k], v) for k in candidates if pos[others[k]] < pos[v]
        )
    return Dag(p, edges)


def cluster_adversarial_dag(p: int, d: int) -> Dag:
    """Disjoint complete clusters of size d + 1; leftover vertices isolated.

    Each cluster's tournament follows global index order, so the max
    in-degree is exactly d. Separating any intra-cluster pair requires
    conditioning inside the cluster, which is what makes the family a
    worst case for test counting.
    """
    if d + 1 > p:
        raise ValueError("cluster size d + 1 exceeds p")
    size = d + 1
    edges = []
    for start in range(0, (p // size) * size, size):
        members = range(start, start + size)
        edges.extend(combinations(members, 2))
    return Dag(p, edges)


def random_scm(
    dag: Dag,
    coeff_lo: float = DEFAULT_COEFF_RANGE[0],
    coeff_hi: float = DEFAULT_COEFF_RANGE[1],
    sd_lo: float = DEFAULT_SD_RANGE[0],
    sd_hi: float = DEFAULT_SD_RANGE[1],
    seed: RngSeed = 0,
) -> ScmSpec:
    """Draw edge weights from ±[coeff_lo, coeff_hi] (fair sign) and noise
    sds from [sd_lo, sd_hi]."""
    if not 0 <= coeff_lo <= coeff_hi:
        raise ValueError("need 0 <= coeff_lo <= coeff_hi")
    if not 0 < sd_lo <= sd_hi:
        raise ValueError("need 0 < sd_lo <= sd_hi")
    rng = np.random.default_rng(seed)
    coeffs = {}
    for e in dag.edges():
        magnitude = rng.uniform(coeff_lo, coeff_hi)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        coeffs[e] = sign * magnitude
    noise_sd = tuple(float(rng.uniform(sd_lo, sd_hi)) for _ in range(dag.p))
    return ScmSpec(dag, coeffs, noise_sd)


def sample(spec: ScmSpec, n: int, seed: RngSeed) -> Dataset:
    """n draws from the model, each variable filled in topological order."""
    if n < 2:
        raise ValueError("need at least two samples for a correlation matrix")
    rng = np.random.default_rng(seed)
    p = spec.dag.p
    values = rng.standard_normal((n, p)) * np.asarray(spec.noise_sd)
    for v in spec.dag.topological_order():
        for u in sorted(spec.dag.parents[v]):
            values[:, v] += spec.coeffs[(u, v)] * values[:, u]
    return Dataset(values)


def population_covariance(spec: ScmSpec) -> np.ndarray:
    """Exact covariance of the model: (I - A)^-1 D (I - A)^-T with A the
    weighted adjacency acting parents -> children and D the noise variances."""
    p = spec.dag.p
    a = np.zeros((p, p))
    for (u, v), c in spec.coeffs.items():
        a[v, u] = c
    inv = np.linalg.inv(np.eye(p) - a)
    d = np.diag(np.square(spec.noise_sd))
    return inv @ d @ inv.T
