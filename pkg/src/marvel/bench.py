"""Experiment harness: seeded runs of both learners with flat CSV output.

One experiment is a generator regime, a learner, an oracle kind, and a list
of seeds. Each seed gets its own graph, oracle, and boundary discovery;
boundary-phase and post-boundary test counts are reported separately. Rows
come out in seed order followed by one aggregate row of means, and a config
run twice yields byte-identical CSV.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from itertools import combinations
from time import perf_counter

import numpy as np

from .ci import CiOracle, Dataset, GaussianCiConfig, dsep_oracle, fisher_z_oracle
from .graph import Dag, Pdag, apply_meek_rules
from .marvel import LearnResult, marvel_learn
from .mb import MbMap, total_conditioning
from .metrics import RunMetrics
from .synth import (
    DEFAULT_COEFF_RANGE,
    DEFAULT_SD_RANGE,
    cluster_adversarial_dag,
    erdos_renyi_dag,
    fixed_indegree_dag,
    random_scm,
    sample,
)

GENERATORS = ("erdos_renyi", "fixed_indegree", "cluster")
ALGOS = ("marvel", "pc")
ORACLES = ("dsep", "fisher_z")

CSV_COLUMNS = (
    "algo",
    "seed",
    "p",
    "delta_in",
    "m",
    "n_samples",
    "mb_tests",
    "post_tests",
    "asc",
    "max_cond",
    "precision",
    "recall",
    "f1",
    "wall_ms",
    "warnings",
)


def skeleton_metrics(learned: Pdag, truth: Dag) -> tuple[float, float, float]:
    """Precision, recall, and F1 of the learned skeleton against the truth.

    Both graphs are read as undirected adjacency sets. An empty learned
    skeleton scores precision 1 against an empty truth and 0 otherwise;
    F1 is 0 whenever either component is 0.
    """
    if learned.p != truth.p:
        raise ValueError("graphs disagree on p")
    l_edges = learned.skeleton_pairs()
    t_edges = frozenset((min(u, v), max(u, v)) for u, v in truth.edges())
    hit = len(l_edges & t_edges)
    precision = hit / len(l_edges) if l_edges else (1.0 if not t_edges else 0.0)
    recall = hit / len(t_edges) if t_edges else 1.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision > 0 and recall > 0
        else 0.0
    )
    return precision, recall, f1


def pc_baseline(oracle: CiOracle, mb0: MbMap) -> LearnResult:
    """PC-style edge removal started from the boundary map's moral graph.

    Conditioning sets of size 0, 1, 2, ... are drawn from the current
    adjacency of each endpoint (adjacencies shrink as edges fall during the
    sweep). Separating sets are recorded and drive the collider rule; Meek
    rules finish the orientation. Vertices are processed in ascending index
    at every step.
    """
    p = oracle.p
    if mb0.p != p:
        raise ValueError("boundary map and oracle disagree on p")
    if mb0.removed:
        raise ValueError("starting boundary map must have no removed vertices")
    warnings: list[str] = []
    degenerate_before = getattr(oracle, "n_degenerate", 0)

    t0 = perf_counter()
    oracle.begin_phase()

    adj: list[set[int]] = [set(mb0.mb[x]) for x in range(p)]
    sepsets: dict[tuple[int, int], frozenset[int]] = {}
    level = 0
    while any(len(adj[x]) - 1 >= level for x in range(p)):
        for x in range(p):
            for y in sorted(adj[x]):
                if y not in adj[x]:
                    continue
                others = sorted(adj[x] - {y})
                if len(others) < level:
                    continue
                for s in combinations(others, level):
                    if oracle.query(x, y, frozenset(s)):
                        adj[x].discard(y)
                        adj[y].discard(x)
                        sepsets[(min(x, y), max(x, y))] = frozenset(s)
                        break
        level += 1

    skeleton = frozenset(
        (x, y) for x in range(p) for y in adj[x] if x < y
    )
    directed: set[tuple[int, int]] = set()
    for c in range(p):
        for a, b in combinations(sorted(adj[c]), 2):
            key = (a, b)
            if b in adj[a] or key not in sepsets or c in sepsets[key]:
                continue
            # keep-first when noisy answers demand both directions of an edge
            for tail in (a, b):
                if (c, tail) in directed:
                    warnings.append(
                        f"kept existing orientation {c}->{tail} over {tail}->{c}"
                    )
                else:
                    directed.add((tail, c))
    undirected = {e for e in skeleton if e not in {
        (min(i, j), max(i, j)) for i, j in directed
    }}
    base = Pdag(p, directed=directed, undirected=undirected)
    essential = apply_meek_rules(base, on_conflict="drop", warnings=warnings)

    post = oracle.phase_stats()
    degenerate_after = getattr(oracle, "n_degenerate", 0)
    if degenerate_after > degenerate_before:
        warnings.append(
            f"{degenerate_after - degenerate_before} queries had too few "
            "samples and were declared dependent"
        )
    metrics = RunMetrics(
        n_tests=post.n_tests,
        asc=post.asc,
        max_cond=post.max_cond_size,
        wall_ms=(perf_counter() - t0) * 1000.0,
        warnings=len(warnings),
    )
    return LearnResult(essential, tuple(range(p)), metrics, warnings)


@dataclass(frozen=True)
class ExperimentConfig:
    """One seeded experiment grid cell.

    generator picks the graph family (m for erdos_renyi, delta_in for
    fixed_indegree and cluster). oracle "dsep" answers from the true graph;
    "fisher_z" simulates n_samples rows of linear-Gaussian data per seed.
    wall_ms is zeroed in rows unless record_wall is set, keeping CSV output
    reproducible byte for byte.
    """

    generator: str
    p: int
    algo: str
    oracle: str
    seeds: tuple[int, ...]
    m: int | None = None
    delta_in: int | None = None
    n_samples: int | None = None
    alpha: float | None = None
    coeff_lo: float = DEFAULT_COEFF_RANGE[0]
    coeff_hi: float = DEFAULT_COEFF_RANGE[1]
    sd_lo: float = DEFAULT_SD_RANGE[0]
    sd_hi: float = DEFAULT_SD_RANGE[1]
    record_wall: bool = False

    def __post_init__(self) -> None:
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.algo not in ALGOS:
            raise ValueError(f"unknown algo {self.algo!r}")
        if self.oracle not in ORACLES:
            raise ValueError(f"unknown oracle {self.oracle!r}")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if self.p < 1:
            raise ValueError("p must be positive")
        if self.generator == "erdos_renyi" and self.m is None:
            raise ValueError("erdos_renyi needs m")
        if self.generator != "erdos_renyi" and self.delta_in is None:
            raise ValueError(f"{self.generator} needs delta_in")
        if self.oracle == "fisher_z":
            if self.n_samples is None:
                raise ValueError("fisher_z needs n_samples")
        else:
            if self.n_samples is not None:
                raise ValueError("dsep runs take no n_samples")
            if self.alpha is not None:
                raise ValueError("dsep runs take no alpha")


def simulate_dataset(
    g: Dag,
    n_samples: int,
    seed: int,
    coeff_lo: float = DEFAULT_COEFF_RANGE[0],
    coeff_hi: float = DEFAULT_COEFF_RANGE[1],
    sd_lo: float = DEFAULT_SD_RANGE[0],
    sd_hi: float = DEFAULT_SD_RANGE[1],
) -> Dataset:
    """Draw a linear-Gaussian model for g and sample rows from it.

    The model seed and the noise seed are both derived from the one seed
    given, so a (graph, seed) pair pins down the dataset exactly.
    """
    scm_seed, data_seed = (
        int(s) for s in np.random.SeedSequence(seed).generate_state(2)
    )
    spec = random_scm(
        g, coeff_lo, coeff_hi, sd_lo, sd_hi, seed=scm_seed
    )
    return sample(spec, n_samples, seed=data_seed)


def _generate(cfg: ExperimentConfig, seed: int) -> Dag:
    if cfg.generator == "erdos_renyi":
        return erdos_renyi_dag(cfg.p, cfg.m, seed)
    if cfg.generator == "fixed_indegree":
        return fixed_indegree_dag(cfg.p, cfg.delta_in, seed)
    return cluster_adversarial_dag(cfg.p, cfg.delta_in)


def _build_oracle(cfg: ExperimentConfig, g: Dag, seed: int) -> CiOracle:
    if cfg.oracle == "dsep":
        return dsep_oracle(g)
    data = simulate_dataset(
        g, cfg.n_samples, seed, cfg.coeff_lo, cfg.coeff_hi, cfg.sd_lo, cfg.sd_hi
    )
    config = GaussianCiConfig(alpha=cfg.alpha) if cfg.alpha is not None else None
    return fisher_z_oracle(data, config)


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    """One row per seed plus a final mean row (seed column "mean")."""
    rows = []
    for seed in cfg.seeds:
        try:
            g = _generate(cfg, seed)
            oracle = _build_oracle(cfg, g, seed)
        except ValueError as exc:
            raise ValueError(f"seed {seed}: {exc}") from exc
        mb0 = total_conditioning(oracle)
        mb_tests = oracle.stats().n_tests
        learner = marvel_learn if cfg.algo == "marvel" else pc_baseline
        res = learner(oracle, mb0)
        precision, recall, f1 = skeleton_metrics(res.essential, g)
        rows.append(
            {
                "algo": cfg.algo,
                "seed": seed,
                "p": cfg.p,
                "delta_in": (
                    cfg.delta_in
                    if cfg.delta_in is not None
                    else g.max_in_degree()
                ),
                "m": g.n_edges,
                "n_samples": cfg.n_samples if cfg.n_samples else 0,
                "mb_tests": mb_tests,
                "post_tests": res.metrics.n_tests,
                "asc": res.metrics.asc,
                "max_cond": res.metrics.max_cond,
                "precision": precision,
                "recall": recall,
                "f1": f1,
                "wall_ms": res.metrics.wall_ms if cfg.record_wall else 0.0,
                "warnings": res.metrics.warnings,
            }
        )
    mean = {"algo": cfg.algo, "seed": "mean"}
    for col in CSV_COLUMNS[2:]:
        mean[col] = sum(r[col] for r in rows) / len(rows)
    return rows + [mean]


_CONFIG_INT_KEYS = ("p", "m", "delta_in", "n_samples")
_CONFIG_FLOAT_KEYS = ("alpha", "coeff_lo", "coeff_hi", "sd_lo", "sd_hi")
_CONFIG_STR_KEYS = ("generator", "algo", "oracle")


def _parse_seeds(text: str) -> tuple[int, ...]:
    """Comma-separated integers; "a..b" expands to the inclusive range."""
    seeds: list[int] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if ".." in token:
            lo_text, _, hi_text = token.partition("..")
            lo, hi = int(lo_text), int(hi_text)
            if hi < lo:
                raise ValueError(f"empty seed range {token!r}")
            seeds.extend(range(lo, hi + 1))
        else:
            seeds.append(int(token))
    return tuple(seeds)


def parse_config(text: str) -> ExperimentConfig:
    """Build an ExperimentConfig from flat "key = value" lines.

    Keys are the ExperimentConfig field names; seeds take a comma list with
    optional "a..b" ranges; record_wall takes true or false. '#' starts a
    comment and blank lines are skipped.
    """
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        kv[key.strip()] = value.strip()

    fields: dict = {}
    for key, value in kv.items():
        try:
            if key in _CONFIG_STR_KEYS:
                fields[key] = value
            elif key in _CONFIG_INT_KEYS:
                fields[key] = int(value)
            elif key in _CONFIG_FLOAT_KEYS:
                fields[key] = float(value)
            elif key == "seeds":
                fields[key] = _parse_seeds(value)
            elif key == "record_wall":
                if value not in ("true", "false"):
                    raise ValueError("expected true or false")
                fields[key] = value == "true"
            else:
                raise ValueError("unknown key")
        except ValueError as exc:
            raise ValueError(f"config key {key!r}: {exc}") from exc
    for required in ("generator", "p", "algo", "oracle", "seeds"):
        if required not in fields:
            raise ValueError(f"config is missing {required!r}")
    return ExperimentConfig(**fields)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _format_cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def rows_to_csv(rows: list[dict]) -> str:
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        out.write(",".join(_format_cell(row[c]) for c in CSV_COLUMNS) + "\n")
    return out.getvalue()
