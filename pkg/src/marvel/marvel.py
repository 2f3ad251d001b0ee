"""Structure learning by recursive elimination of removable variables.

Each round sorts the remaining variables by Markov boundary size, walks that
order looking for the first variable whose removability battery passes, wires
up the edges and collider orientations the battery revealed, removes the
variable, and patches the boundary map. Once every variable is eliminated,
the colliders of the working graph that the run actually vouches for are kept
and closed under the Meek rules to produce the essential graph.

All batteries run against the current Markov boundary only, which keeps the
conditioning sets small; cross-round caches avoid repeating queries whose
answers removals cannot change.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil, comb
from time import perf_counter
from typing import Iterable

from .ci import CiOracle
from .graph import (
    Pdag,
    apply_meek_rules,
    enumerate_subsets,
    pdag_from_skeleton_and_vstructs,
    v_structures,
)
from .mb import MbMap, update_after_removal
from .metrics import RunMetrics


@dataclass
class NeighborInfo:
    """Split of one variable's Markov boundary into neighbors and co-parents.

    ``sepsets[t]`` is the first separating set found for co-parent t; it
    witnesses that t is not adjacent.
    """

    neighbors: frozenset[int]
    coparents: frozenset[int]
    sepsets: dict[int, frozenset[int]]


@dataclass
class VStructSet:
    """Collider triples (x, y, t): x -> y <- t with x, t nonadjacent."""

    triples: frozenset[tuple[int, int, int]]


@dataclass
class MarvelCaches:
    """Cross-round memory.

    neighbor_info and vpa hold one entry per variable, filtered to survivors
    on re-entry. cond1_nosep records (x, {z, w}) pairs proven inseparable by
    any set containing x; cond2_nosep records ({z, t}, {x, y}) combinations
    proven inseparable by any set containing both x and y. Entries are only
    invalidated by vertex removal, never by anything else.
    """

    neighbor_info: dict[int, NeighborInfo] = field(default_factory=dict)
    vpa: dict[int, VStructSet] = field(default_factory=dict)
    cond1_nosep: set[tuple[int, frozenset[int]]] = field(default_factory=set)
    cond2_nosep: set[tuple[frozenset[int], frozenset[int]]] = field(
        default_factory=set
    )


@dataclass
class LearnResult:
    """Essential graph plus the order of elimination and run accounting."""

    essential: Pdag
    elimination_order: tuple[int, ...]
    metrics: RunMetrics
    warnings: list[str]


def find_neighbors(
    x: int, mb_x: Iterable[int], oracle: CiOracle, caches: MarvelCaches
) -> NeighborInfo:
    """Split mb_x into neighbors and co-parents of x.

    A boundary member y is a co-parent iff some proper subset of
    mb_x - {y} separates it from x; the first such subset (searched in
    increasing cardinality) is recorded as its sepset. At most
    2**(|mb_x| - 1) - 1 queries per member. On re-entry the cached split is
    filtered to the current boundary with zero new queries.
    """
    mb_x = frozenset(mb_x)
    cached = caches.neighbor_info.get(x)
    if cached is not None:
        coparents = cached.coparents & mb_x
        return NeighborInfo(
            neighbors=cached.neighbors & mb_x,
            coparents=coparents,
            sepsets={t: cached.sepsets[t] for t in coparents},
        )
    neighbors = set()
    coparents = set()
    sepsets: dict[int, frozenset[int]] = {}
    for y in sorted(mb_x):
        for s in enumerate_subsets(mb_x - {y}, proper=True):
            if oracle.query(x, y, s):
                coparents.add(y)
                sepsets[y] = s
                break
        else:
            neighbors.add(y)
    info = NeighborInfo(frozenset(neighbors), frozenset(coparents), sepsets)
    caches.neighbor_info[x] = info
    return info


def find_vpa(
    x: int,
    info: NeighborInfo,
    mb_x: Iterable[int],
    oracle: CiOracle,
    caches: MarvelCaches,
) -> VStructSet:
    """Colliders x -> y <- t between x and each of its co-parents t.

    A neighbor y is a common child of x and t iff y is outside the recorded
    sepset of t and no subset of mb_x | {x} - {y, t} separates y from t.
    Cached across rounds; on re-entry triples are pruned to members that are
    still live neighbors and co-parents, with zero new queries.
    """
    mb_x = frozenset(mb_x)
    cached = caches.vpa.get(x)
    if cached is not None:
        kept = frozenset(
            (a, y, t)
            for a, y, t in cached.triples
            if y in info.neighbors and t in info.coparents
        )
        return VStructSet(kept)
    pool_base = mb_x | {x}
    triples = set()
    for t in sorted(info.coparents):
        s_xt = info.sepsets[t]
        for y in sorted(info.neighbors):
            if y in s_xt:
                continue
            for s in enumerate_subsets(pool_base - {y, t}):
                if oracle.query(y, t, s):
                    break
            else:
                triples.add((x, y, t))
    out = VStructSet(frozenset(triples))
    caches.vpa[x] = out
    return out


def check_condition1(
    x: int,
    info: NeighborInfo,
    mb_x: Iterable[int],
    oracle: CiOracle,
    caches: MarvelCaches,
) -> bool:
    """True iff no pair of x's neighbors is separable by a set containing x.

    Short-circuits false on the first separated pair. Pairs that survive a
    full sweep are recorded in cond1_nosep and never retested for this x.
    """
    mb_x = frozenset(mb_x)
    for z, w in combinations(sorted(info.neighbors), 2):
        key = (x, frozenset((z, w)))
        if key in caches.cond1_nosep:
            continue
        separated = False
        for s in enumerate_subsets(mb_x - {z, w}):
            if oracle.query(z, w, s | {x}):
                separated = True
                break
        if separated:
            return False
        caches.cond1_nosep.add(key)
    return True


def check_condition2(
    x: int,
    info: NeighborInfo,
    vpa: VStructSet,
    mb_x: Iterable[int],
    oracle: CiOracle,
    caches: MarvelCaches,
) -> bool:
    """True iff no neighbor z is separable from a collider co-parent t by a
    set containing both x and the common child y.

    Requires check_condition1 to have passed for x in the current round.
    Short-circuits false on the first separated combination; exhausted
    combinations are recorded in cond2_nosep and never retested.
    """
    mb_x = frozenset(mb_x)
    for _, y, t in sorted(vpa.triples):
        for z in sorted(info.neighbors - {y}):
            key = (frozenset((z, t)), frozenset((x, y)))
            if key in caches.cond2_nosep:
                continue
            separated = False
            for s in enumerate_subsets(mb_x - {z, y, t}):
                if oracle.query(z, t, s | {x, y}):
                    separated = True
                    break
            if separated:
                return False
            caches.cond2_nosep.add(key)
    return True


def is_removable_ci(
    x: int, mb_x: Iterable[int], oracle: CiOracle, caches: MarvelCaches
) -> tuple[bool, NeighborInfo, VStructSet]:
    """Full removability battery for x against its current boundary.

    Composes neighbor discovery, the neighbor-pair condition, collider
    discovery, and the co-parent condition, in that order. The returned
    artifacts let the caller wire edges and orientations; the collider set is
    empty when the first condition already failed (none were computed).
    """
    mb_x = frozenset(mb_x)
    info = find_neighbors(x, mb_x, oracle, caches)
    if not check_condition1(x, info, mb_x, oracle, caches):
        return False, info, VStructSet(frozenset())
    vpa = find_vpa(x, info, mb_x, oracle, caches)
    if not check_condition2(x, info, vpa, mb_x, oracle, caches):
        return False, info, vpa
    return True, info, vpa


def ci_budget_bound(p: int, delta_in: int) -> int:
    """Worst-case post-boundary CI-test count for the elimination phase.

    p * C(delta_in, 2) for the boundary updates plus
    (p / 2) * delta_in * (1 + 0.45 * delta_in) * 2**delta_in for the
    removability batteries, rounded up to an integer.
    """
    if p < 0 or delta_in < 0:
        raise ValueError("arguments must be nonnegative")
    total = (
        Fraction(p) * comb(delta_in, 2)
        + Fraction(p, 2)
        * delta_in
        * (1 + Fraction(9, 20) * delta_in)
        * 2**delta_in
    )
    return ceil(total)


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


def _add_undirected(
    directed: set[tuple[int, int]], undirected: set[tuple[int, int]], x: int, y: int
) -> None:
    # an edge that is already present, in either form, is left alone
    if (x, y) in directed or (y, x) in directed:
        return
    undirected.add(_pair(x, y))


def _orient(
    directed: set[tuple[int, int]],
    undirected: set[tuple[int, int]],
    i: int,
    j: int,
    warnings: list[str],
) -> None:
    # orient i -> j, never flipping an existing opposite orientation
    if (i, j) in directed:
        return
    if (j, i) in directed:
        warnings.append(f"kept existing orientation {j}->{i} over {i}->{j}")
        return
    undirected.discard(_pair(i, j))
    directed.add((i, j))


def _vouched_vstructures(
    ghat: Pdag, forced: set[tuple[int, int]], pos: dict[int, int]
) -> frozenset[tuple[int, int, int]]:
    """Colliders of the working graph that the elimination run vouches for.

    Edges oriented while identifying a collider always point at a true common
    child. An edge oriented only because its head was being eliminated is
    weaker evidence: it marks a collider at the eliminated vertex y only if
    the other parent was still present when y went, because y's removability
    battery vouched for every pair of its remaining neighbors. Had that other
    parent been eliminated earlier with the collider real, its own battery
    would have found the collider and directed this edge then, so the edge
    would not have still been undirected at y's elimination. A collider whose
    elimination-oriented edge pairs with an endpoint already gone is
    therefore an artifact of edge timing, not structure, and is dropped.
    """
    return frozenset(
        (a, c, b)
        for a, c, b in v_structures(ghat)
        if ((a, c) not in forced or pos[b] > pos[c])
        and ((b, c) not in forced or pos[a] > pos[c])
    )


def marvel_learn(
    oracle: CiOracle, mb0: MbMap, use_caches: bool = True
) -> LearnResult:
    """Recover the essential graph by recursive variable elimination.

    mb0 is the starting boundary map (typically from total_conditioning) and
    is not mutated. With use_caches=False every round recomputes its
    batteries from scratch; the output is identical, only the query count
    changes. If a round finds no removable variable (possible only with a
    fallible oracle), the variable with the smallest boundary is removed as
    if removable and a warning is recorded.
    """
    p = oracle.p
    if mb0.p != p:
        raise ValueError("boundary map and oracle disagree on p")
    if mb0.removed:
        raise ValueError("starting boundary map must have no removed vertices")
    m = mb0.copy()
    caches = MarvelCaches()
    directed: set[tuple[int, int]] = set()
    undirected: set[tuple[int, int]] = set()
    forced: set[tuple[int, int]] = set()
    warnings: list[str] = []
    order: list[int] = []
    degenerate_before = getattr(oracle, "n_degenerate", 0)

    t0 = perf_counter()
    oracle.begin_phase()

    while len(order) < p:
        scan = sorted(m.alive(), key=lambda v: (len(m.mb[v]), v))
        infos: dict[int, NeighborInfo] = {}
        chosen: int | None = None
        for x in scan:
            battery_caches = caches if use_caches else MarvelCaches()
            mb_x = frozenset(m.mb[x])
            verdict, info, vpa = is_removable_ci(x, mb_x, oracle, battery_caches)
            infos[x] = info
            for y in sorted(info.neighbors):
                _add_undirected(directed, undirected, x, y)
            for _, y, t in sorted(vpa.triples):
                _orient(directed, undirected, x, y, warnings)
                _orient(directed, undirected, t, y, warnings)
            if verdict:
                chosen = x
                break
        if chosen is None:
            chosen = scan[0]
            warnings.append(
                f"no removable vertex in round {len(order)}; "
                f"forcing removal of {chosen}"
            )
        x = chosen
        for pr in sorted(e for e in undirected if x in e):
            w = pr[0] if pr[1] == x else pr[1]
            undirected.discard(pr)
            directed.add((w, x))
            forced.add((w, x))
        order.append(x)
        update_after_removal(m, x, sorted(infos[x].neighbors), oracle)

    ghat = Pdag(p, directed=directed, undirected=undirected)
    pos = {v: i for i, v in enumerate(order)}
    base = pdag_from_skeleton_and_vstructs(
        p, ghat.skeleton_pairs(), _vouched_vstructures(ghat, forced, pos)
    )
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
    return LearnResult(essential, tuple(order), metrics, warnings)
