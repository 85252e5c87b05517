"""Exact solvers: brute-force path cover, Held-Karp oracles, and the
separator-based divide-and-conquer search.

The divide-and-conquer solver recursively splits a path-cover problem
along a balanced separator line: it guesses the sets of solution
segments that cross the corridor R or leave it across the separating
line, splits the uncovered points, guesses endpoint matchings for both
sides, and recurses whenever the guessed skeleton realizes the required
matching.  Subproblem results are memoized; deterministic tie-breaking
(lexicographic on the sorted edge list) makes the returned optimum and
witness independent of enumeration order, hence of all pruning flags.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from .geometry import DegenerateSegmentsError, EPS_GEOM, GeometryError, segments_cross
from .separator import (
    SegmentClass,
    SeparatorBounds,
    SeparatorRegion,
    bounds,
    build_region,
    build_region_for_boundary,
    classify_segment,
    crossing_arc_points,
    rho_choice,
)
from .tour import (
    Edge,
    Instance,
    Matching,
    PathCover,
    PathCoverProblem,
    SegmentSet,
    Tour,
    path_cover_length,
    tour_length,
    trace_paths,
    uncovered_split,
)

REROUTE_GAP_TOL = 1e-6


class CapExceededError(RuntimeError):
    """An input exceeds a solver's configured size cap."""


class UnsupportedDensityError(RuntimeError):
    """The spacing is too small for the corridor bounds to be finite."""


class SolverInvariantError(RuntimeError):
    """A structural invariant of the search was violated at runtime."""


@dataclass(frozen=True)
class SolverConfig:
    threshold_t: int = 8
    max_scr_override: Optional[int] = None
    epsilon_len: float = 1e-9
    prune_crossing: bool = True
    prune_reroute: bool = True
    prune_matchings: bool = False
    parallel: bool = False
    brute_cap: int = 10
    check_invariants: bool = True

    def __post_init__(self) -> None:
        if self.threshold_t < 3:
            raise ValueError(f"threshold_t must be >= 3, got {self.threshold_t}")
        if not self.epsilon_len > 0.0:
            raise ValueError("epsilon_len must be positive")


@dataclass
class SolveStats:
    nodes: int = 0
    branches: int = 0
    realized: int = 0
    cache_hits: int = 0
    scr_subsets: int = 0
    send_subsets: int = 0
    pruned_crossing: int = 0
    pruned_reroute: int = 0
    pruned_incumbent: int = 0
    boundary_max: int = 0
    wall_time_s: float = 0.0
    balance_records: list = field(default_factory=list)

    def merge(self, other: "SolveStats") -> None:
        self.nodes += other.nodes
        self.branches += other.branches
        self.realized += other.realized
        self.cache_hits += other.cache_hits
        self.scr_subsets += other.scr_subsets
        self.send_subsets += other.send_subsets
        self.pruned_crossing += other.pruned_crossing
        self.pruned_reroute += other.pruned_reroute
        self.pruned_incumbent += other.pruned_incumbent
        self.boundary_max = max(self.boundary_max, other.boundary_max)
        self.wall_time_s += other.wall_time_s
        self.balance_records.extend(other.balance_records)

    def as_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "branches": self.branches,
            "realized": self.realized,
            "cache_hits": self.cache_hits,
            "scr_subsets": self.scr_subsets,
            "send_subsets": self.send_subsets,
            "pruned_crossing": self.pruned_crossing,
            "pruned_reroute": self.pruned_reroute,
            "pruned_incumbent": self.pruned_incumbent,
            "boundary_max": self.boundary_max,
            "wall_time_s": self.wall_time_s,
        }


@dataclass(frozen=True)
class SolveResult:
    length: float
    witness: Optional[object]  # PathCover or Tour
    stats: SolveStats

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.length)


def enumerate_matchings(b: Iterable[int]) -> Iterator[Matching]:
    """All perfect matchings on b, each exactly once, in deterministic order.

    Odd-sized sets yield nothing; the empty set yields one empty matching.
    """
    items = tuple(sorted(b))
    if len(items) % 2 != 0:
        return

    def rec(rem: tuple[int, ...]) -> Iterator[list[Edge]]:
        if not rem:
            yield []
            return
        first = rem[0]
        for k in range(1, len(rem)):
            rest = rem[1:k] + rem[k + 1 :]
            for tail in rec(rest):
                yield [(first, rem[k])] + tail

    for pairs in rec(items):
        yield Matching.from_pairs(pairs)


# ---------------------------------------------------------------------------
# brute force

def brute_force_path_cover(
    prob: PathCoverProblem, cap: int = 10, stats: Optional[SolveStats] = None
) -> SolveResult:
    """Exact minimum over every path cover realizing the matching."""
    if len(prob.p_sub) > cap:
        raise CapExceededError(f"brute force capped at {cap} points, got {len(prob.p_sub)}")
    stats = stats if stats is not None else SolveStats()
    t0 = time.perf_counter()
    d = prob.instance.distance_matrix
    eps = EPS_GEOM
    pairs = list(prob.m.pairs)
    interior = tuple(v for v in prob.p_sub if v not in prob.b)

    if not pairs:
        stats.wall_time_s += time.perf_counter() - t0
        if prob.p_sub:
            return SolveResult(math.inf, None, stats)
        return SolveResult(0.0, PathCover(()), stats)

    best: list = [math.inf, None, None]  # cost, edge key, paths

    def consider(paths: list[tuple[int, ...]], cost: float) -> None:
        pc = PathCover.canonical(paths)
        key = tuple(sorted(pc.edges()))
        if cost < best[0] - eps or (cost <= best[0] + eps and (best[1] is None or key < best[1])):
            best[0], best[1], best[2] = cost, key, pc

    def rec(idx: int, remaining: tuple[int, ...], acc: list, cost: float) -> None:
        if cost > best[0] + eps:
            return
        if idx == len(pairs):
            if not remaining:
                stats.nodes += 1
                consider(acc, cost)
            return
        u, w = pairs[idx]
        sizes = (len(remaining),) if idx == len(pairs) - 1 else range(len(remaining) + 1)
        for k in sizes:
            for combo in itertools.combinations(remaining, k):
                left = tuple(v for v in remaining if v not in combo)
                for perm in itertools.permutations(combo):
                    path = (u, *perm, w)
                    c = cost + sum(d[a, b] for a, b in zip(path, path[1:]))
                    if c > best[0] + eps:
                        continue
                    acc.append(path)
                    rec(idx + 1, left, acc, c)
                    acc.pop()

    rec(0, interior, [], 0.0)
    stats.wall_time_s += time.perf_counter() - t0
    if best[2] is None:
        return SolveResult(math.inf, None, stats)
    return SolveResult(path_cover_length(best[2], prob.instance), best[2], stats)


# ---------------------------------------------------------------------------
# Held-Karp oracles

def held_karp_tsp(inst: Instance, stats: Optional[SolveStats] = None) -> SolveResult:
    """Exact tour by bitmask dynamic programming over vertex subsets."""
    n = inst.n
    if n < 3 or n > 22:
        raise CapExceededError(f"held_karp_tsp supports 3 <= n <= 22, got {n}")
    stats = stats if stats is not None else SolveStats()
    t0 = time.perf_counter()
    d = inst.distance_matrix
    size = 1 << n
    dp = np.full((size, n), np.inf)
    parent = np.full((size, n), -1, dtype=np.int16)
    for k in range(1, n):
        m = (1 << k) | 1
        dp[m, k] = d[0, k]
        parent[m, k] = 0

    for mask in range(3, size, 2):
        if mask.bit_count() < 3:
            continue
        rest = mask & ~1
        while rest:
            bit = rest & -rest
            last = bit.bit_length() - 1
            rest ^= bit
            pm = mask ^ bit
            vals = dp[pm] + d[:, last]
            j = int(np.argmin(vals))
            if math.isfinite(vals[j]):
                dp[mask, last] = vals[j]
                parent[mask, last] = j
            stats.nodes += 1

    full = size - 1
    totals = dp[full] + d[:, 0]
    totals[0] = np.inf
    j = int(np.argmin(totals))
    order = []
    mask = full
    while j != -1:
        order.append(j)
        j2 = int(parent[mask, j])
        mask ^= 1 << j
        j = j2
    order.reverse()
    t = Tour.canonical(order)
    stats.wall_time_s += time.perf_counter() - t0
    return SolveResult(tour_length(t, inst), t, stats)


def held_karp_path_cover(
    prob: PathCoverProblem, cap: int = 18, stats: Optional[SolveStats] = None
) -> SolveResult:
    """Exact path cover by a multi-path subset DP, used as an oracle."""
    npts = len(prob.p_sub)
    if npts > cap:
        raise CapExceededError(f"held_karp_path_cover capped at {cap} points, got {npts}")
    stats = stats if stats is not None else SolveStats()
    t0 = time.perf_counter()

    if not prob.m.pairs:
        stats.wall_time_s += time.perf_counter() - t0
        if prob.p_sub:
            return SolveResult(math.inf, None, stats)
        return SolveResult(0.0, PathCover(()), stats)

    local = {g: i for i, g in enumerate(prob.p_sub)}
    pairs = [(local[a], local[b]) for a, b in prob.m.pairs]
    interior = [i for i, g in enumerate(prob.p_sub) if g not in prob.b]
    idx = np.asarray(prob.p_sub)
    d = prob.instance.distance_matrix[np.ix_(idx, idx)]
    full = (1 << npts) - 1

    start0 = pairs[0][0]
    init = (1 << start0, start0)
    layer: dict[tuple[int, int], float] = {init: 0.0}
    parents: dict[tuple[int, int, int], tuple] = {}

    best_cost = math.inf
    best_final: Optional[tuple[int, int, int]] = None

    for pi, (_, end_v) in enumerate(pairs):
        nxt: dict[tuple[int, int], float] = {}
        by_pop: dict[int, list[tuple[int, int]]] = {}
        for st in layer:
            by_pop.setdefault(st[0].bit_count(), []).append(st)
        pop = 0
        while pop <= npts:
            for st in sorted(by_pop.get(pop, ())):
                mask, last = st
                cost = layer[st]
                stats.nodes += 1
                for v in interior:
                    bit = 1 << v
                    if mask & bit:
                        continue
                    st2 = (mask | bit, v)
                    c2 = cost + d[last, v]
                    if c2 < layer.get(st2, math.inf):
                        layer[st2] = c2
                        parents[(pi, *st2)] = ("ext", (pi, *st))
                        by_pop.setdefault(st2[0].bit_count(), []).append(st2)
                ebit = 1 << end_v
                if not mask & ebit:
                    c2 = cost + d[last, end_v]
                    mask2 = mask | ebit
                    if pi + 1 == len(pairs):
                        if mask2 == full and c2 < best_cost:
                            best_cost = c2
                            best_final = (pi, mask, last)
                    else:
                        s_next = pairs[pi + 1][0]
                        st2 = (mask2 | (1 << s_next), s_next)
                        if c2 < nxt.get(st2, math.inf):
                            nxt[st2] = c2
                            parents[(pi + 1, *st2)] = ("close", (pi, *st))
            pop += 1
        layer = nxt

    if best_final is None:
        stats.wall_time_s += time.perf_counter() - t0
        return SolveResult(math.inf, None, stats)

    # walk parents back into explicit paths
    paths_local: list[list[int]] = []
    cur = best_final
    path = [pairs[cur[0]][1], cur[2]]
    while True:
        rec = parents.get(cur)
        if rec is None:
            paths_local.append(path[::-1])
            break
        kind, prev = rec
        if kind == "ext":
            path.append(prev[2])
        else:
            paths_local.append(path[::-1])
            path = [pairs[prev[0]][1], prev[2]]
        cur = prev
    pc = PathCover.canonical([[int(idx[v]) for v in p] for p in paths_local])
    stats.wall_time_s += time.perf_counter() - t0
    return SolveResult(path_cover_length(pc, prob.instance), pc, stats)


# ---------------------------------------------------------------------------
# crossing-set enumeration

def enumerate_scr(
    cr: SegmentSet,
    region: SeparatorRegion,
    bnds: SeparatorBounds,
    cfg: SolverConfig,
    inst: Instance,
    stats: Optional[SolveStats] = None,
    b: frozenset[int] = frozenset(),
) -> Iterator[SegmentSet]:
    """Candidate crossing-segment sets, in increasing cardinality.

    Subsets grow one edge at a time in canonical order, so pruned
    partial sets cost nothing.  Degree caps (one incident edge at a
    boundary point, two elsewhere) and acyclicity are unconditional
    feasibility filters: no realizable solution violates them.  With
    crossing pruning, subsets with a mutually crossing pair are skipped
    (optimal solutions are non-crossing).  With rerouting pruning, a
    subset is skipped when no assignment of crossing directions lets
    every same-direction pair occupy at least 4*rho of boundary arc;
    the test is 2-colorability of the violating pairs.
    """
    edges = sorted(cr.edges)
    k_edges = len(edges)
    limit = cfg.max_scr_override if cfg.max_scr_override is not None else math.ceil(bnds.s_cr)
    limit = min(limit, k_edges)

    cross_mask = [0] * k_edges
    conflict: list[list[int]] = [[] for _ in range(k_edges)]
    if k_edges and (cfg.prune_crossing or cfg.prune_reroute):
        segs = [inst.segment(i, j) for i, j in edges]
        positions = []
        for seg in segs:
            hit = crossing_arc_points(seg, region)
            if hit is None:
                raise SolverInvariantError("a crossing candidate lost its arc intersections")
            positions.append((hit[0][1], hit[1][1]))
        min_gap = 4.0 * region.rho - REROUTE_GAP_TOL
        for a in range(k_edges):
            for c in range(a + 1, k_edges):
                try:
                    x = segments_cross(segs[a], segs[c])
                except DegenerateSegmentsError:
                    x = True
                if x:
                    cross_mask[a] |= 1 << c
                    cross_mask[c] |= 1 << a
                gap = abs(positions[a][0] - positions[c][0]) + abs(
                    positions[a][1] - positions[c][1]
                )
                if gap < min_gap:
                    conflict[a].append(c)
                    conflict[c].append(a)

    def orientable(combo: tuple[int, ...]) -> bool:
        members = set(combo)
        color: dict[int, int] = {}
        for root in combo:
            if root in color:
                continue
            color[root] = 0
            queue = [root]
            while queue:
                v = queue.pop()
                for w in conflict[v]:
                    if w not in members:
                        continue
                    if w not in color:
                        color[w] = color[v] ^ 1
                        queue.append(w)
                    elif color[w] == color[v]:
                        return False
        return True

    def feasible_extension(combo: tuple[int, ...], idx: int) -> bool:
        i, j = edges[idx]
        deg_i = deg_j = 0
        parent = {i: i, j: j}

        def find(v: int) -> int:
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for a in combo:
            u, w = edges[a]
            deg_i += (u == i) + (w == i)
            deg_j += (u == j) + (w == j)
            parent.setdefault(u, u)
            parent.setdefault(w, w)
            ru, rw = find(u), find(w)
            if ru != rw:
                parent[ru] = rw
        if deg_i >= (1 if i in b else 2) or deg_j >= (1 if j in b else 2):
            return False
        return find(i) != find(j)  # a cycle inside the guess is never realizable

    if stats is not None:
        stats.scr_subsets += 1
    yield SegmentSet.from_edges(())
    frontier: list[tuple[tuple[int, ...], int]] = [((), 0)]
    for _ in range(limit):
        nxt: list[tuple[tuple[int, ...], int]] = []
        for combo, forbidden in frontier:
            start = combo[-1] + 1 if combo else 0
            for idx in range(start, k_edges):
                bit = 1 << idx
                if cfg.prune_crossing and forbidden & bit:
                    if stats is not None:
                        stats.pruned_crossing += 1
                    continue
                if not feasible_extension(combo, idx):
                    continue
                grown = combo + (idx,)
                if cfg.prune_reroute and not orientable(grown):
                    if stats is not None:
                        stats.pruned_reroute += 1
                    continue
                if stats is not None:
                    stats.scr_subsets += 1
                yield SegmentSet.from_edges(edges[a] for a in grown)
                nxt.append((grown, forbidden | cross_mask[idx]))
        frontier = nxt
        if not frontier:
            break


def _enumerate_send(
    end_edges: Sequence[Edge], r_points: Sequence[int], b: frozenset[int] = frozenset()
) -> list[tuple[Edge, ...]]:
    """Subsets of the end-segment candidates respecting degree caps.

    Each edge is owned by its first corridor point; the recursion picks
    incident edges per corridor point, tracking degrees of every
    endpoint (at most one at a boundary point, two elsewhere).  Results
    are sorted by (cardinality, edge list).
    """
    r_set = set(r_points)
    owners: dict[int, list[Edge]] = {r: [] for r in sorted(r_set)}
    for e in sorted(end_edges):
        owner = e[0] if e[0] in r_set else e[1]
        if e[0] in r_set and e[1] in r_set:
            owner = min(e[0], e[1])
        owners[owner].append(e)

    r_list = sorted(owners)
    out: list[tuple[Edge, ...]] = []

    def cap_of(v: int) -> int:
        return 1 if v in b else 2

    def rec(idx: int, chosen: list[Edge], deg: dict[int, int]) -> None:
        if idx == len(r_list):
            out.append(tuple(chosen))
            return
        r = r_list[idx]
        cap = cap_of(r) - deg.get(r, 0)
        menu = owners[r]
        for k in range(0, min(max(cap, 0), len(menu)) + 1):
            for combo in itertools.combinations(menu, k):
                add: dict[int, int] = {}
                for a, c in combo:
                    add[a] = add.get(a, 0) + 1
                    add[c] = add.get(c, 0) + 1
                if any(deg.get(v, 0) + cnt > cap_of(v) for v, cnt in add.items()):
                    continue
                deg2 = dict(deg)
                for v, cnt in add.items():
                    deg2[v] = deg2.get(v, 0) + cnt
                chosen.extend(combo)
                rec(idx + 1, chosen, deg2)
                del chosen[len(chosen) - len(combo) :]

    rec(0, [], {})
    return sorted(set(tuple(sorted(c)) for c in out), key=lambda c: (len(c), c))


# ---------------------------------------------------------------------------
# divide and conquer

class _DncSolver:
    def __init__(self, inst: Instance, alpha: float, cfg: SolverConfig):
        self.inst = inst
        self.alpha = alpha
        self.cfg = cfg
        self.stats = SolveStats()
        self.cache: dict = {}
        self.geo_cache: dict = {}
        self.eps = cfg.epsilon_len

    def solve(self, p_sub: tuple[int, ...], b: frozenset[int], m: Matching):
        key = (p_sub, b, m.pairs)
        hit = self.cache.get(key)
        if hit is not None:
            self.stats.cache_hits += 1
            return hit
        self.stats.nodes += 1
        res = self._solve_inner(p_sub, b, m)
        self.cache[key] = res
        return res

    def _solve_inner(self, p_sub, b, m):
        cfg = self.cfg
        inst = self.inst
        n_sub = len(p_sub)
        if n_sub <= cfg.threshold_t:
            prob = PathCoverProblem.make(inst, p_sub, b, m)
            r = brute_force_path_cover(prob, cap=max(cfg.brute_cap, cfg.threshold_t))
            return (r.length, r.witness)

        logn = math.log(n_sub)
        if cfg.check_invariants:
            self.stats.boundary_max = max(self.stats.boundary_max, len(b))
            if len(b) > max(60.0 * logn / self.alpha, 12.0 * logn):
                raise SolverInvariantError(
                    f"boundary bound violated: |B|={len(b)} at |P|={n_sub}, alpha={self.alpha}"
                )

        rho_planned = min(rho_choice(self.alpha), self.alpha / 2.0 - EPS_GEOM)
        if rho_planned <= 0.0 or self.alpha <= 2.0 * rho_planned:
            if n_sub <= 18:
                prob = PathCoverProblem.make(inst, p_sub, b, m)
                r = held_karp_path_cover(prob)
                return (r.length, r.witness)
            raise UnsupportedDensityError(
                f"alpha={self.alpha} leaves no usable corridor at |P|={n_sub}"
            )

        use_b_branch = len(b) >= max(40.0 * logn / self.alpha, 8.0 * logn)
        region, bnds, r_pts, cr_set, end_edges = self._geometry(p_sub, b, use_b_branch)
        axis = region.axis
        d = inst.distance_matrix
        send_options = _enumerate_send(end_edges, r_pts, b)
        self.stats.send_subsets += len(send_options)

        incumbent = self._greedy_length(p_sub, b, m)
        best_cost = math.inf
        best_key = None
        best_edges: Optional[frozenset[Edge]] = None
        matchings_cache: dict[tuple[int, ...], list[Matching]] = {}
        split_records: set[tuple[int, int, int, int, bool]] = set()

        for s_cr in enumerate_scr(cr_set, region, bnds, cfg, inst, self.stats, b):
            scr_len = sum(d[i, j] for i, j in sorted(s_cr.edges))
            if scr_len > incumbent + self.eps:
                self.stats.pruned_incumbent += 1
                continue
            for s_end in send_options:
                edges = set(s_cr.edges)
                edges.update(s_end)
                if len(edges) != len(s_cr.edges) + len(s_end):
                    continue
                if not self._degrees_ok(edges, b):
                    continue
                s_len = scr_len + sum(d[i, j] for i, j in s_end)
                if s_len > incumbent + self.eps:
                    self.stats.pruned_incumbent += 1
                    continue
                if not self._skeleton_ok(edges, b, m):
                    continue
                s_set = SegmentSet(frozenset(edges))
                try:
                    p1, b1, p2, b2 = uncovered_split(inst, p_sub, b, s_set, axis)
                except Exception:
                    continue
                if len(b1) % 2 or len(b2) % 2:
                    continue
                if cfg.check_invariants:
                    split_records.add((n_sub, len(p1), len(p2), len(r_pts), use_b_branch))
                for m1 in self._matchings(b1, matchings_cache):
                    for m2 in self._matchings(b2, matchings_cache):
                        self.stats.branches += 1
                        union = set(edges)
                        union.update(m1.pairs)
                        union.update(m2.pairs)
                        if not realizes_fast(union, b, m):
                            continue
                        self.stats.realized += 1
                        c1, w1 = self.solve(p1, frozenset(b1), m1)
                        if not math.isfinite(c1) or s_len + c1 > incumbent + self.eps:
                            continue
                        c2, w2 = self.solve(p2, frozenset(b2), m2)
                        if not math.isfinite(c2):
                            continue
                        cost = s_len + c1 + c2
                        if cost > min(incumbent, best_cost) + self.eps:
                            continue
                        all_edges = frozenset(
                            edges | set(w1.edges()) | set(w2.edges())
                        )
                        key = tuple(sorted(all_edges))
                        if (
                            cost < best_cost - self.eps
                            or best_key is None
                            or (cost <= best_cost + self.eps and key < best_key)
                        ):
                            best_cost, best_key, best_edges = cost, key, all_edges
                        incumbent = min(incumbent, cost)

        if cfg.check_invariants:
            self.stats.balance_records.extend(sorted(split_records))
        if best_edges is None:
            return (math.inf, None)
        paths = trace_paths(best_edges, b, m)
        if paths is None:
            raise SolverInvariantError("best branch does not realize the matching")
        pc = PathCover.canonical(paths)
        return (path_cover_length(pc, inst), pc)

    def _geometry(self, p_sub: tuple[int, ...], b: frozenset[int], use_b_branch: bool):
        """Region, bounds and candidate-segment tables for a point subset.

        Cached: distinct top-level problems and repeated subproblems share
        the same subset geometry.
        """
        key = (p_sub, b if use_b_branch else None)
        got = self.geo_cache.get(key)
        if got is not None:
            return got
        from .geometry import side_of_line

        inst = self.inst
        pts = [inst.points[i] for i in p_sub]
        if use_b_branch:
            region = build_region_for_boundary(
                pts, [inst.points[i] for i in sorted(b)], self.alpha
            )
        else:
            region = build_region(pts, self.alpha)
        bnds = bounds(region, self.alpha)
        axis = region.axis

        side: dict[int, int] = {}
        in_r: dict[int, bool] = {}
        for i in p_sub:
            s = side_of_line(inst.points[i], axis)
            if s == 0:
                raise SolverInvariantError(f"input point {i} lies on the separating line")
            side[i] = s
            in_r[i] = region.contains(inst.points[i])
        r_pts = tuple(i for i in p_sub if in_r[i])

        cr_edges = []
        for a, c in itertools.combinations(p_sub, 2):
            if side[a] * side[c] > 0 or in_r[a] or in_r[c]:
                continue
            if crossing_arc_points(inst.segment(a, c), region) is not None:
                cr_edges.append((a, c))
        end_edges = sorted(
            {
                (min(i, j), max(i, j))
                for i in r_pts
                for j in p_sub
                if j != i and side[i] * side[j] < 0
            }
        )
        out = (region, bnds, r_pts, SegmentSet.from_edges(cr_edges), tuple(end_edges))
        self.geo_cache[key] = out
        return out

    def _degrees_ok(self, edges: Iterable[Edge], b: frozenset[int]) -> bool:
        deg: dict[int, int] = {}
        for i, j in edges:
            deg[i] = deg.get(i, 0) + 1
            deg[j] = deg.get(j, 0) + 1
        return all(c <= (1 if v in b else 2) for v, c in deg.items())

    def _skeleton_ok(self, edges: set[Edge], b: frozenset[int], m: Matching) -> bool:
        """Cheap necessary conditions on the guessed segments alone."""
        adj: dict[int, list[int]] = {}
        for i, j in edges:
            adj.setdefault(i, []).append(j)
            adj.setdefault(j, []).append(i)
        seen: set[int] = set()
        m_pairs = set(m.pairs)
        for v in sorted(adj):
            if v in seen or len(adj[v]) != 1:
                continue
            path = [v]
            seen.add(v)
            prev, cur = None, v
            while True:
                nxt = [w for w in adj[cur] if w != prev]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                if cur in seen:
                    return False
                seen.add(cur)
                path.append(cur)
            if path[0] in b and path[-1] in b:
                if tuple(sorted((path[0], path[-1]))) not in m_pairs:
                    return False
        return len(seen) == len(adj)  # leftovers would be cycles

    def _matchings(self, b_side: tuple[int, ...], cache: dict) -> list[Matching]:
        got = cache.get(b_side)
        if got is not None:
            return got
        items = list(enumerate_matchings(b_side))
        if self.cfg.prune_matchings and len(b_side) >= 4:
            items = [mm for mm in items if not self._matching_crosses(mm)]
        cache[b_side] = items
        return items

    def _matching_crosses(self, mm: Matching) -> bool:
        for (a, b), (c, e) in itertools.combinations(mm.pairs, 2):
            try:
                if segments_cross(self.inst.segment(a, b), self.inst.segment(c, e)):
                    return True
            except DegenerateSegmentsError:
                return True
        return False

    def _greedy_length(self, p_sub, b, m) -> float:
        """Cheap feasible upper bound: matched pairs plus cheapest insertions."""
        if not m.pairs:
            return 0.0 if not p_sub else math.inf
        d = self.inst.distance_matrix
        paths = [[u, v] for u, v in m.pairs]
        for x in p_sub:
            if x in b:
                continue
            best = None
            for pi, path in enumerate(paths):
                for k in range(len(path) - 1):
                    a, c = path[k], path[k + 1]
                    delta = d[a, x] + d[x, c] - d[a, c]
                    if best is None or delta < best[0]:
                        best = (delta, pi, k)
            _, pi, k = best
            paths[pi].insert(k + 1, x)
        return float(sum(sum(d[a, c] for a, c in zip(p, p[1:])) for p in paths))


def realizes_fast(edges: set[Edge], b: frozenset[int], m: Matching) -> bool:
    if not b and not m.pairs:
        return not edges
    return trace_paths(edges, b, m) is not None


def hyperbolic_tsp_dnc(prob: PathCoverProblem, alpha: float, cfg: SolverConfig) -> SolveResult:
    """Divide-and-conquer exact path cover for an alpha-spaced instance."""
    solver = _DncSolver(prob.instance, alpha, cfg)
    t0 = time.perf_counter()
    length, witness = solver.solve(prob.p_sub, prob.b, prob.m)
    solver.stats.wall_time_s = time.perf_counter() - t0
    return SolveResult(length, witness, solver.stats)


# ---------------------------------------------------------------------------
# tour reduction

def _solve_pc(prob: PathCoverProblem, alpha: float, cfg: SolverConfig, engine: str) -> SolveResult:
    if engine == "dnc":
        return hyperbolic_tsp_dnc(prob, alpha, cfg)
    if engine == "brute":
        return brute_force_path_cover(prob, cap=cfg.brute_cap)
    if engine == "hk":
        return held_karp_path_cover(prob)
    raise ValueError(f"unknown engine {engine!r}")


def _tsp_job(args) -> tuple[int, float, Optional[PathCover], SolveStats]:
    inst, q, cfg, engine = args
    prob = PathCoverProblem.tsp(inst, 0, q)
    res = _solve_pc(prob, inst.alpha, cfg, engine)
    return q, res.length, res.witness, res.stats


def tsp_via_path_cover(inst: Instance, cfg: SolverConfig, engine: str = "dnc") -> SolveResult:
    """Optimal tour via n-1 two-endpoint path covers closed by the pq edge."""
    n = inst.n
    if n < 3:
        raise ValueError(f"tour reduction needs n >= 3, got {n}")
    stats = SolveStats()
    t0 = time.perf_counter()
    if cfg.parallel and n > 3:
        jobs = [(inst, q, cfg, engine) for q in range(1, n)]
        with ProcessPoolExecutor(max_workers=min(len(jobs), os.cpu_count() or 1)) as ex:
            outcomes = list(ex.map(_tsp_job, jobs))
    elif engine == "dnc":
        # one shared solver: the top-level problems reuse each other's
        # subproblem cache and subset geometry
        solver = _DncSolver(inst, inst.alpha, cfg)
        outcomes = []
        for q in range(1, n):
            prob = PathCoverProblem.tsp(inst, 0, q)
            length, witness = solver.solve(prob.p_sub, prob.b, prob.m)
            outcomes.append((q, length, witness, SolveStats()))
        stats.merge(solver.stats)
    else:
        outcomes = [_tsp_job((inst, q, cfg, engine)) for q in range(1, n)]

    best: Optional[tuple[float, tuple, Tour]] = None
    for q, length, witness, sub_stats in outcomes:
        stats.merge(sub_stats)
        if not math.isfinite(length) or witness is None:
            continue
        path = witness.paths[0]
        if path[0] != 0:
            path = path[::-1]
        t = Tour.canonical(path)
        total = tour_length(t, inst)
        key = tuple(t.edges())
        if (
            best is None
            or total < best[0] - cfg.epsilon_len
            or (total <= best[0] + cfg.epsilon_len and key < best[1])
        ):
            best = (total, key, t)
    stats.wall_time_s = time.perf_counter() - t0
    if best is None:
        return SolveResult(math.inf, None, stats)
    return SolveResult(best[0], best[2], stats)
