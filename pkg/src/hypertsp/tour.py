"""Combinatorial layer: instances, matchings, path covers, tours.

Indices into the ambient instance are the combinatorial currency;
coordinates are only looked up through the instance.  Spacing is a
producer contract (the generators guarantee it); ``verify_spacing``
checks it explicitly rather than the constructor, so that slightly
violating instances remain representable for diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .geometry import (
    DegenerateSegmentsError,
    HLine,
    HSegment,
    PoincarePoint,
    hyp_distance,
    segments_cross,
    side_of_line,
)

Edge = tuple[int, int]


def _norm_edge(i: int, j: int) -> Edge:
    if i == j:
        raise ValueError(f"self-loop edge ({i}, {j})")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Instance:
    """An alpha-spaced point set with its declared spacing."""

    points: tuple[PoincarePoint, ...]
    alpha: float

    def __post_init__(self) -> None:
        if len(self.points) < 1:
            raise ValueError("instance needs at least one point")
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def n(self) -> int:
        return len(self.points)

    @cached_property
    def coords(self) -> np.ndarray:
        return np.array([(p.x, p.y) for p in self.points], dtype=float)

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        c = self.coords
        diff = c[:, None, :] - c[None, :, :]
        num = (diff * diff).sum(axis=2)
        w = 1.0 - (c * c).sum(axis=1)
        arg = 1.0 + 2.0 * num / (w[:, None] * w[None, :])
        np.clip(arg, 1.0, None, out=arg)
        return np.arccosh(arg)

    def distance(self, i: int, j: int) -> float:
        return hyp_distance(self.points[i], self.points[j])

    def segment(self, i: int, j: int) -> HSegment:
        return HSegment(self.points[i], self.points[j])


def min_spacing(inst: Instance) -> float:
    """Minimum pairwise distance, by exhaustive O(n^2) scan."""
    if inst.n < 2:
        raise ValueError("min_spacing needs at least two points")
    d = inst.distance_matrix.copy()
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def verify_spacing(inst: Instance) -> tuple[float, bool]:
    """(minimum pairwise distance, whether it meets the declared alpha)."""
    from .geometry import EPS_GEOM

    m = min_spacing(inst)
    return m, m >= inst.alpha - EPS_GEOM


@dataclass(frozen=True)
class Matching:
    """A set of pairwise-disjoint unordered index pairs."""

    pairs: tuple[Edge, ...]

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[int, int]]) -> "Matching":
        norm = sorted(_norm_edge(i, j) for i, j in pairs)
        seen: set[int] = set()
        for i, j in norm:
            if i in seen or j in seen:
                raise ValueError(f"matching pairs are not disjoint at ({i}, {j})")
            seen.update((i, j))
        return Matching(tuple(norm))

    def vertices(self) -> frozenset[int]:
        return frozenset(v for pair in self.pairs for v in pair)

    def __len__(self) -> int:
        return len(self.pairs)


EMPTY_MATCHING = Matching(())


@dataclass(frozen=True)
class SegmentSet:
    """A set of geodesic segments between instance points, as index pairs."""

    edges: frozenset[Edge]

    @staticmethod
    def from_edges(edges: Iterable[tuple[int, int]]) -> "SegmentSet":
        return SegmentSet(frozenset(_norm_edge(i, j) for i, j in edges))

    def length(self, inst: Instance) -> float:
        d = inst.distance_matrix
        return float(sum(d[i, j] for i, j in sorted(self.edges)))

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class PathCoverProblem:
    """(P, B, M): a point subset, boundary points, and a required matching."""

    instance: Instance
    p_sub: tuple[int, ...]
    b: frozenset[int]
    m: Matching

    @staticmethod
    def make(
        instance: Instance, p_sub: Iterable[int], b: Iterable[int], m: Matching
    ) -> "PathCoverProblem":
        p_tuple = tuple(sorted(set(p_sub)))
        b_set = frozenset(b)
        if not b_set <= set(p_tuple):
            raise ValueError("boundary set is not contained in the point subset")
        if len(b_set) % 2 != 0:
            raise ValueError("boundary set must have even size")
        if m.vertices() != b_set:
            raise ValueError("matching is not a perfect matching on the boundary set")
        return PathCoverProblem(instance, p_tuple, b_set, m)

    @staticmethod
    def tsp(instance: Instance, p: int, q: int) -> "PathCoverProblem":
        """The Hamiltonian-path subproblem used by the tour reduction."""
        return PathCoverProblem.make(
            instance, range(instance.n), (p, q), Matching.from_pairs([(p, q)])
        )


@dataclass(frozen=True)
class PathCover:
    """Vertex-disjoint paths; endpoints realize a matching on the boundary."""

    paths: tuple[tuple[int, ...], ...]

    @staticmethod
    def canonical(paths: Iterable[Sequence[int]]) -> "PathCover":
        fixed = []
        for path in paths:
            p = list(path)
            if p[-1] < p[0]:
                p.reverse()
            fixed.append(tuple(p))
        fixed.sort()
        return PathCover(tuple(fixed))

    def edges(self) -> frozenset[Edge]:
        out = set()
        for path in self.paths:
            for a, b in zip(path, path[1:]):
                out.add(_norm_edge(a, b))
        return frozenset(out)

    def vertices(self) -> frozenset[int]:
        return frozenset(v for path in self.paths for v in path)

    def endpoint_matching(self) -> Matching:
        return Matching.from_pairs((path[0], path[-1]) for path in self.paths)


@dataclass(frozen=True)
class Tour:
    """A cyclic visiting order of all instance points."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("tour order is not a permutation of 0..n-1")

    @staticmethod
    def canonical(order: Sequence[int]) -> "Tour":
        """Rotate to start at 0 and orient so the second entry is smaller."""
        order = list(order)
        k = order.index(0)
        order = order[k:] + order[:k]
        if len(order) > 2 and order[-1] < order[1]:
            order = [order[0]] + order[1:][::-1]
        return Tour(tuple(order))

    def edges(self) -> list[Edge]:
        n = len(self.order)
        return sorted(_norm_edge(self.order[i], self.order[(i + 1) % n]) for i in range(n))


def tour_length(t: Tour, inst: Instance) -> float:
    """Cyclic sum of consecutive distances, in canonical edge order."""
    if len(t.order) == 1:
        return 0.0
    d = inst.distance_matrix
    return float(sum(d[i, j] for i, j in t.edges()))


def path_cover_length(pc: PathCover, inst: Instance) -> float:
    """Sum of edge lengths over all paths, in canonical edge order."""
    d = inst.distance_matrix
    return float(sum(d[i, j] for i, j in sorted(pc.edges())))


def trace_paths(
    edges: Iterable[Edge], b: frozenset[int] | set[int], m: Matching
) -> Optional[list[tuple[int, ...]]]:
    """Decompose an edge set into boundary-to-boundary paths matching m.

    Returns the paths, or None when the edge set is not a disjoint union
    of simple paths whose endpoints are exactly the boundary points,
    paired as m requires.
    """
    adj: dict[int, list[int]] = {}
    for i, j in set(edges):
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)

    for v, nbrs in adj.items():
        want = 1 if v in b else 2
        if len(nbrs) != want:
            return None
    for v in b:
        if v not in adj:
            return None

    paths = []
    visited: set[int] = set()
    for start in sorted(b):
        if start in visited:
            continue
        path = [start]
        visited.add(start)
        prev, cur = None, start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            if cur in visited:
                return None
            visited.add(cur)
            path.append(cur)
            if cur in b:
                break
        if path[-1] not in b or len(path) < 2:
            return None
        paths.append(tuple(path))
    if visited != set(adj):
        return None  # leftover components are cycles
    want = {tuple(sorted((p[0], p[-1]))) for p in paths}
    if want != set(m.pairs) or len(paths) != len(m.pairs):
        return None
    return paths


def realizes(union_edges: SegmentSet | Iterable[Edge], b: Iterable[int], m: Matching) -> bool:
    """Whether an edge set realizes the matching m on the boundary set b."""
    edges = union_edges.edges if isinstance(union_edges, SegmentSet) else union_edges
    b_set = frozenset(b)
    if not b_set and not m.pairs:
        return not set(edges)
    return trace_paths(edges, b_set, m) is not None


class DegreeViolationError(ValueError):
    """An edge set exceeds the degree caps for a split."""


def uncovered_split(
    inst: Instance,
    p_sub: Sequence[int],
    b: Iterable[int],
    s: SegmentSet,
    line: HLine,
) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Split the uncovered points by the separating line.

    Returns (P1, B1, P2, B2): uncovered points strictly on each side, and
    on each side the new boundary points (boundary points still missing
    their single edge, or interior points already holding one edge).
    """
    b_set = frozenset(b)
    deg: dict[int, int] = {v: 0 for v in p_sub}
    for i, j in s.edges:
        if i in deg:
            deg[i] += 1
        if j in deg:
            deg[j] += 1
    for v in p_sub:
        cap = 1 if v in b_set else 2
        if deg[v] > cap:
            raise DegreeViolationError(f"vertex {v} has degree {deg[v]} > {cap}")

    p1, b1, p2, b2 = [], [], [], []
    for v in p_sub:
        cap = 1 if v in b_set else 2
        if deg[v] >= cap:
            continue  # covered
        side = side_of_line(inst.points[v], line)
        if side == 0:
            raise DegreeViolationError(f"uncovered vertex {v} lies on the separating line")
        bucket_p, bucket_b = (p1, b1) if side > 0 else (p2, b2)
        bucket_p.append(v)
        boundary = (v in b_set and deg[v] == 0) or (v not in b_set and deg[v] == 1)
        if boundary:
            bucket_b.append(v)
    return tuple(p1), tuple(b1), tuple(p2), tuple(b2)


def tour_is_noncrossing(t: Tour, inst: Instance) -> bool:
    """True iff no two non-adjacent tour segments cross.

    Collinear overlapping segment pairs count as crossings: the tour
    geometrically self-intersects either way.
    """
    n = len(t.order)
    if n < 3:
        raise ValueError("noncrossing test needs at least three points")
    segs = [
        (t.order[i], t.order[(i + 1) % n], inst.segment(t.order[i], t.order[(i + 1) % n]))
        for i in range(n)
    ]
    for i in range(n):
        for j in range(i + 1, n):
            a1, b1, s1 = segs[i]
            a2, b2, s2 = segs[j]
            if len({a1, b1, a2, b2}) < 4:
                continue  # adjacent in the tour
            try:
                if segments_cross(s1, s2):
                    return False
            except DegenerateSegmentsError:
                return False
    return True
