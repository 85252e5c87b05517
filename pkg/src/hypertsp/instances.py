"""Generators for alpha-spaced point sets.

Random instances are sampled uniformly in hyperbolic area (radius CDF
proportional to sinh^2(r/2)) inside a disk generously sized for the
requested packing, with rejection to enforce the spacing.  Regular
n-gons and the grid-like hypercycle embedding are constructed in closed
form.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .geometry import (
    BOUNDARY_GUARD,
    GeometryError,
    HLine,
    PoincarePoint,
    hyp_distance,
    hypercycle_point,
    line_point_at,
)
from .tour import Instance

_MAX_REJECTIONS = 10**6

# hyperbolic radius at which Poincare coordinates hit the rim guard
_RADIUS_CAP = 2.0 * math.atanh(1.0 - 1.05 * BOUNDARY_GUARD)


class GenerationError(RuntimeError):
    """A generator could not produce a valid instance."""


def sampling_radius(n: int, alpha: float) -> float:
    """Disk radius for rejection sampling: packing radius for n spacing
    disks, doubled, capped at the representable rim."""
    r0 = 2.0 * math.asinh(2.0 * math.sqrt(n) * math.sinh(alpha / 4.0))
    return min(2.0 * r0, _RADIUS_CAP)


def gen_random_alpha_spaced(n: int, alpha: float, seed: int) -> Instance:
    """n points with pairwise distance >= alpha, deterministic per seed."""
    if n < 1:
        raise GenerationError(f"n must be positive, got {n}")
    if not alpha > 0.0:
        raise GenerationError(f"alpha must be positive, got {alpha}")
    rng = random.Random(seed)
    radius = sampling_radius(n, alpha)
    sinh_half = math.sinh(radius / 2.0)
    cosh_alpha = math.cosh(alpha)

    accepted: list[tuple[float, float]] = []
    rejections = 0
    while len(accepted) < n:
        r = 2.0 * math.asinh(sinh_half * math.sqrt(rng.random()))
        theta = 2.0 * math.pi * rng.random()
        e = math.tanh(r / 2.0)
        x, y = e * math.cos(theta), e * math.sin(theta)
        if accepted:
            arr = np.asarray(accepted)
            dx = arr[:, 0] - x
            dy = arr[:, 1] - y
            w = 1.0 - (arr * arr).sum(axis=1)
            arg = 1.0 + 2.0 * (dx * dx + dy * dy) / (w * (1.0 - (x * x + y * y)))
            if arg.min() < cosh_alpha:
                rejections += 1
                if rejections > _MAX_REJECTIONS:
                    raise GenerationError(
                        f"rejection sampling stalled after {_MAX_REJECTIONS} attempts "
                        f"(n={n}, alpha={alpha}); a larger sampling radius is needed"
                    )
                continue
        accepted.append((x, y))
    return Instance(tuple(PoincarePoint(x, y) for x, y in accepted), alpha)


def gen_regular_ngon(n: int, side: float) -> Instance:
    """Regular n-gon centered at the origin with the given side length."""
    if n < 3:
        raise GenerationError(f"n-gon needs n >= 3, got {n}")
    if not side > 0.0:
        raise GenerationError(f"side must be positive, got {side}")
    step = 2.0 * math.pi / n
    cos_step = math.cos(step)

    def side_at(r: float) -> float:
        ch, sh = math.cosh(r), math.sinh(r)
        return math.acosh(max(ch * ch - sh * sh * cos_step, 1.0))

    lo, hi = 0.0, 1.0
    while side_at(hi) < side:
        hi *= 2.0
        if hi > _RADIUS_CAP:
            raise GenerationError(f"n-gon of side {side} is not representable")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if side_at(mid) < side:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    e = math.tanh(r / 2.0)
    pts = tuple(
        PoincarePoint(e * math.cos(k * step), e * math.sin(k * step)) for k in range(n)
    )
    inst = Instance(pts, side)
    got = hyp_distance(pts[0], pts[1])
    if abs(got - side) > 1e-9:
        raise GenerationError(f"n-gon side converged to {got}, wanted {side}")
    return inst


@dataclass(frozen=True)
class GridEmbedding:
    """n x n grid on hypercycles over a base line.

    Rows i = 0..n-1 sit at distance i*c*alpha from the base line (row 0
    on the line itself); columns follow perpendiculars through equally
    spaced feet.  Vertical neighbors are exactly c*alpha apart; row-i
    horizontal neighbors are joined by hypercycle arcs of length
    c*alpha*cosh(i*c*alpha).
    """

    n: int
    c: float
    alpha: float
    base_line: HLine
    perp_lines: tuple[HLine, ...]
    hypercycle_offsets: tuple[float, ...]
    foot_params: tuple[float, ...]
    points: dict[tuple[int, int], PoincarePoint]

    def spacing(self) -> float:
        return self.c * self.alpha

    def point(self, i: int, j: int) -> PoincarePoint:
        return self.points[(i, j)]

    def horizontal_arc_length(self, i: int, j: int) -> float:
        """Arc length between (i, j) and (i, j+1) along the row hypercycle."""
        ds = abs(self.foot_params[j + 1] - self.foot_params[j])
        return ds * math.cosh(self.hypercycle_offsets[i])

    def to_instance(self) -> Instance:
        pts = tuple(self.points[(i, j)] for i in range(self.n) for j in range(self.n))
        return Instance(pts, self.spacing())

    def iter_indices(self) -> Iterator[tuple[int, int]]:
        for i in range(self.n):
            for j in range(self.n):
                yield (i, j)


def gen_grid_like(n: int, c: float, alpha: float) -> GridEmbedding:
    """Build the grid embedding; raises if points leave the representable disk."""
    if n < 2:
        raise GenerationError(f"grid needs n >= 2, got {n}")
    if not (c > 0.0 and alpha > 0.0):
        raise GenerationError("grid needs positive c and alpha")
    spacing = c * alpha
    base = HLine.from_ideal_points((-1.0, 0.0), (1.0, 0.0))
    feet = tuple((j - (n - 1) / 2.0) * spacing for j in range(n))
    offsets = tuple(i * spacing for i in range(n))

    points: dict[tuple[int, int], PoincarePoint] = {}
    try:
        for i, off in enumerate(offsets):
            for j, s in enumerate(feet):
                if off == 0.0:
                    points[(i, j)] = line_point_at(base, s)
                else:
                    points[(i, j)] = hypercycle_point(base, s, off, 1)
    except GeometryError as exc:
        raise GenerationError(f"grid point left the representable disk: {exc}") from exc

    perps = []
    for s in feet:
        ch = math.cosh(s)
        th = math.tanh(s)
        sech = 1.0 / ch
        perps.append(HLine.from_ideal_points((th, sech), (th, -sech)))

    return GridEmbedding(
        n=n,
        c=c,
        alpha=alpha,
        base_line=base,
        perp_lines=tuple(perps),
        hypercycle_offsets=offsets,
        foot_params=feet,
        points=points,
    )
