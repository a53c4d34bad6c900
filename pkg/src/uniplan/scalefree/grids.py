"""Lattice discretizations of continuous environments.

``grid_at_resolution(env, anchor, m)`` keeps the points anchor + 2**-m * Z^2
that lie in the open interior of free space; 4-adjacent kept points are
joined by an edge.  Membership is decided in exact integer arithmetic after
scaling every coordinate by a common denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm

import numpy as np
from scipy import ndimage

from ..errors import DegenerateEnvironment, InvalidArgument, ResourceLimitError
from .env import ContinuousEnv, Point, as_point

DEFAULT_NODE_LIMIT = 4_000_000
_FOUR = ndimage.generate_binary_structure(2, 1)
# int64 is exact while every squared distance stays below 2**62.
_INT64_SAFE = 1 << 30


@dataclass
class LatticeGrid:
    """Kept lattice points ``anchor + 2**-m * (i0 + a, j0 + b)`` for every
    True ``mask[a, b]``, plus the discretized goal set ``goal_mask``."""

    anchor: Point
    m: int
    i0: int
    j0: int
    mask: np.ndarray
    goal_mask: np.ndarray

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    def nodes(self) -> set[tuple[int, int]]:
        """Lattice offsets (i, j) from the anchor."""
        a, b = np.nonzero(self.mask)
        return {(int(i) + self.i0, int(j) + self.j0) for i, j in zip(a, b)}

    def goal_nodes(self) -> set[tuple[int, int]]:
        a, b = np.nonzero(self.goal_mask)
        return {(int(i) + self.i0, int(j) + self.j0) for i, j in zip(a, b)}

    def point(self, i: int, j: int) -> Point:
        s = Fraction(1, 2 ** self.m)
        return self.anchor[0] + i * s, self.anchor[1] + j * s

    def components(self) -> int:
        _, count = ndimage.label(self.mask, structure=_FOUR)
        return int(count)

    def _box(self):
        a, b = np.nonzero(self.mask)
        if a.size == 0:
            return None
        return a.min(), a.max() + 1, b.min(), b.max() + 1

    def canonical(self) -> tuple:
        """Translation-invariant key: the node mask trimmed to its bounding box."""
        box = self._box()
        if box is None:
            return ((0, 0), b"")
        a0, a1, b0, b1 = box
        sub = self.mask[a0:a1, b0:b1]
        return sub.shape, np.packbits(sub).tobytes()

    def canonical_with_goal(self) -> tuple:
        box = self._box()
        if box is None:
            return ((0, 0), b"", b"")
        a0, a1, b0, b1 = box
        return (self.mask[a0:a1, b0:b1].shape,
                np.packbits(self.mask[a0:a1, b0:b1]).tobytes(),
                np.packbits(self.goal_mask[a0:a1, b0:b1]).tobytes())

    def min_node(self) -> Point | None:
        """Absolute position of the lexicographically smallest node."""
        box = self._box()
        if box is None:
            return None
        a0 = box[0]
        b0 = int(np.nonzero(self.mask[a0])[0].min())
        return self.point(int(a0) + self.i0, b0 + self.j0)


def _floor_frac(q: Fraction) -> int:
    return q.numerator // q.denominator


def _ceil_frac(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def grid_at_resolution(env: ContinuousEnv, anchor, m: int,
                       limit: int = DEFAULT_NODE_LIMIT) -> LatticeGrid:
    if m < 0:
        raise InvalidArgument("resolution exponent m must be >= 0")
    anchor = as_point(anchor)
    if not env.in_interior(anchor):
        raise InvalidArgument(f"anchor {anchor} is not in the interior of free space")
    scale = 2 ** m
    ax, ay = anchor
    # open interval 0 < ax + i/scale < W
    i_lo = _floor_frac(-ax * scale) + 1
    i_hi = _ceil_frac((env.width - ax) * scale) - 1
    j_lo = _floor_frac(-ay * scale) + 1
    j_hi = _ceil_frac((env.height - ay) * scale) - 1
    ni, nj = i_hi - i_lo + 1, j_hi - j_lo + 1
    if ni * nj > limit:
        raise ResourceLimitError(f"lattice of {ni}x{nj} nodes exceeds limit {limit}")

    q = lcm(env.denominator(), ax.denominator, ay.denominator)
    big = q * scale  # integer coordinates X = point * big
    magnitude = max(env.width, env.height) * big * 2
    dtype = np.int64 if magnitude < _INT64_SAFE else object
    xs = np.array([int(ax * big) + i * q for i in range(i_lo, i_hi + 1)], dtype=dtype)
    ys = np.array([int(ay * big) + j * q for j in range(j_lo, j_hi + 1)], dtype=dtype)

    mask = np.ones((ni, nj), dtype=bool)
    for d in env.discs:
        dx = xs - int(d.cx * big)
        dy = ys - int(d.cy * big)
        r2 = int(d.r * big) ** 2
        mask &= (dx * dx)[:, None] + (dy * dy)[None, :] > r2
    gx = xs - int(env.goal[0] * big)
    gy = ys - int(env.goal[1] * big)
    g2 = int(env.goal_radius * big) ** 2
    goal_mask = mask & ((gx * gx)[:, None] + (gy * gy)[None, :] < g2)
    return LatticeGrid(anchor, m, i_lo, j_lo, np.asarray(mask, dtype=bool),
                       np.asarray(goal_mask, dtype=bool))


def is_connected_at(env: ContinuousEnv, anchor, m: int, limit: int = DEFAULT_NODE_LIMIT) -> bool:
    """True iff the lattice at resolution 2**-m through ``anchor`` is one component."""
    return grid_at_resolution(env, anchor, m, limit).components() <= 1


def _clearance_ok(env: ContinuousEnv, t: Fraction) -> bool:
    """Is t no larger than every radius, wall gap, disc gap, W and H?"""
    if t > env.width or t > env.height:
        return False
    for d in env.discs:
        if t > d.r:
            return False
        if min(d.cx - d.r, env.width - d.cx - d.r, d.cy - d.r, env.height - d.cy - d.r) < t:
            return False
    for a, b in combinations(env.discs, 2):
        # t <= |ca - cb| - ra - rb, squared exactly
        lhs = t + a.r + b.r
        if lhs * lhs > (a.cx - b.cx) ** 2 + (a.cy - b.cy) ** 2:
            return False
    return True


def check_degenerate(env: ContinuousEnv) -> None:
    for d in env.discs:
        if min(d.cx - d.r, env.width - d.cx - d.r, d.cy - d.r, env.height - d.cy - d.r) <= 0:
            raise DegenerateEnvironment(f"disc {d} touches the rectangle boundary")
    for a, b in combinations(env.discs, 2):
        if (a.r + b.r) ** 2 >= (a.cx - b.cx) ** 2 + (a.cy - b.cy) ** 2:
            raise DegenerateEnvironment(f"discs {a} and {b} touch or overlap")


def clearance(env: ContinuousEnv) -> float:
    """Approximate conservative clearance, for reports only."""
    check_degenerate(env)
    vals = [float(env.width), float(env.height)]
    for d in env.discs:
        vals += [float(d.r), float(d.cx - d.r), float(env.width - d.cx - d.r),
                 float(d.cy - d.r), float(env.height - d.cy - d.r)]
    for a, b in combinations(env.discs, 2):
        vals.append(math.dist((a.cx, a.cy), (b.cx, b.cy)) - float(a.r + b.r))
    return min(vals)


def estimate_sufficient_scaling(env: ContinuousEnv, r=None) -> int:
    """Smallest m >= 0 with 4 * 2**-m <= min(clearance, r).

    Clearance is the smallest of: disc radius, gap between two discs, gap
    between a disc and a wall, W and H.  Decided exactly, without forming
    the (irrational) clearance itself.
    """
    r = env.goal_radius if r is None else Fraction(r)
    if r <= 0:
        raise InvalidArgument("goal radius must be positive")
    check_degenerate(env)
    m = 0
    while True:
        t = Fraction(4, 2 ** m)
        if t <= r and _clearance_ok(env, t):
            return m
        m += 1


def fine_resolution(env: ContinuousEnv, limit: int = DEFAULT_NODE_LIMIT) -> int:
    """Resolution used for load-time connectivity checks."""
    try:
        m = estimate_sufficient_scaling(env) + 1
    except DegenerateEnvironment:
        m = 8
    while m > 0 and float(env.width * env.height) * 4 ** m > limit:
        m -= 1
    return m


def enumerate_grid_classes(env: ContinuousEnv, m: int, anchors) -> int:
    """Number of distinct grids, up to translation, among the sampled anchors."""
    return len({grid_at_resolution(env, a, m).canonical() for a in anchors})


def _same_resolution(a: LatticeGrid, b: LatticeGrid) -> None:
    if a.m != b.m:
        raise InvalidArgument("grids must share a resolution")


def goal_equivalent(a: LatticeGrid, b: LatticeGrid) -> bool:
    """Some translation maps grid a onto grid b and goal set onto goal set.

    Translations preserve lexicographic order, so the only candidate is the
    difference of the smallest nodes; comparing trimmed masks checks it.
    """
    _same_resolution(a, b)
    return a.canonical_with_goal() == b.canonical_with_goal()


def translation(a: LatticeGrid, b: LatticeGrid) -> Point | None:
    """The translation taking a's node set to b's, when one exists."""
    if a.canonical() != b.canonical():
        return None
    pa, pb = a.min_node(), b.min_node()
    if pa is None:
        return (Fraction(0), Fraction(0))
    return pb[0] - pa[0], pb[1] - pa[1]


def grid_search_equivalent(a: LatticeGrid, b: LatticeGrid) -> bool:
    """Goal-equivalent with the translation equal to the anchor difference."""
    if not goal_equivalent(a, b):
        return False
    z = translation(a, b)
    return z == (b.anchor[0] - a.anchor[0], b.anchor[1] - a.anchor[1])
