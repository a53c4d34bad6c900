"""Continuous planar environments: a rectangle minus open discs.

All geometry is exact rational arithmetic.  Free space is closed (disc
boundaries and rectangle edges belong to it); its interior excludes them.

File format, one directive per line, ``#`` starts a comment::

    rect  W H          # rationals like 4 or 7/2
    disc  cx cy r      # any number of obstacle discs
    goal  gx gy r      # goal centre and radius (open ball)
    start x y          # optional, any number
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path

from ..errors import DisconnectedEnvironmentError, InvalidArgument, ParseError

Point = tuple[Fraction, Fraction]


def rational(text) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}") from exc


def as_point(p) -> Point:
    return Fraction(p[0]), Fraction(p[1])


@dataclass(frozen=True)
class Disc:
    cx: Fraction
    cy: Fraction
    r: Fraction

    def __post_init__(self):
        for name in ("cx", "cy", "r"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.r <= 0:
            raise InvalidArgument("disc radius must be positive")

    def dist2(self, p: Point) -> Fraction:
        return (p[0] - self.cx) ** 2 + (p[1] - self.cy) ** 2


@dataclass(frozen=True)
class ContinuousEnv:
    width: Fraction
    height: Fraction
    discs: tuple = ()
    goal: Point = (Fraction(1, 2), Fraction(1, 2))
    goal_radius: Fraction = Fraction(1, 4)
    starts: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "width", Fraction(self.width))
        object.__setattr__(self, "height", Fraction(self.height))
        object.__setattr__(self, "goal", as_point(self.goal))
        object.__setattr__(self, "goal_radius", Fraction(self.goal_radius))
        object.__setattr__(self, "discs", tuple(
            d if isinstance(d, Disc) else Disc(*d) for d in self.discs))
        object.__setattr__(self, "starts", tuple(as_point(s) for s in self.starts))
        if self.width <= 0 or self.height <= 0:
            raise InvalidArgument("rectangle must have positive width and height")
        if self.goal_radius <= 0:
            raise InvalidArgument("goal radius must be positive")
        for d in self.discs:
            if (d.cx - d.r < 0 or d.cx + d.r > self.width
                    or d.cy - d.r < 0 or d.cy + d.r > self.height):
                raise InvalidArgument(f"disc {d} does not lie within the rectangle")
        if not self.in_interior(self.goal):
            raise InvalidArgument("goal centre must lie in the interior of free space")
        for s in self.starts:
            if not self.in_interior(s):
                raise InvalidArgument(f"start {s} is not in the interior of free space")

    def contains(self, p) -> bool:
        """Closed free-space membership."""
        x, y = p
        if not (0 <= x <= self.width and 0 <= y <= self.height):
            return False
        return all(d.dist2((x, y)) >= d.r * d.r for d in self.discs)

    def in_interior(self, p) -> bool:
        x, y = p
        if not (0 < x < self.width and 0 < y < self.height):
            return False
        return all(d.dist2((x, y)) > d.r * d.r for d in self.discs)

    def in_goal(self, p) -> bool:
        """Open goal ball intersected with the interior."""
        gx, gy = self.goal
        inside = (p[0] - gx) ** 2 + (p[1] - gy) ** 2 < self.goal_radius ** 2
        return inside and self.in_interior(p)

    def denominator(self) -> int:
        """Common denominator of every coordinate and radius."""
        vals = [self.width, self.height, self.goal_radius, *self.goal]
        for d in self.discs:
            vals += [d.cx, d.cy, d.r]
        return lcm(*(v.denominator for v in vals))

    def check_connected(self) -> None:
        """Raise unless a fine lattice through the goal centre is connected."""
        from .grids import fine_resolution, is_connected_at
        m = fine_resolution(self)
        if not is_connected_at(self, self.goal, m):
            raise DisconnectedEnvironmentError(
                f"free space lattice at resolution 2^-{m} is disconnected")


def parse_continuous_env(text: str, check: bool = True) -> ContinuousEnv:
    rect = None
    discs, starts = [], []
    goal = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *vals = line.split()
        want = {"rect": 2, "disc": 3, "goal": 3, "start": 2}.get(key)
        if want is None:
            raise ParseError(f"line {lineno}: unknown directive {key!r}")
        if len(vals) != want:
            raise ParseError(f"line {lineno}: {key} takes {want} values")
        nums = [rational(v) for v in vals]
        if key == "rect":
            rect = nums
        elif key == "disc":
            discs.append(Disc(*nums))
        elif key == "goal":
            goal = nums
        else:
            starts.append(tuple(nums))
    if rect is None:
        raise ParseError("missing 'rect W H' line")
    if goal is None:
        raise ParseError("missing 'goal gx gy r' line")
    env = ContinuousEnv(rect[0], rect[1], tuple(discs), (goal[0], goal[1]), goal[2], tuple(starts))
    if check:
        env.check_connected()
    return env


def load_continuous_env(path: str | Path, check: bool = True) -> ContinuousEnv:
    return parse_continuous_env(Path(path).read_text(), check=check)


def format_continuous_env(env: ContinuousEnv) -> str:
    lines = [f"rect {env.width} {env.height}"]
    lines += [f"disc {d.cx} {d.cy} {d.r}" for d in env.discs]
    lines.append(f"goal {env.goal[0]} {env.goal[1]} {env.goal_radius}")
    lines += [f"start {s[0]} {s[1]}" for s in env.starts]
    return "\n".join(lines) + "\n"


def is_continuous_env_text(text: str) -> bool:
    return any(line.split("#", 1)[0].split()[:1] == ["rect"] for line in text.splitlines())
