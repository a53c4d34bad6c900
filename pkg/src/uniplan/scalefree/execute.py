"""Exact execution of multi-scale plans in continuous environments.

Positions are kept as integers in a frame ``origin + unit * (X, Y) / 2**D``.
When a step finer than 2**-D is needed the frame is refined (D grows and
X, Y are shifted), so no rounding ever happens.  Every membership and goal
test is an integer comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from ..digits import ActionMap, DigitStream
from ..errors import InvalidArgument, InvalidState, ResourceLimitError
from .env import ContinuousEnv, Point, as_point
from .schedule import Schedule, schedule_for

CHUNK = 1 << 14


@dataclass(frozen=True)
class DyadicPoint:
    """anchor + (mx, my) * 2**-exp, with exact arithmetic."""

    anchor: Point
    mx: int = 0
    my: int = 0
    exp: int = 0

    def moved(self, direction, m: int) -> "DyadicPoint":
        """This point plus 2**-m times a unit direction."""
        if m < 0:
            raise InvalidArgument("exponent must be >= 0")
        exp = max(self.exp, m)
        shift = exp - self.exp
        step = 1 << (exp - m)
        return DyadicPoint(self.anchor, (self.mx << shift) + direction[0] * step,
                           (self.my << shift) + direction[1] * step, exp)

    def value(self) -> Point:
        s = Fraction(1, 1 << self.exp)
        return self.anchor[0] + self.mx * s, self.anchor[1] + self.my * s

    def __eq__(self, other):
        if not isinstance(other, DyadicPoint):
            return NotImplemented
        return self.value() == other.value()

    def __hash__(self):
        return hash(self.value())


def step_continuous(env: ContinuousEnv, p: DyadicPoint, direction, m: int) -> DyadicPoint:
    """Move by 2**-m * direction when the endpoint is free, else stay."""
    if not env.contains(p.value()):
        raise InvalidState(f"{p.value()} is not in free space")
    q = p.moved(direction, m)
    return q if env.contains(q.value()) else p


class _Frame:
    """Integer view of the environment at refinement level D."""

    def __init__(self, env: ContinuousEnv, origin: Point, unit: Fraction):
        self.env = env
        self.origin = origin
        self.unit = unit
        q = lcm(env.denominator(), origin[0].denominator, origin[1].denominator,
                unit.denominator)
        self.q = q
        self.U = int(unit * q)
        self.D = 0
        self.X = 0
        self.Y = 0
        self._rebuild()

    def _rebuild(self) -> None:
        env, q, s = self.env, self.q, 1 << self.D
        # absolute coordinate * q * 2**D == base + U * X
        self.bx = int(self.origin[0] * q) * s
        self.by = int(self.origin[1] * q) * s
        self.W = int(env.width * q) * s
        self.H = int(env.height * q) * s
        self.discs = [(int(d.cx * q) * s, int(d.cy * q) * s, (int(d.r * q) * s) ** 2)
                      for d in env.discs]
        gx, gy = env.goal
        self.goal = (int(gx * q) * s, int(gy * q) * s, (int(env.goal_radius * q) * s) ** 2)

    def refine(self, m: int) -> None:
        if m > self.D:
            shift = m - self.D
            self.X <<= shift
            self.Y <<= shift
            self.D = m
            self._rebuild()

    def _abs(self, X: int, Y: int) -> tuple[int, int]:
        return self.bx + self.U * X, self.by + self.U * Y

    def free(self, X: int, Y: int) -> bool:
        px, py = self._abs(X, Y)
        if px < 0 or py < 0 or px > self.W or py > self.H:
            return False
        for cx, cy, r2 in self.discs:
            dx, dy = px - cx, py - cy
            if dx * dx + dy * dy < r2:
                return False
        return True

    def interior(self, X: int, Y: int) -> bool:
        px, py = self._abs(X, Y)
        if px <= 0 or py <= 0 or px >= self.W or py >= self.H:
            return False
        for cx, cy, r2 in self.discs:
            dx, dy = px - cx, py - cy
            if dx * dx + dy * dy <= r2:
                return False
        return True

    def in_goal(self, X: int, Y: int) -> bool:
        px, py = self._abs(X, Y)
        gx, gy, g2 = self.goal
        dx, dy = px - gx, py - gy
        return dx * dx + dy * dy < g2 and self.interior(X, Y)

    def step(self, direction, m: int) -> bool:
        """Try to move by unit * 2**-m * direction; return True if blocked."""
        if m > self.D:
            self.refine(m)
        d = 1 << (self.D - m)
        nx, ny = self.X + direction[0] * d, self.Y + direction[1] * d
        if self.free(nx, ny):
            self.X, self.Y = nx, ny
            return False
        return True

    def point(self, X: int, Y: int, D: int) -> Point:
        s = self.unit / (1 << D)
        return self.origin[0] + X * s, self.origin[1] + Y * s


@dataclass
class ContinuousTrace:
    """Executed continuous plan.

    ``positions[i]`` is ``(X, Y, D)``: the point origin + unit*(X, Y)/2**D.
    ``exponents[i]`` is the step exponent used by step i, with the actual
    step length being ``unit * 2**-exponents[i]``.
    """

    origin: Point
    unit: Fraction
    positions: list = field(default_factory=list)
    directions: list = field(default_factory=list)
    exponents: list = field(default_factory=list)
    blocked: list = field(default_factory=list)
    outcome: str = "budget"
    steps: int = 0
    offset: int = 1
    final: tuple = (0, 0, 0)

    @property
    def reached_goal(self) -> bool:
        return self.outcome == "goal"

    def point(self, i: int) -> Point:
        X, Y, D = self.positions[i]
        s = self.unit / (1 << D)
        return self.origin[0] + X * s, self.origin[1] + Y * s

    def points(self) -> list[Point]:
        return [self.point(i) for i in range(len(self.positions))]

    def final_point(self) -> Point:
        X, Y, D = self.final
        s = self.unit / (1 << D)
        return self.origin[0] + X * s, self.origin[1] + Y * s


def _check_start(env: ContinuousEnv, x_init) -> Point:
    x_init = as_point(x_init)
    if not env.in_interior(x_init):
        raise InvalidArgument(f"start {x_init} is not in the interior of free space")
    return x_init


def _digits(stream: DigitStream, start: int, count: int):
    n = stream.available(start, count)
    if n == 0:
        raise ResourceLimitError(f"{stream.describe()} has no digit at index {start}")
    return stream.block(start, n).tolist()


def execute_scalefree(env: ContinuousEnv, x_init, stream: DigitStream,
                      amap: ActionMap | None = None, w=1, offset: int = 1,
                      max_steps: int = 10**6, record: bool = True) -> ContinuousTrace:
    """Stage n (n = offset, offset+1, ...) moves 2**-m(n) * c(digit n), where
    m(n) is the schedule exponent of stage n.  Stops on entering the open
    goal ball or after ``max_steps`` stages."""
    if max_steps < 0:
        raise InvalidArgument("max_steps must be >= 0")
    x_init = _check_start(env, x_init)
    amap = amap or ActionMap.default()
    dirs = [amap.table.get(d) for d in range(stream.base)]
    schedule = schedule_for(w) if not isinstance(w, Schedule) else w
    frame = _Frame(env, x_init, Fraction(1))
    trace = ContinuousTrace(x_init, Fraction(1), offset=offset)
    if record:
        trace.positions.append((0, 0, 0))
    if frame.in_goal(0, 0):
        trace.outcome = "goal"
        return trace
    done = 0
    for first, run, m in schedule.segments(offset, max_steps):
        pos = 0
        while pos < run:
            digits = _digits(stream, first + pos, min(CHUNK, run - pos))
            for d in digits:
                u = dirs[d]
                if u is None:
                    raise InvalidArgument(f"digit {d} outside action map domain")
                hit = frame.step(u, m)
                done += 1
                if record:
                    trace.positions.append((frame.X, frame.Y, frame.D))
                    trace.directions.append(u)
                    trace.exponents.append(m)
                    trace.blocked.append(hit)
                if not hit and frame.in_goal(frame.X, frame.Y):
                    trace.outcome = "goal"
                    trace.steps = done
                    trace.final = (frame.X, frame.Y, frame.D)
                    return trace
            pos += len(digits)
    trace.steps = done
    trace.final = (frame.X, frame.Y, frame.D)
    return trace


def execute_adaptive(env: ContinuousEnv, x_init, stream: DigitStream,
                     amap: ActionMap | None = None, offset: int = 1,
                     max_steps: int = 10**6, record: bool = True) -> ContinuousTrace:
    """Two digits per iteration: the first picks the direction, the second
    rescales the step (0, 1, 2 double it up to the initial W/2; 3 halves it).

    The move of an iteration uses the size in force when the iteration
    starts; the size digit takes effect from the next iteration.
    """
    if max_steps < 0:
        raise InvalidArgument("max_steps must be >= 0")
    x_init = _check_start(env, x_init)
    amap = amap or ActionMap.default()
    dirs = [amap.table.get(d) for d in range(stream.base)]
    unit = env.width / 2
    frame = _Frame(env, x_init, unit)
    trace = ContinuousTrace(x_init, unit, offset=offset)
    if record:
        trace.positions.append((0, 0, 0))
    if frame.in_goal(0, 0):
        trace.outcome = "goal"
        return trace
    m = 0
    done = 0
    index = offset
    while done < max_steps:
        want = 2 * min(CHUNK, max_steps - done)
        digits = _digits(stream, index, want)
        if len(digits) < 2:
            raise ResourceLimitError(f"{stream.describe()} ran out at index {index + len(digits)}")
        for t in range(0, len(digits) - 1, 2):
            u = dirs[digits[t]]
            if u is None:
                raise InvalidArgument(f"digit {digits[t]} outside action map domain")
            hit = frame.step(u, m)
            done += 1
            if record:
                trace.positions.append((frame.X, frame.Y, frame.D))
                trace.directions.append(u)
                trace.exponents.append(m)
                trace.blocked.append(hit)
            m = m + 1 if digits[t + 1] == 3 else max(m - 1, 0)
            if not hit and frame.in_goal(frame.X, frame.Y):
                trace.outcome = "goal"
                trace.steps = done
                trace.final = (frame.X, frame.Y, frame.D)
                return trace
        index += len(digits) - len(digits) % 2
    trace.steps = done
    trace.final = (frame.X, frame.Y, frame.D)
    return trace
