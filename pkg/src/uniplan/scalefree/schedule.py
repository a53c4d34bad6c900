"""Step-size schedule of the scale-free plan.

Segment k of the plan lasts L_w(k) stages.  L_w(1) = 1 and every later
segment is ceil(w * (number of stages so far)), so a fraction ~w of all
exploration time is spent in the newest segment.  Segments cycle through
exponents in triangular order, phi(k) = 0, 1, 0, 1, 2, 0, 1, 2, 3, ..., and
stage n moves with step 2**-phi(segment(n)).
"""

from __future__ import annotations

import bisect
import math
import threading
from fractions import Fraction
from typing import NamedTuple

from ..digits import ActionMap, DigitStream
from ..errors import InvalidArgument


def beta_phi(n: int) -> tuple[int, int]:
    """(beta_n, phi(n)): largest b with b(b+1)/2 <= n, and the remainder."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    b = (math.isqrt(8 * n + 1) - 1) // 2
    return b, n - b * (b + 1) // 2


def _as_fraction(w) -> Fraction:
    w = Fraction(w)
    if w <= 0:
        raise InvalidArgument("weight w must be positive")
    return w


class Schedule:
    """Memoized L_w table with cumulative sums.

    Lookups are lock-free once the table is long enough; extension is
    serialized.
    """

    def __init__(self, w=1):
        self.w = _as_fraction(w)
        self._lengths = [1]
        self._cumulative = [1]
        self._lock = threading.Lock()

    def _extend_to_segment(self, k: int) -> None:
        with self._lock:
            while len(self._lengths) < k:
                self._grow()

    def _extend_to_stage(self, n: int) -> None:
        with self._lock:
            while self._cumulative[-1] < n:
                self._grow()

    def _grow(self) -> None:
        total = self._cumulative[-1]
        nxt = -((-self.w.numerator * total) // self.w.denominator)  # exact ceiling
        self._lengths.append(nxt)
        self._cumulative.append(total + nxt)

    def length(self, k: int) -> int:
        """L_w(k)."""
        if k < 1:
            raise InvalidArgument("segment index must be >= 1")
        if k > len(self._lengths):
            self._extend_to_segment(k)
        return self._lengths[k - 1]

    def cumulative(self, k: int) -> int:
        """L_w(1) + ... + L_w(k); 0 for k = 0."""
        if k == 0:
            return 0
        self.length(k)
        return self._cumulative[k - 1]

    def eta(self, n: int) -> int:
        """Largest k whose cumulative length does not exceed n."""
        if n < 1:
            raise InvalidArgument("n must be >= 1")
        if self._cumulative[-1] <= n:
            self._extend_to_stage(n + 1)
        return bisect.bisect_right(self._cumulative, n)

    def segment(self, n: int) -> int:
        """Segment k holding stage n: C(k-1) < n <= C(k)."""
        if n < 1:
            raise InvalidArgument("n must be >= 1")
        if self._cumulative[-1] < n:
            self._extend_to_stage(n)
        return bisect.bisect_left(self._cumulative, n) + 1

    def exponent(self, n: int) -> int:
        """Step-size exponent m used at stage n (step length 2**-m)."""
        return beta_phi(self.segment(n))[1]

    def segments(self, first: int, count: int):
        """Yield (stage, run length, exponent) runs covering stages
        first .. first+count-1, split at segment boundaries."""
        n = first
        end = first + count
        while n < end:
            k = self.segment(n)
            stop = min(end, self.cumulative(k) + 1)
            yield n, stop - n, beta_phi(k)[1]
            n = stop


_schedules: dict[Fraction, Schedule] = {}


def schedule_for(w) -> Schedule:
    w = _as_fraction(w)
    if w not in _schedules:
        _schedules[w] = Schedule(w)
    return _schedules[w]


def L_w(n: int, w=1) -> int:
    return schedule_for(w).length(n)


def eta_w(n: int, w=1) -> int:
    return schedule_for(w).eta(n)


class ScaledAction(NamedTuple):
    exponent: int
    direction: tuple[int, int]

    @property
    def vector(self) -> tuple[Fraction, Fraction]:
        s = Fraction(1, 2 ** self.exponent)
        return s * self.direction[0], s * self.direction[1]


def gamma(schedule: Schedule, stream: DigitStream, amap: ActionMap | None, n: int) -> ScaledAction:
    """Action of stage n: 2**-phi(segment(n)) times the unit action of digit n."""
    amap = amap or ActionMap.default()
    return ScaledAction(schedule.exponent(n), amap(stream.digit(n)))
