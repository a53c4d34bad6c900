"""Deterministic digit sources and the digit -> action map.

Every source is a pure function of (kind, base, index): ``digit(n)`` for a
1-based index ``n`` never depends on what was read before.  Bulk reads via
``DigitStream.block`` return numpy arrays so that executors can consume
millions of digits without a Python call per digit.

Pseudorandom baseline
---------------------
``pseudorandom_digit(seed, base, n)`` is a stateless counter generator::

    x = (seed XOR n) mod 2**64
    z = splitmix64(x)
    while z >= 2**64 - (2**64 mod base):
        z = splitmix64(z)
    digit = z mod base

with the standard SplitMix64 step::

    z = (x + 0x9E3779B97F4A7C15) mod 2**64
    z = ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    z = z XOR (z >> 31)

The loop is a rejection step that removes modulo bias; for power-of-two
bases it never iterates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np

from . import pi4
from .errors import InvalidArgument, ResourceLimitError

KINDS = ("champernowne", "pi4", "pseudorandom", "file")

LEFT = (-1, 0)
RIGHT = (1, 0)
UP = (0, 1)
DOWN = (0, -1)
# Action index order used by the transition tables everywhere.
ACTIONS = (LEFT, RIGHT, UP, DOWN)
ACTION_NAMES = {LEFT: "left", RIGHT: "right", UP: "up", DOWN: "down"}
ACTION_SYMBOLS = {LEFT: "L", RIGHT: "R", UP: "U", DOWN: "D"}

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


# -- Champernowne ---------------------------------------------------------

def _locate(base: int, n: int) -> tuple[int, int, int]:
    """Return (numeral length L, value, digit position) for 1-based index n."""
    pos = n - 1
    length, count = 1, base
    while pos >= length * count:
        pos -= length * count
        length += 1
        count = (base - 1) * base ** (length - 1)
    first = 0 if length == 1 else base ** (length - 1)
    return length, first + pos // length, pos % length


def champernowne_digit(base: int, n: int) -> int:
    """n-th symbol of the base-``base`` numerals 0, 1, 2, ... concatenated."""
    if base < 2:
        raise InvalidArgument(f"base must be >= 2, got {base}")
    if n < 1:
        raise InvalidArgument(f"index must be >= 1, got {n}")
    length, value, idx = _locate(base, n)
    return (value // base ** (length - 1 - idx)) % base


def champernowne_block(base: int, start: int, count: int) -> np.ndarray:
    if base < 2:
        raise InvalidArgument(f"base must be >= 2, got {base}")
    if start < 1:
        raise InvalidArgument(f"index must be >= 1, got {start}")
    out = np.empty(count, dtype=np.uint8 if base <= 256 else np.int64)
    filled = 0
    n = start
    while filled < count:
        length, value, idx = _locate(base, n)
        last = base ** length - 1
        need = count - filled
        # numerals of this length still required, including the partial first one
        k = min(last - value + 1, (idx + need + length - 1) // length)
        values = np.arange(value, value + k, dtype=np.int64)
        powers = base ** np.arange(length - 1, -1, -1, dtype=np.int64)
        chunk = ((values[:, None] // powers[None, :]) % base).reshape(-1)
        chunk = chunk[idx:idx + need]
        out[filled:filled + chunk.size] = chunk
        filled += chunk.size
        n += chunk.size
    return out


# -- pseudorandom ---------------------------------------------------------

def _splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def _check_prng_base(base: int) -> None:
    if not 2 <= base <= 256:
        raise InvalidArgument(f"pseudorandom base must be in [2, 256], got {base}")


def pseudorandom_digit(seed: int, base: int, n: int) -> int:
    _check_prng_base(base)
    limit = (1 << 64) - (1 << 64) % base
    z = _splitmix64((seed ^ n) & _MASK64)
    while z >= limit:
        z = _splitmix64(z)
    return z % base


def _splitmix64_array(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))


def pseudorandom_block(seed: int, base: int, start: int, count: int) -> np.ndarray:
    _check_prng_base(base)
    idx = np.arange(start, start + count, dtype=np.uint64)
    z = _splitmix64_array(idx ^ np.uint64(seed & _MASK64))
    limit = (1 << 64) - (1 << 64) % base
    if limit != 1 << 64:
        bad = np.nonzero(z >= np.uint64(limit))[0]
        while bad.size:
            z[bad] = _splitmix64_array(z[bad])
            bad = bad[z[bad] >= np.uint64(limit)]
    return (z % np.uint64(base)).astype(np.uint8)


# -- file-backed ----------------------------------------------------------

def read_digit_file(path: str | Path, base: int) -> np.ndarray:
    """Digits from a text file, one character each; whitespace is ignored."""
    text = "".join(Path(path).read_text().split())
    vals = []
    for ch in text:
        try:
            d = int(ch, 36)
        except ValueError:
            raise InvalidArgument(f"{path}: not a digit character {ch!r}") from None
        if d >= base:
            raise InvalidArgument(f"{path}: digit {ch!r} out of range for base {base}")
        vals.append(d)
    return np.array(vals, dtype=np.uint8)


# -- stream ---------------------------------------------------------------

@dataclass(frozen=True)
class DigitStream:
    """An immutable, indexable digit source.

    ``kind`` is one of champernowne, pi4, pseudorandom, file.  ``seed`` is
    used by pseudorandom, ``path``/``data`` by file.  Streams can be shared
    freely; reading position is carried by separate ``DigitCursor`` objects.
    """

    kind: str
    base: int = 4
    seed: int = 0
    path: str | None = None
    data: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown digit source {self.kind!r}")
        if self.base < 2:
            raise InvalidArgument(f"base must be >= 2, got {self.base}")
        if self.kind == "pi4" and self.base != 4:
            raise InvalidArgument("pi digits are only available in base 4")
        if self.kind == "pseudorandom":
            _check_prng_base(self.base)
        if self.kind == "file" and self.data is None:
            if self.path is None:
                raise InvalidArgument("file stream needs a path or data")
            object.__setattr__(self, "data", read_digit_file(self.path, self.base))

    @classmethod
    def champernowne(cls, base: int = 4) -> "DigitStream":
        return cls("champernowne", base)

    @classmethod
    def pi(cls) -> "DigitStream":
        return cls("pi4", 4)

    @classmethod
    def pseudorandom(cls, seed: int = 0, base: int = 4) -> "DigitStream":
        return cls("pseudorandom", base, seed=seed)

    @classmethod
    def from_string(cls, text: str, base: int = 4) -> "DigitStream":
        """File-kind stream backed by an in-memory digit string."""
        data = np.array([int(c, 36) for c in text if not c.isspace()], dtype=np.uint8)
        if data.size and int(data.max()) >= base:
            raise InvalidArgument(f"digit out of range for base {base}")
        return cls("file", base, path="<string>", data=data)

    @property
    def length(self) -> int | None:
        """Number of available digits, None when unbounded."""
        if self.kind == "file":
            return int(self.data.size)
        if self.kind == "pi4":
            return pi4.shared_table().max_digits
        return None

    def digit(self, n: int) -> int:
        if n < 1:
            raise InvalidArgument(f"index must be >= 1, got {n}")
        if self.kind == "champernowne":
            return champernowne_digit(self.base, n)
        if self.kind == "pi4":
            return pi4.pi_digit_base4(n)
        if self.kind == "pseudorandom":
            return pseudorandom_digit(self.seed, self.base, n)
        if n > self.data.size:
            raise ResourceLimitError(f"digit {n} past end of {self.path} ({self.data.size} digits)")
        return int(self.data[n - 1])

    def block(self, start: int, count: int) -> np.ndarray:
        """Digits ``start .. start+count-1`` as a uint8 array."""
        if start < 1:
            raise InvalidArgument(f"index must be >= 1, got {start}")
        if count < 0:
            raise InvalidArgument("count must be >= 0")
        if count == 0:
            return np.empty(0, dtype=np.uint8)
        if self.kind == "champernowne":
            return champernowne_block(self.base, start, count)
        if self.kind == "pi4":
            return pi4.shared_table().block(start, count)
        if self.kind == "pseudorandom":
            return pseudorandom_block(self.seed, self.base, start, count)
        if start + count - 1 > self.data.size:
            raise ResourceLimitError(
                f"digits {start}..{start + count - 1} past end of {self.path} "
                f"({self.data.size} digits)")
        return self.data[start - 1:start - 1 + count]

    def available(self, start: int, count: int) -> int:
        """How many of the requested digits exist (clips finite sources)."""
        limit = self.length
        if limit is None:
            return count
        return max(0, min(count, limit - start + 1))

    def cursor(self, start: int = 1) -> "DigitCursor":
        return DigitCursor(self, start)

    def describe(self) -> str:
        if self.kind == "pseudorandom":
            return f"pseudorandom(seed={self.seed},base={self.base})"
        if self.kind == "file":
            return f"file({self.path})"
        return f"{self.kind}(base={self.base})"


class DigitCursor:
    """Reading position into a stream; independent of every other cursor."""

    def __init__(self, stream: DigitStream, start: int = 1):
        if start < 1:
            raise InvalidArgument("cursor start must be >= 1")
        self.stream = stream
        self.position = start

    def __iter__(self) -> Iterator[int]:
        return self

    def __next__(self) -> int:
        d = self.stream.digit(self.position)
        self.position += 1
        return d

    def take(self, count: int) -> np.ndarray:
        out = self.stream.block(self.position, count)
        self.position += count
        return out

    def reset(self, start: int = 1) -> None:
        self.position = start


def block_frequency(stream: DigitStream, k: int, n: int, start: int = 1) -> dict[tuple[int, ...], float]:
    """Sliding-window frequencies of length-k words over n digits.

    Every one of the base**k words is present as a key (zero if unseen)
    when there are at most 2**20 of them; otherwise only observed words.
    """
    if k < 1 or n < k:
        raise InvalidArgument("need k >= 1 and n >= k")
    b = stream.base
    d = stream.block(start, n).astype(np.int64)
    windows = n - k + 1
    codes = np.zeros(windows, dtype=np.int64)
    for j in range(k):
        codes = codes * b + d[j:j + windows]
    dense = b ** k <= 1 << 20
    if dense:
        counts = np.bincount(codes, minlength=b ** k)
        words = range(b ** k)
    else:
        words, counts = np.unique(codes, return_counts=True)
    out = {}
    for code, c in zip(words, counts):
        word = []
        code = int(code)
        for _ in range(k):
            code, r = divmod(code, b)
            word.append(r)
        out[tuple(reversed(word))] = int(c) / windows
    return out


# -- actions --------------------------------------------------------------

@dataclass(frozen=True)
class ActionMap:
    """Digit -> unit action table.  Default: 0 left, 1 right, 2 up, 3 down."""

    table: Mapping[int, tuple[int, int]]

    def __post_init__(self):
        table = {int(d): tuple(v) for d, v in dict(self.table).items()}
        for d, v in table.items():
            if v not in ACTIONS:
                raise InvalidArgument(f"digit {d} maps to non-unit action {v}")
        if set(table) == {0, 1, 2, 3} and set(table.values()) != set(ACTIONS):
            raise InvalidArgument("a base-4 action map must be a bijection onto the four actions")
        object.__setattr__(self, "table", table)

    @classmethod
    def default(cls) -> "ActionMap":
        return cls({0: LEFT, 1: RIGHT, 2: UP, 3: DOWN})

    @classmethod
    def from_string(cls, spec: str) -> "ActionMap":
        """Parse a string like ``"LRUD"``: character i is the action for digit i."""
        lookup = {"L": LEFT, "R": RIGHT, "U": UP, "D": DOWN}
        try:
            return cls({i: lookup[c] for i, c in enumerate(spec.upper())})
        except KeyError as exc:
            raise InvalidArgument(f"bad action map {spec!r}") from exc

    def __call__(self, digit: int) -> tuple[int, int]:
        return map_digit_to_action(self, digit)

    def to_string(self) -> str:
        return "".join(ACTION_SYMBOLS[self.table[d]] for d in sorted(self.table))

    def index_array(self, base: int) -> np.ndarray:
        """digit -> index into ACTIONS, for every digit of ``base``."""
        missing = [d for d in range(base) if d not in self.table]
        if missing:
            raise InvalidArgument(f"action map has no entry for digits {missing}")
        return np.array([ACTIONS.index(self.table[d]) for d in range(base)], dtype=np.int64)


def map_digit_to_action(amap: ActionMap, d: int) -> tuple[int, int]:
    try:
        return amap.table[d]
    except KeyError:
        raise InvalidArgument(f"digit {d} outside action map domain") from None
