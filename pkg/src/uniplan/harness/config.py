"""Experiment configuration: a flat ``key = value`` text file.

Recognised keys (defaults in brackets)::

    kind      grid | maze | continuous | continuous-adaptive | learn
    env       environment file, or a generator spec:
                maze:WxH:SEED            perfect maze
                obstacles:WxH:FREE:SEED  random blocks, exactly FREE cells
                polyomino:N:SEED         random N-cell shape, random task
    goal_inset   move the goal to the free cell nearest (W-1-k, k) [none]
    source    pi4 | champernowne | pseudorandom | file:PATH   [pi4]
    base      digit base [4]
    seed      pseudorandom seed [0]
    map       action letters for digits 0.. e.g. LRUD [LRUD]
    trials    T [100]
    stride    S; trial i starts at digit offset + S*(i-1) [1000]
    offset    first digit index [1]
    budget    step budget per trial [1000000]
    w         scale-free weight, rational [1]
    start     continuous start "x y" (default: first start in env file)
    out       CSV path [trials.csv]
    svg       optional SVG of the first trial
    workers   worker processes [1]
    pi_max_digits   raise the pi digit limit for this run

Relative paths are resolved against the config file's directory.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from ..digits import ActionMap, DigitStream
from ..errors import InvalidArgument, ParseError

KINDS = ("grid", "maze", "continuous", "continuous-adaptive", "learn")

DEFAULT_TRIALS = 100
DEFAULT_STRIDE = 1000
DEFAULT_BUDGET = 10**6


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "grid"
    env: str = ""
    source: str = "pi4"
    base: int = 4
    seed: int = 0
    map: str = "LRUD"
    trials: int = DEFAULT_TRIALS
    stride: int = DEFAULT_STRIDE
    offset: int = 1
    budget: int = DEFAULT_BUDGET
    w: Fraction = Fraction(1)
    start: tuple | None = None
    goal_inset: int | None = None
    out: str = "trials.csv"
    svg: str | None = None
    workers: int = 1
    pi_max_digits: int | None = None
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.trials < 1:
            raise InvalidArgument("trials must be >= 1")
        if self.stride < 1:
            raise InvalidArgument("stride must be >= 1")
        if self.offset < 1:
            raise InvalidArgument("offset must be >= 1")
        if self.budget < 0:
            raise InvalidArgument("budget must be >= 0")
        if self.workers < 1:
            raise InvalidArgument("workers must be >= 1")
        if not self.env:
            raise InvalidArgument("config needs an 'env' entry")
        if not _is_generator(self.env) and not self.resolve(self.env).exists():
            raise InvalidArgument(f"environment file {self.resolve(self.env)} not found")
        if self.source.startswith("file:") and not self.resolve(self.source[5:]).exists():
            raise InvalidArgument(f"digit file {self.resolve(self.source[5:])} not found")

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def trial_offset(self, i: int) -> int:
        """Digit index where trial i (1-based) starts."""
        return self.offset + self.stride * (i - 1)

    def stream(self) -> DigitStream:
        src = self.source
        if src.startswith("file:"):
            return DigitStream("file", self.base, path=str(self.resolve(src[5:])))
        if src == "pseudorandom":
            return DigitStream.pseudorandom(self.seed, self.base)
        if src in ("pi4", "pi"):
            return DigitStream.pi()
        if src == "champernowne":
            return DigitStream.champernowne(self.base)
        raise InvalidArgument(f"unknown digit source {src!r}")

    def action_map(self) -> ActionMap:
        return ActionMap.from_string(self.map)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _is_generator(spec: str) -> bool:
    return spec.split(":", 1)[0] in ("maze", "obstacles", "polyomino")


_INT_KEYS = {"base", "seed", "trials", "stride", "offset", "budget", "workers",
             "goal_inset", "pi_max_digits"}


def parse_config(text: str, base_dir: str | Path = ".") -> ExperimentConfig:
    values: dict = {}
    known = set(ExperimentConfig.__dataclass_fields__) - {"base_dir"}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"config line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ParseError(f"config line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(val.replace("_", ""))
            elif key == "w":
                values[key] = Fraction(val)
            elif key == "start":
                x, y = val.split()
                values[key] = (Fraction(x), Fraction(y))
            else:
                values[key] = val
        except ValueError as exc:
            raise ParseError(f"config line {lineno}: bad value for {key}: {val!r}") from exc
    return ExperimentConfig(base_dir=str(base_dir), **values)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)
