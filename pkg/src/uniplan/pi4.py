"""Base-4 digits of pi from an exact integer Machin series.

pi = 16 atan(1/5) - 4 atan(1/239).  Each arctangent is summed by binary
splitting into a big-integer fraction, then truncated to a fixed-point
value with ``bits`` fractional bits.  Because 4 = 2**2, the base-4
expansion is read straight off consecutive bit pairs.

Digit index 1 is the integer part (3), so the stream starts 3,0,2,1,...

Computed digits are cached in memory and on disk.  The cache file is::

    offset  size  field
    0       4     magic b"UPD4"
    4       4     version (uint32 LE, currently 1)
    8       8     digit count (uint64 LE)
    16      ...   digits packed 4 per byte, digit i in bits 2*(i%4)..2*(i%4)+1
                  of byte i//4 (little-endian bit order)
"""

from __future__ import annotations

import logging
import math
import os
import struct
import tempfile
import threading
from pathlib import Path

import gmpy2
import numpy as np
from gmpy2 import mpz

from .errors import InvalidArgument, ResourceLimitError

log = logging.getLogger(__name__)

DEFAULT_MAX_DIGITS = 2_000_000
MIN_CHUNK = 1 << 17
CACHE_MAGIC = b"UPD4"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sIQ")

# |computed - exact| in units of the last fractional bit, see _fixed_point_pi.
_ERROR_BOUND = 40

KNOWN_PREFIX = bytes([3, 0, 2, 1, 0, 0, 3, 3, 3, 1, 2, 2, 2, 2, 0, 2, 0])


def _split(a: int, b: int, x2: int):
    # Sum of (-1)^k / (2k+1) * x2^-k over k in [a, b) as T / (B * Q).
    if b - a == 1:
        if a == 0:
            return mpz(1), mpz(1), mpz(1), mpz(1)
        return mpz(-1), mpz(x2), mpz(2 * a + 1), mpz(-1)
    m = (a + b) // 2
    pl, ql, bl, tl = _split(a, m, x2)
    pr, qr, br, tr = _split(m, b, x2)
    return pl * pr, ql * qr, bl * br, br * qr * tl + bl * pl * tr


def _atan_inv(x: int, bits: int) -> mpz:
    """floor(atan(1/x) * 2**bits) up to an error in (-2, 1]."""
    # Truncation error after K terms is below x**-(2K+1) <= 2**-bits.
    terms = max(1, math.ceil((bits / math.log2(x) - 1) / 2) + 1)
    _, q, b, t = _split(0, terms, x * x)
    return (t << bits) // (b * q * x)


def _fixed_point_pi(bits: int) -> mpz:
    return 16 * _atan_inv(5, bits) - 4 * _atan_inv(239, bits)


def compute_pi_base4(count: int, guard_bits: int = 64) -> np.ndarray:
    """Return the first ``count`` base-4 digits of pi as a uint8 array.

    Works at ``2*(count-1) + guard_bits`` fractional bits and only returns
    once the truncation interval pins every requested digit; otherwise the
    guard is widened and the computation repeated.
    """
    if count < 1:
        raise InvalidArgument("count must be >= 1")
    if guard_bits < 8:
        raise InvalidArgument("guard_bits must be >= 8")
    frac_bits = 2 * (count - 1)
    while True:
        value = _fixed_point_pi(frac_bits + guard_bits)
        lo = (value - _ERROR_BOUND) >> guard_bits
        hi = (value + _ERROR_BOUND) >> guard_bits
        if lo == hi:
            break
        log.debug("pi digits unstable at guard %d, widening", guard_bits)
        guard_bits += 32
    text = gmpy2.digits(lo, 2)
    raw = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - 48
    # Integer part 3 occupies exactly the two leading bits.
    assert raw.size == 2 * count, (raw.size, count)
    pairs = raw.reshape(-1, 2)
    return (pairs[:, 0] * 2 + pairs[:, 1]).astype(np.uint8)


def pack_digits(digits: np.ndarray) -> bytes:
    d = np.asarray(digits, dtype=np.uint8)
    pad = (-d.size) % 4
    if pad:
        d = np.concatenate([d, np.zeros(pad, dtype=np.uint8)])
    q = d.reshape(-1, 4)
    packed = q[:, 0] | (q[:, 1] << 2) | (q[:, 2] << 4) | (q[:, 3] << 6)
    return packed.astype(np.uint8).tobytes()


def unpack_digits(payload: bytes, count: int) -> np.ndarray:
    b = np.frombuffer(payload, dtype=np.uint8)
    out = np.empty((b.size, 4), dtype=np.uint8)
    for i in range(4):
        out[:, i] = (b >> (2 * i)) & 3
    return out.reshape(-1)[:count].copy()


def write_cache(path: Path, digits: np.ndarray) -> None:
    """Atomically replace ``path`` with a cache file holding ``digits``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = _HEADER.pack(CACHE_MAGIC, CACHE_VERSION, int(digits.size)) + pack_digits(digits)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_cache(path: Path) -> np.ndarray | None:
    """Load a cache file, or None when it is missing or fails validation."""
    try:
        blob = Path(path).read_bytes()
    except OSError:
        return None
    if len(blob) < _HEADER.size:
        return None
    magic, version, count = _HEADER.unpack_from(blob)
    if magic != CACHE_MAGIC or version != CACHE_VERSION:
        return None
    payload = blob[_HEADER.size:]
    if len(payload) != (count + 3) // 4:
        return None
    digits = unpack_digits(payload, count)
    n = min(count, len(KNOWN_PREFIX))
    if digits[:n].tobytes() != KNOWN_PREFIX[:n]:
        return None
    return digits


def default_cache_dir() -> Path:
    env = os.environ.get("UNIPLAN_CACHE_DIR")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "uniplan"


class PiDigits:
    """Lazily grown, shared table of pi digits.

    Readers take no lock once the table covers their range; growth is
    serialized so only one thread computes and writes a chunk.
    """

    def __init__(self, max_digits: int | None = None, cache_dir: Path | None = None,
                 use_disk: bool = True):
        if max_digits is None:
            max_digits = int(os.environ.get("UNIPLAN_PI_MAX_DIGITS", DEFAULT_MAX_DIGITS))
        self.max_digits = max_digits
        self.cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
        self.use_disk = use_disk
        self._digits = np.empty(0, dtype=np.uint8)
        self._lock = threading.Lock()

    @property
    def cache_path(self) -> Path:
        return self.cache_dir / "pi_base4.upd4"

    @property
    def available(self) -> int:
        return int(self._digits.size)

    def ensure(self, n: int) -> None:
        if n <= self._digits.size:
            return
        if n > self.max_digits:
            raise ResourceLimitError(
                f"pi digit {n} requested, limit is {self.max_digits} "
                "(raise UNIPLAN_PI_MAX_DIGITS)")
        with self._lock:
            if n <= self._digits.size:
                return
            if self.use_disk:
                cached = read_cache(self.cache_path)
                if cached is not None and cached.size >= n:
                    self._digits = cached
                    return
            target = MIN_CHUNK
            while target < n:
                target *= 2
            target = min(target, self.max_digits)
            log.info("computing %d base-4 digits of pi", target)
            digits = compute_pi_base4(target)
            self._digits = digits
            if self.use_disk:
                try:
                    write_cache(self.cache_path, digits)
                except OSError as exc:
                    log.warning("could not write pi cache %s: %s", self.cache_path, exc)

    def block(self, start: int, count: int) -> np.ndarray:
        """Digits start..start+count-1 (1-based), as a read-only view."""
        if start < 1 or count < 0:
            raise InvalidArgument("start must be >= 1 and count >= 0")
        self.ensure(start + count - 1)
        view = self._digits[start - 1:start - 1 + count]
        view.flags.writeable = False
        return view


_table: PiDigits | None = None


def shared_table() -> PiDigits:
    global _table
    if _table is None:
        _table = PiDigits()
    return _table


def pi_digit_base4(n: int) -> int:
    """n-th base-4 digit of pi; n=1 is the integer part 3."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    return int(shared_table().block(n, 1)[0])


def raise_limit(max_digits: int) -> None:
    """Allow the shared table to grow to at least ``max_digits`` digits."""
    table = shared_table()
    table.max_digits = max(table.max_digits, int(max_digits))
