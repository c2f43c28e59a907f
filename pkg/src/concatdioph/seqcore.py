"""Exact Fibonacci and Lucas values, base-b digit lengths and Lucas membership."""

from __future__ import annotations

import bisect
import enum
import threading
from typing import Optional

from .errors import check_base


class SequenceKind(enum.Enum):
    FIBONACCI = "F"
    LUCAS = "L"


def _fib_pair(n: int) -> tuple[int, int]:
    # (F_n, F_{n+1}) by fast doubling
    if n == 0:
        return 0, 1
    a, b = _fib_pair(n >> 1)
    c = a * (2 * b - a)
    d = a * a + b * b
    if n & 1:
        return d, c + d
    return c, d


def fib(n: int) -> int:
    """Return F_n for n >= 0."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    return _fib_pair(n)[0]


def lucas(n: int) -> int:
    """Return L_n for n >= 0, using L_n = 2 F_{n+1} - F_n."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    f, g = _fib_pair(n)
    return 2 * g - f


def value(kind: SequenceKind, n: int) -> int:
    return fib(n) if kind is SequenceKind.FIBONACCI else lucas(n)


def digit_len(x: int, b: int) -> int:
    """Number of base-b digits of x >= 0; zero is written with one digit.

    >>> digit_len(89, 6)
    3
    """
    check_base(b)
    if x < 0:
        raise ValueError("digit_len is defined for nonnegative integers")
    if x < b:
        return 1
    # estimate from the bit length, then correct by exact power comparison
    d = max(1, int(x.bit_length() / b.bit_length()))
    p = b ** (d - 1)
    while p > x:
        d -= 1
        p //= b
    while p * b <= x:
        d += 1
        p *= b
    return d


class LucasTable:
    """Ascending table of Lucas numbers L_1 < L_2 < ... used for membership tests.

    L_0 = 2 is the only value out of order and is handled separately.
    """

    def __init__(self, n_max: int):
        self.n_max = n_max
        vals = [2, 1]
        for _ in range(2, n_max + 1):
            vals.append(vals[-1] + vals[-2])
        self.values = tuple(vals[: n_max + 1])
        self._tail = self.values[1:]

    def index_of(self, v: int, n_max: Optional[int] = None) -> Optional[int]:
        cap = self.n_max if n_max is None else min(n_max, self.n_max)
        if v == 2:
            return 0
        i = bisect.bisect_left(self._tail, v)
        if i < len(self._tail) and self._tail[i] == v and i + 1 <= cap:
            return i + 1
        return None


_table: Optional[LucasTable] = None
_table_lock = threading.Lock()


def lucas_table(n_max: int) -> LucasTable:
    """Shared table covering indices up to at least n_max + 32; grows on demand."""
    global _table
    size = n_max + 32
    with _table_lock:
        if _table is None or _table.n_max < size:
            _table = LucasTable(size)
        return _table


def lucas_index_of(v: int, n_max: int) -> Optional[int]:
    """Return n <= n_max with L_n == v, or None."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    return lucas_table(n_max).index_of(v, n_max)
