"""Set partitions, partition shapes and generalized rising factorials."""
import math
from collections import Counter
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import BoundsError, ParameterError

#: Largest n accepted by the exhaustive set-partition enumerators (Bell(13) ~ 2.8e7).
MAX_ENUMERATION_N = 13


class PartitionShape(tuple):
    """Block sizes of a partition, stored non-increasing.

    Equality is multiset equality because the parts are always kept in
    canonical order:

    >>> PartitionShape([1, 3, 2]) == PartitionShape((3, 2, 1))
    True
    """

    def __new__(cls, parts):
        parts = sorted((int(p) for p in parts), reverse=True)
        if not parts:
            raise ParameterError("a partition shape needs at least one part")
        if parts[-1] < 1:
            raise ParameterError(f"partition parts must be >= 1, got {parts}")
        return super().__new__(cls, parts)

    @property
    def parts(self):
        return tuple(self)

    @property
    def n(self):
        return sum(self)

    @property
    def k(self):
        return len(self)

    def __repr__(self):
        return f"PartitionShape({tuple(self)!r})"

    def __str__(self):
        return ",".join(str(p) for p in self)

    @classmethod
    def parse(cls, text):
        """Parse the canonical comma-joined rendering, e.g. ``"3,2,1"``."""
        try:
            return cls(int(p) for p in str(text).replace(" ", "").split(","))
        except ValueError as exc:
            raise ParameterError(f"cannot parse partition shape {text!r}") from exc


class SetPartition(tuple):
    """A partition of {1, ..., n} into disjoint non-empty blocks.

    Blocks are frozensets, ordered by their smallest element.
    """

    def __new__(cls, blocks):
        blocks = [frozenset(int(x) for x in b) for b in blocks]
        if any(not b for b in blocks):
            raise ParameterError("set partition blocks must be non-empty")
        n = sum(len(b) for b in blocks)
        union = frozenset().union(*blocks)
        if len(union) != n:
            raise ParameterError("set partition blocks must be disjoint")
        if union != frozenset(range(1, n + 1)):
            raise ParameterError(f"blocks must cover 1..{n}")
        blocks.sort(key=min)
        return super().__new__(cls, blocks)

    @property
    def n(self):
        return sum(len(b) for b in self)

    @classmethod
    def from_labels(cls, labels):
        """Build from block labels of elements 1..n (any hashable labels)."""
        groups = {}
        for i, lab in enumerate(labels, start=1):
            groups.setdefault(lab, []).append(i)
        return cls(groups.values())

    def labels(self):
        """Restricted growth string: block index of each element, 0-based."""
        out = [0] * self.n
        for j, block in enumerate(self):
            for x in block:
                out[x - 1] = j
        return tuple(out)

    def __str__(self):
        return "|".join(",".join(str(x) for x in sorted(b)) for b in self)


def _check_enumeration_n(n):
    if int(n) != n or n < 1:
        raise BoundsError(f"n must be a positive integer, got {n!r}")
    if n > MAX_ENUMERATION_N:
        raise BoundsError(
            f"n={n} exceeds the enumeration ceiling MAX_ENUMERATION_N={MAX_ENUMERATION_N}"
        )
    return int(n)


def enumerate_set_partitions(n):
    """Yield every set partition of {1, ..., n} exactly once.

    Partitions are generated as restricted growth strings, so each call
    returns an independent iterator.
    """
    n = _check_enumeration_n(n)
    for rgs in _kernels.iter_rgs(n):
        yield SetPartition.from_labels(rgs)


def shape_of(partition):
    """Block sizes of ``partition`` as a :class:`PartitionShape`."""
    return PartitionShape(len(b) for b in partition)


@lru_cache(maxsize=None)
def integer_partitions(n):
    """All shapes of [n], in reverse lexicographic order ((n), ..., (1,...,1))."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    out = []

    def rec(remaining, cap, prefix):
        if remaining == 0:
            out.append(PartitionShape(prefix))
            return
        for part in range(min(remaining, cap), 0, -1):
            rec(remaining - part, part, prefix + [part])

    rec(n, n, [])
    return tuple(out)


def shape_multiplicity(shape):
    """Number of set partitions of [n] whose block sizes equal ``shape``.

    n! / (prod n_j! * prod_r m_r!) where m_r counts parts equal to r.
    """
    shape = PartitionShape(shape)
    denom = 1
    for part in shape:
        denom *= math.factorial(part)
    for mult in Counter(shape).values():
        denom *= math.factorial(mult)
    return math.factorial(shape.n) // denom


def _shape_code(shape, n):
    code = 0
    for part in list(shape) + [0] * (n - len(shape)):
        code = code * (n + 1) + part
    return code


def shape_counts_by_enumeration(n):
    """Tally set partitions of [n] by shape via exhaustive enumeration.

    Returns ``{PartitionShape: count}``.  This walks all Bell(n) restricted
    growth strings, so it is the brute-force oracle behind normalization
    checks rather than a fast path.
    """
    n = _check_enumeration_n(n)
    shapes = integer_partitions(n)
    codes = np.array([_shape_code(s, n) for s in shapes], dtype=np.int64)
    order = np.argsort(codes)
    tally = _kernels.rgs_shape_tally(n, codes[order])
    return {shapes[i]: int(tally[j]) for j, i in enumerate(order)}


def bell_number(n):
    """Bell number from the Bell triangle (independent of the enumerators)."""
    if n < 0:
        raise ParameterError("n must be >= 0")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def rising_factorial(x, n, step=1.0):
    """Generalized rising factorial prod_{i<n} (x + i*step); 1 when n == 0."""
    n = _check_count(n)
    return math.prod(x + i * step for i in range(n))


def log_rising_factorial(x, n, step=1.0):
    """Sign and log-magnitude of :func:`rising_factorial`.

    Returns ``(sign, log_abs)`` with ``sign`` in {-1, 0, 1}; a vanishing
    factor gives ``(0, -inf)``.
    """
    n = _check_count(n)
    sign = 1
    terms = []
    for i in range(n):
        f = x + i * step
        if f == 0:
            return 0, -math.inf
        if f < 0:
            sign = -sign
        terms.append(math.log(abs(f)))
    return sign, math.fsum(terms)


def _check_count(n):
    if int(n) != n or n < 0:
        raise ParameterError(f"rising factorial length must be a non-negative integer, got {n!r}")
    return int(n)
