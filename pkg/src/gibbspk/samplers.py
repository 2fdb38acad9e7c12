"""Random exchangeable partitions.

All randomness comes from :class:`RandomSource` (numpy's PCG64 behind a
``SeedSequence``).  Uniform variates are drawn here and handed to the
kernels in ``_kernels``, so the numba and numpy backends return the same
labels bit for bit.  Labels are restricted growth strings: element 1 is in
block 0 and each new block gets the next unused index.
"""
import math
from collections import Counter

import numpy as np

from . import _kernels
from .combinatorics import PartitionShape, SetPartition
from .eppf import GibbsModel, _check_pd
from .errors import ParameterError, TableError

_CHUNK = 1 << 16  # rows per kernel call; bounds memory for large counts

PREDICTIVE_TOLERANCE = 1e-6


class RandomSource:
    """Seedable stream with independent substreams for parallel workers."""

    def __init__(self, seed=None):
        if isinstance(seed, np.random.SeedSequence):
            self.seed_sequence = seed
        else:
            self.seed_sequence = np.random.SeedSequence(seed)
        self.generator = np.random.Generator(np.random.PCG64(self.seed_sequence))

    def spawn(self, count):
        """``count`` statistically independent child sources."""
        return [RandomSource(s) for s in self.seed_sequence.spawn(count)]

    def uniform(self, shape):
        return self.generator.random(shape)

    def gamma(self, shape_param, size):
        return self.generator.standard_gamma(shape_param, size)


def _as_source(source):
    return source if isinstance(source, RandomSource) else RandomSource(source)


def _check_sizes(n, count):
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    if int(count) != count or count < 0:
        raise ParameterError(f"count must be a non-negative integer, got {count!r}")
    return int(n), int(count)


def _chunked(count, n, source, kernel):
    # sequential chunks consume the stream exactly like one large draw
    out = np.zeros((count, n), dtype=np.int64)
    for start in range(0, count, _CHUNK):
        rows = min(_CHUNK, count - start)
        out[start:start + rows] = kernel(source.uniform((rows, n - 1)))
    return out


# --------------------------------------------------------------------------
# Pitman-Yor Chinese restaurant


def crp_sample_labels(alpha, theta, n, count, source=None, backend=None):
    """``count`` PD(alpha, theta) partitions of [n] as a (count, n) label array.

    Customer i + 1 joins block j with probability (n_j - alpha) / (i + theta)
    and opens a new block with probability (theta + k alpha) / (i + theta).
    """
    alpha, theta, _ = _check_pd(alpha, theta)
    n, count = _check_sizes(n, count)
    source = _as_source(source)
    kern = _kernels.kernels(backend)
    if n == 1:
        return np.zeros((count, 1), dtype=np.int64)
    return _chunked(count, n, source, lambda u: kern.crp_labels(alpha, theta, u))


def crp_sample(alpha, theta, n, source=None):
    return SetPartition.from_labels(crp_sample_labels(alpha, theta, n, 1, source)[0])


# --------------------------------------------------------------------------
# generic Gibbs predictive rule


def predictive_tables(model, n, tol=PREDICTIVE_TOLERANCE):
    """Ratio tables driving the predictive sampler up to n customers.

    ``join[i, k] = V[i+1, k] / V[i, k]`` and ``new[i, k] = V[i+1, k+1] / V[i, k]``
    so that, with i customers in k blocks, block j is joined with
    probability (n_j - alpha) join[i, k] and a new block opens with
    probability new[i, k].  Returns ``(join, new, max_sum_error)``.
    Unreachable states (V[i, k] = 0) get zero rows.
    """
    if not isinstance(model, GibbsModel):
        raise ParameterError("predictive sampling needs a GibbsModel")
    if n - 1 > model.n_max:
        raise TableError(f"V table supports n <= {model.n_max}, requested n={n}")
    join = np.zeros((n, n + 1))
    new = np.zeros((n, n + 1))
    worst = 0.0
    for i in range(1, n):
        for k in range(1, i + 1):
            lv = model.log_v(i, k)
            if lv == -math.inf:
                continue
            join[i, k] = math.exp(model.log_v(i + 1, k) - lv)
            new[i, k] = math.exp(model.log_v(i + 1, k + 1) - lv)
            total = (i - model.alpha * k) * join[i, k] + new[i, k]
            worst = max(worst, abs(total - 1.0))
    if (join < 0).any() or (new < 0).any() or not (np.isfinite(join).all() and np.isfinite(new).all()):
        raise TableError("V table yields negative or non-finite predictive probabilities")
    if worst > tol:
        raise TableError(f"predictive probabilities sum to 1 only within {worst:.3g} (tolerance {tol})")
    return join, new, worst


def gibbs_predictive_labels(model, n, count, source=None, backend=None):
    """``count`` partitions of [n] from the one-step predictive rule of ``model``."""
    n, count = _check_sizes(n, count)
    source = _as_source(source)
    kern = _kernels.kernels(backend)
    if n == 1:
        return np.zeros((count, 1), dtype=np.int64)
    join, new, _ = predictive_tables(model, n)
    alpha = float(model.alpha)
    return _chunked(count, n, source, lambda u: kern.gibbs_labels(alpha, join, new, u))


def gibbs_predictive_sample(model, n, source=None):
    return SetPartition.from_labels(gibbs_predictive_labels(model, n, 1, source)[0])


class PredictiveState:
    """Block sizes of a partially seated partition, for stepwise prediction."""

    def __init__(self, model, sizes=()):
        self.model = model
        self.sizes = [int(s) for s in sizes]
        if any(s < 1 for s in self.sizes):
            raise ParameterError("block sizes must be >= 1")

    @property
    def n(self):
        return sum(self.sizes)

    @property
    def k(self):
        return len(self.sizes)

    def probabilities(self):
        """Probabilities of joining each existing block, then of a new block."""
        if self.n == 0:
            return np.array([1.0])
        n, k = self.n, self.k
        lv = self.model.log_v(n, k)
        join = math.exp(self.model.log_v(n + 1, k) - lv)
        new = math.exp(self.model.log_v(n + 1, k + 1) - lv)
        return np.array([(s - self.model.alpha) * join for s in self.sizes] + [new])

    def add(self, block):
        if block == self.k:
            self.sizes.append(1)
        elif 0 <= block < self.k:
            self.sizes[block] += 1
        else:
            raise ParameterError(f"block index {block} out of range")


# --------------------------------------------------------------------------
# finite symmetric Dirichlet (alpha < 0)


def fisher_sample_labels(alpha, m, n, count, source=None, backend=None):
    """Partitions from m atoms with iid Gamma(-alpha, 1) weights, normalized.

    Same law as PD(alpha, m |alpha|).
    """
    alpha = float(alpha)
    if not alpha < 0:
        raise ParameterError(f"the finite Dirichlet construction needs alpha < 0, got {alpha}")
    if int(m) != m or m < 1:
        raise ParameterError(f"m must be a positive integer, got {m!r}")
    m = int(m)
    n, count = _check_sizes(n, count)
    source = _as_source(source)
    kern = _kernels.kernels(backend)
    out = np.zeros((count, n), dtype=np.int64)
    for start in range(0, count, _CHUNK):
        rows = min(_CHUNK, count - start)
        cumw = np.cumsum(source.gamma(-alpha, (rows, m)), axis=1)
        out[start:start + rows] = kern.categorical_labels(cumw, source.uniform((rows, n)))
    return out


def fisher_sample(alpha, m, n, source=None):
    return SetPartition.from_labels(fisher_sample_labels(alpha, m, n, 1, source)[0])


# --------------------------------------------------------------------------


def label_shapes(labels, backend=None):
    """Sorted block sizes per row, zero padded to n columns."""
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    return _kernels.kernels(backend).label_shapes(labels)


def shape_histogram(labels, backend=None):
    """Counter of :class:`PartitionShape` over the rows of a label array."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0:
        return Counter()
    sizes = label_shapes(labels, backend)
    # one integer key per row (base n + 1 digits); a 1-d unique is much faster than unique(axis=0)
    n = sizes.shape[1]
    if n * math.log2(n + 1) < 62:
        keys = sizes @ ((n + 1) ** np.arange(n, dtype=np.int64))
        _, first, counts = np.unique(keys, return_index=True, return_counts=True)
        rows = sizes[first]
    else:
        rows, counts = np.unique(sizes, axis=0, return_counts=True)
    return Counter({PartitionShape(r[r > 0]): int(c) for r, c in zip(rows, counts)})


def partition_histogram(labels):
    """Counter of label tuples (one entry per distinct set partition)."""
    return Counter(map(tuple, np.asarray(labels, dtype=np.int64).tolist()))
