"""Hot inner loops, each in two flavours.

Every kernel exists as a plain-loop function (compiled with ``numba.njit``
when numba is importable) and as a vectorized numpy function.  The module
level names resolve to the numba flavour unless the environment variable
``GIBBSPK_DISABLE_NUMBA`` is set to a true value, or numba is missing.

Samplers never draw random numbers inside a kernel: uniforms are generated
by the caller, so both flavours produce bit-identical partitions for the
same seed.
"""
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_DISABLE = os.environ.get("GIBBSPK_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
USE_NUMBA = HAVE_NUMBA and not _DISABLE
BACKEND = "numba" if USE_NUMBA else "numpy"


def _jit(func):
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


# --------------------------------------------------------------------------
# quadrature panels


# Per panel: max of log f, Kronrod and Gauss sums of exp(log f - max), and
# the Kronrod sum weighted by (1 + |log f|), which bounds the roundoff
# inherited from evaluating log f.


def _panel_reduce_loop(logv, wk, wg):
    npan, nq = logv.shape
    m = np.empty(npan)
    kro = np.zeros(npan)
    gau = np.zeros(npan)
    mag = np.zeros(npan)
    for i in range(npan):
        mx = -np.inf
        for j in range(nq):
            if logv[i, j] > mx:
                mx = logv[i, j]
        m[i] = mx
        if mx == -np.inf:
            continue
        sk = 0.0
        sg = 0.0
        sm = 0.0
        for j in range(nq):
            e = np.exp(logv[i, j] - mx)
            sk += wk[j] * e
            sg += wg[j] * e
            if e > 0.0:
                sm += wk[j] * e * (1.0 + abs(logv[i, j]))
        kro[i] = sk
        gau[i] = sg
        mag[i] = sm
    return m, kro, gau, mag


def _panel_reduce_numpy(logv, wk, wg):
    m = logv.max(axis=1)
    shift = np.where(np.isfinite(m), m, 0.0)
    e = np.exp(logv - shift[:, None])
    weighted = np.where(e > 0.0, e * (1.0 + np.abs(np.where(np.isfinite(logv), logv, 0.0))), 0.0)
    return m, e @ wk, e @ wg, weighted @ wk


# --------------------------------------------------------------------------
# two-parameter Chinese restaurant


def _crp_labels_loop(alpha, theta, u):
    nsamp = u.shape[0]
    n = u.shape[1] + 1
    labels = np.zeros((nsamp, n), dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    for s in range(nsamp):
        counts[:] = 0
        counts[0] = 1
        k = 1
        for i in range(1, n):
            target = u[s, i - 1] * (i + theta)
            acc = 0.0
            choice = k
            for j in range(k):
                acc += counts[j] - alpha
                if target < acc:
                    choice = j
                    break
            if choice == k:
                counts[k] = 1
                k += 1
            else:
                counts[choice] += 1
            labels[s, i] = choice
    return labels


def _crp_labels_numpy(alpha, theta, u):
    nsamp = u.shape[0]
    n = u.shape[1] + 1
    rows = np.arange(nsamp)
    cols = np.arange(n)
    labels = np.zeros((nsamp, n), dtype=np.int64)
    counts = np.zeros((nsamp, n), dtype=np.int64)
    counts[:, 0] = 1
    k = np.ones(nsamp, dtype=np.int64)
    for i in range(1, n):
        live = cols[None, :] < k[:, None]
        cum = np.cumsum(np.where(live, counts - alpha, 0.0), axis=1)
        target = u[:, i - 1] * (i + theta)
        choice = np.sum((cum <= target[:, None]) & live, axis=1)
        counts[rows, choice] += 1
        k += choice == k
        labels[:, i] = choice
    return labels


# --------------------------------------------------------------------------
# generic Gibbs predictive rule driven by ratio tables
#   join block j : (n_j - alpha) * join_ratio[i, k]
#   open new     : new_ratio[i, k]


def _gibbs_labels_loop(alpha, join_ratio, new_ratio, u):
    nsamp = u.shape[0]
    n = u.shape[1] + 1
    labels = np.zeros((nsamp, n), dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    for s in range(nsamp):
        counts[:] = 0
        counts[0] = 1
        k = 1
        for i in range(1, n):
            rj = join_ratio[i, k]
            acc = 0.0
            for j in range(k):
                acc += (counts[j] - alpha) * rj
            target = u[s, i - 1] * (acc + new_ratio[i, k])
            acc = 0.0
            choice = k
            for j in range(k):
                acc += (counts[j] - alpha) * rj
                if target < acc:
                    choice = j
                    break
            if choice == k:
                counts[k] = 1
                k += 1
            else:
                counts[choice] += 1
            labels[s, i] = choice
    return labels


def _gibbs_labels_numpy(alpha, join_ratio, new_ratio, u):
    nsamp = u.shape[0]
    n = u.shape[1] + 1
    rows = np.arange(nsamp)
    cols = np.arange(n)
    labels = np.zeros((nsamp, n), dtype=np.int64)
    counts = np.zeros((nsamp, n), dtype=np.int64)
    counts[:, 0] = 1
    k = np.ones(nsamp, dtype=np.int64)
    for i in range(1, n):
        live = cols[None, :] < k[:, None]
        rj = join_ratio[i, k]
        cum = np.cumsum(np.where(live, (counts - alpha) * rj[:, None], 0.0), axis=1)
        target = u[:, i - 1] * (cum[rows, k - 1] + new_ratio[i, k])
        choice = np.sum((cum <= target[:, None]) & live, axis=1)
        counts[rows, choice] += 1
        k += choice == k
        labels[:, i] = choice
    return labels


# --------------------------------------------------------------------------
# iid categorical labels, relabelled by order of first appearance


def _categorical_labels_loop(cumw, u):
    nsamp, m = cumw.shape
    n = u.shape[1]
    labels = np.zeros((nsamp, n), dtype=np.int64)
    relabel = np.empty(m, dtype=np.int64)
    for s in range(nsamp):
        relabel[:] = -1
        total = cumw[s, m - 1]
        k = 0
        for i in range(n):
            target = u[s, i] * total
            c = 0
            for j in range(m - 1):
                if cumw[s, j] <= target:
                    c += 1
            if relabel[c] < 0:
                relabel[c] = k
                k += 1
            labels[s, i] = relabel[c]
    return labels


def _categorical_labels_numpy(cumw, u):
    nsamp, m = cumw.shape
    n = u.shape[1]
    target = u * cumw[:, -1:]
    cat = np.sum(cumw[:, None, :-1] <= target[:, :, None], axis=2)
    hit = cat[:, :, None] == np.arange(m)[None, None, :]
    first = np.where(hit.any(axis=1), hit.argmax(axis=1), n)
    rank = np.argsort(np.argsort(first, axis=1, kind="stable"), axis=1, kind="stable")
    return np.take_along_axis(rank, cat, axis=1).astype(np.int64)


# --------------------------------------------------------------------------
# block sizes of labelled partitions, sorted non-increasing, zero padded


def _label_shapes_loop(labels):
    nsamp, n = labels.shape
    out = np.zeros((nsamp, n), dtype=np.int64)
    for s in range(nsamp):
        for i in range(n):
            out[s, labels[s, i]] += 1
        # insertion sort, descending
        for i in range(1, n):
            v = out[s, i]
            j = i - 1
            while j >= 0 and out[s, j] < v:
                out[s, j + 1] = out[s, j]
                j -= 1
            out[s, j + 1] = v
    return out


def _label_shapes_numpy(labels):
    nsamp, n = labels.shape
    flat = labels + (np.arange(nsamp) * n)[:, None]
    counts = np.bincount(flat.ravel(), minlength=nsamp * n).reshape(nsamp, n)
    return -np.sort(-counts, axis=1)


# --------------------------------------------------------------------------
# restricted-growth-string enumeration of all set partitions of [n],
# tallied by shape code (sizes sorted non-increasing, base n+1 digits)


def _rgs_shape_tally_loop(n, codes):
    tally = np.zeros(codes.shape[0], dtype=np.int64)
    a = np.zeros(n, dtype=np.int64)
    mx = np.zeros(n, dtype=np.int64)  # mx[i] = max(a[0..i])
    sizes = np.zeros(n, dtype=np.int64)
    base = n + 1
    while True:
        sizes[:] = 0
        for i in range(n):
            sizes[a[i]] += 1
        for i in range(1, n):
            v = sizes[i]
            j = i - 1
            while j >= 0 and sizes[j] < v:
                sizes[j + 1] = sizes[j]
                j -= 1
            sizes[j + 1] = v
        code = 0
        for i in range(n):
            code = code * base + sizes[i]
        tally[np.searchsorted(codes, code)] += 1
        i = n - 1
        while i >= 1 and a[i] > mx[i - 1]:
            i -= 1
        if i == 0:
            break
        a[i] += 1
        mx[i] = max(mx[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            mx[j] = mx[j - 1]
    return tally


def _rgs_shape_tally_python(n, codes):
    tally = np.zeros(codes.shape[0], dtype=np.int64)
    index = {int(c): i for i, c in enumerate(codes)}
    base = n + 1
    for rgs in iter_rgs(n):
        sizes = [0] * n
        for b in rgs:
            sizes[b] += 1
        sizes.sort(reverse=True)
        code = 0
        for s in sizes:
            code = code * base + s
        tally[index[code]] += 1
    return tally


def iter_rgs(n):
    """Yield every restricted growth string of length ``n`` as a tuple."""
    a = [0] * n
    mx = [0] * n
    while True:
        yield tuple(a)
        i = n - 1
        while i >= 1 and a[i] > mx[i - 1]:
            i -= 1
        if i <= 0:
            return
        a[i] += 1
        mx[i] = max(mx[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            mx[j] = mx[j - 1]


_LOOPS = {
    "panel_reduce": _panel_reduce_loop,
    "crp_labels": _crp_labels_loop,
    "gibbs_labels": _gibbs_labels_loop,
    "categorical_labels": _categorical_labels_loop,
    "label_shapes": _label_shapes_loop,
    "rgs_shape_tally": _rgs_shape_tally_loop,
}

_NUMPY = {
    "panel_reduce": _panel_reduce_numpy,
    "crp_labels": _crp_labels_numpy,
    "gibbs_labels": _gibbs_labels_numpy,
    "categorical_labels": _categorical_labels_numpy,
    "label_shapes": _label_shapes_numpy,
    "rgs_shape_tally": _rgs_shape_tally_python,
}

_COMPILED = {name: _jit(f) for name, f in _LOOPS.items()} if HAVE_NUMBA else {}


class _Kernels:
    def __init__(self, table, name):
        self.__dict__.update(table)
        self.backend = name


def kernels(backend=None):
    """Return the kernel namespace for ``backend`` ("numba" or "numpy")."""
    backend = backend or BACKEND
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        return _Kernels(_COMPILED, "numba")
    if backend == "numpy":
        return _Kernels(_NUMPY, "numpy")
    raise ValueError(f"unknown backend {backend!r}")


_active = kernels()
panel_reduce = _active.panel_reduce
crp_labels = _active.crp_labels
gibbs_labels = _active.gibbs_labels
categorical_labels = _active.categorical_labels
label_shapes = _active.label_shapes
rgs_shape_tally = _active.rgs_shape_tally
