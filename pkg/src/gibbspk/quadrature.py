"""Adaptive Gauss-Kronrod quadrature for log-domain integrands.

Integrands are supplied as ``log f``.  Each 15-point panel is exponentiated
after subtracting its own maximum, so integrands whose magnitude spans
hundreds of orders of magnitude are summed without overflow.

Both supported domains are mapped onto ``v in (0, 1)``:

``(0, 1)``
    split at 1/2; each half is ``p = u / 2`` or ``1 - p = u / 2`` with
    ``u = sin^2(pi v / 2)`` ("smooth", default) or ``u = v`` ("linear").
    The smooth map turns ``p^-1/2``-type endpoint singularities into
    bounded integrands, and the complement ``1 - p`` is handed to the
    integrand without cancellation.
``(0, inf)``
    split at a positive scale ``s`` into ``x = s p`` and ``x = s / p`` with
    ``p`` in (0, 1) mapped as above ("smooth", or "linear"/"rational" for
    the plain map).  Heavy tails such as ``x^-1.1`` are then resolved out to
    the limit of double precision instead of stopping near ``s / eps^2``.

The batch entry points integrate many integrands at once; panels of all
integrands are refined together so every round is a single vectorized
evaluation.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ParameterError, QuadratureError

_LOG2 = np.log(2.0)

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:14:2] = np.concatenate([_WG[:-1], [_WG[-1]], _WG[-2::-1]])

_EPS = np.finfo(float).eps
_INITIAL_PANELS = 4


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and substitution settings for the adaptive integrator.

    Convergence is declared when the summed panel error estimate is below
    ``max(abs_tol, rel_tol * |I|)``.  ``max_subdivisions`` caps the number
    of panels per integrand.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    substitution: str = "smooth"
    scale: float = 1.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol >= 0):
            raise ParameterError("rel_tol must be positive and abs_tol non-negative")
        if self.max_subdivisions < 1:
            raise ParameterError("max_subdivisions must be >= 1")
        if self.substitution not in ("smooth", "linear", "rational"):
            raise ParameterError(f"unknown substitution {self.substitution!r}")
        if not self.scale > 0:
            raise ParameterError("scale must be positive")

    def with_(self, **changes):
        return QuadratureSpec(**{**self.__dict__, **changes})


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    log_value: float
    n_panels: int
    n_evals: int


@dataclass(frozen=True)
class BatchResult:
    """Per-integrand results of a batch integration (arrays of equal length)."""

    value: np.ndarray
    error: np.ndarray
    log_value: np.ndarray
    n_panels: np.ndarray

    def __len__(self):
        return len(self.value)

    def __getitem__(self, i):
        return QuadResult(float(self.value[i]), float(self.error[i]), float(self.log_value[i]),
                          int(self.n_panels[i]), int(self.n_panels[i]) * 15)


# --------------------------------------------------------------------------
# substitutions: v in (0,1) -> integration variable, with log-Jacobian


def _half_angles(v):
    # sin and cos of pi v / 2, each evaluated from the nearer endpoint
    upper = v > 0.5
    w = np.where(upper, 1.0 - v, v)
    sw = np.sin(0.5 * np.pi * w)
    cw = np.cos(0.5 * np.pi * w)
    return np.where(upper, cw, sw), np.where(upper, sw, cw)


def _map_01(v, substitution):
    if substitution == "linear":
        return v, 1.0 - v, np.zeros_like(v)
    if substitution != "smooth":
        raise ParameterError(f"substitution {substitution!r} is not available on (0, 1)")
    s, c = _half_angles(v)
    # dp/dv = pi sin(pi v / 2) cos(pi v / 2)
    with np.errstate(divide="ignore"):
        logjac = np.log(np.pi) + np.log(s) + np.log(c)
    return s * s, c * c, logjac


def _map_0inf(v, substitution, scale, upper):
    # (0, inf) is split at ``scale``: the lower half is x = scale * p and the
    # upper half x = scale / p, so both the origin and the far tail sit at
    # p -> 0 where floating point resolution is fine
    p, _, logjac = _map_01(v, "smooth" if substitution == "smooth" else "linear")
    with np.errstate(divide="ignore", over="ignore"):
        log_scale = np.log(scale)
        x = np.where(upper, scale / p, scale * p)
        logjac = logjac + log_scale - np.where(upper, 2.0 * np.log(p), 0.0)
    return x, logjac


# --------------------------------------------------------------------------
# core adaptive loop over v in (0, 1)


def _adaptive(log_g, size, spec, what):
    """Integrate ``exp(log_g(v, owner))`` over v in (0,1) for ``size`` owners.

    ``log_g`` receives node coordinates of shape (P, 15) and the owner index
    of each panel with shape (P, 1); it returns log-integrand values (P, 15)
    including the Jacobian of the substitution.
    """
    edges = np.linspace(0.0, 1.0, _INITIAL_PANELS + 1)
    lo = np.tile(edges[:-1], size)
    hi = np.tile(edges[1:], size)
    owner = np.repeat(np.arange(size), _INITIAL_PANELS)

    m, kro, err, noise = _evaluate(log_g, lo, hi, owner, what)
    frozen = np.zeros(lo.size, dtype=bool)
    done = np.zeros(size, dtype=bool)

    while True:
        big_m = np.full(size, -np.inf)
        np.maximum.at(big_m, owner, m)
        safe_m = np.where(np.isfinite(big_m), big_m, 0.0)
        w = np.where(np.isfinite(m), np.exp(m - safe_m[owner]), 0.0)
        total = np.bincount(owner, w * kro, minlength=size)
        err_scaled = w * err
        err_total = np.bincount(owner, err_scaled, minlength=size)
        if spec.abs_tol > 0:
            with np.errstate(over="ignore"):
                abs_scaled = spec.abs_tol * np.exp(-safe_m)
        else:
            abs_scaled = np.zeros(size)
        floor = np.bincount(owner, w * noise, minlength=size)
        tol = np.maximum(np.maximum(abs_scaled, spec.rel_tol * np.abs(total)), floor)
        done = (err_total <= tol) | ~np.isfinite(big_m)
        if done.all():
            break

        npan = np.bincount(owner, minlength=size)
        active = ~done[owner] & ~frozen
        if not active.any() or (npan[~done] >= spec.max_subdivisions).any():
            bad = int(np.flatnonzero(~done)[0])
            val = total[bad] * np.exp(safe_m[bad])
            raise QuadratureError(
                f"{what}: no convergence after {int(npan[bad])} panels",
                estimate=float(val), error=float(err_total[bad] * np.exp(safe_m[bad])))

        # per owner, split the largest-error panels until what remains is
        # below half the tolerance
        order = np.lexsort((-err_scaled, owner))
        sorted_owner = owner[order]
        csum = np.cumsum(err_scaled[order])
        start = np.searchsorted(sorted_owner, sorted_owner, side="left")
        before = csum - err_scaled[order] - np.where(start > 0, csum[start - 1], 0.0)
        remaining = err_total[sorted_owner] - before
        pick = np.zeros(lo.size, dtype=bool)
        pick[order] = remaining > 0.5 * tol[sorted_owner]
        pick &= active
        if not pick.any():
            # the worst panels are frozen at roundoff width; refine the worst active one
            worst = np.full(size, -1.0)
            np.maximum.at(worst, owner, np.where(active, err_scaled, -1.0))
            pick = active & (err_scaled >= worst[owner])

        mid = 0.5 * (lo[pick] + hi[pick])
        tiny = (mid <= lo[pick]) | (mid >= hi[pick]) | (hi[pick] - lo[pick] < 8 * _EPS * np.maximum(hi[pick], 1e-300))
        if tiny.any():
            idx = np.flatnonzero(pick)[tiny]
            frozen[idx] = True
            pick[idx] = False
            mid = mid[~tiny]
            if not pick.any():
                continue

        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        new_owner = np.concatenate([owner[pick], owner[pick]])
        nm, nk, ne, nn = _evaluate(log_g, new_lo, new_hi, new_owner, what)

        keep = ~pick
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        owner = np.concatenate([owner[keep], new_owner])
        m = np.concatenate([m[keep], nm])
        kro = np.concatenate([kro[keep], nk])
        err = np.concatenate([err[keep], ne])
        noise = np.concatenate([noise[keep], nn])
        frozen = np.concatenate([frozen[keep], np.zeros(new_lo.size, dtype=bool)])

    with np.errstate(divide="ignore", over="ignore"):
        log_value = np.where(total > 0, np.log(np.where(total > 0, total, 1.0)) + safe_m, -np.inf)
        scale = np.exp(safe_m)
        value = np.where(np.isfinite(big_m), total * scale, 0.0)
        error = np.where(np.isfinite(big_m), err_total * scale, 0.0)
    return BatchResult(value, error, log_value, np.bincount(owner, minlength=size))


def _evaluate(log_g, lo, hi, owner, what):
    half = 0.5 * (hi - lo)
    centre = 0.5 * (hi + lo)
    v = centre[:, None] + half[:, None] * NODES[None, :]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        logv = np.asarray(log_g(v, owner[:, None]), dtype=float)
    if logv.shape != v.shape:
        logv = np.broadcast_to(logv, v.shape)
    if np.isnan(logv).any() or np.isposinf(logv).any():
        raise QuadratureError(f"{what}: integrand returned nan or +inf")
    m, kro, gau, mag = _kernels.panel_reduce(np.ascontiguousarray(logv), KRONROD_WEIGHTS, GAUSS_WEIGHTS)
    # evaluating log f carries absolute error ~ eps |log f|, i.e. relative
    # error ~ eps |log f| in f itself
    noise = 50 * _EPS * mag
    with np.errstate(divide="ignore"):
        m = m + np.log(half)
    return m, kro, np.abs(kro - gau), noise


# --------------------------------------------------------------------------
# public entry points


def integrate_01(log_f, spec=None, complement=False):
    """Integrate ``exp(log_f(p))`` over (0, 1).

    With ``complement=True`` the integrand is called as ``log_f(p, 1 - p)``
    with the complement computed without cancellation.  Raises
    :class:`QuadratureError` when the tolerance cannot be met.
    """
    spec = spec or DEFAULT_SPEC
    if complement:
        res = integrate_batch_01(lambda p, q, idx: log_f(p, q), 1, spec, complement=True)
    else:
        res = integrate_batch_01(lambda p, idx: log_f(p), 1, spec)
    return res[0]


def _add_jacobian(val, logjac):
    # a zero integrand stays zero where the Jacobian blows up
    with np.errstate(invalid="ignore"):
        out = val + logjac
    return np.where(val == -np.inf, -np.inf, out)


def integrate_0inf(log_f, spec=None):
    """Integrate ``exp(log_f(x))`` over (0, inf)."""
    spec = spec or DEFAULT_SPEC
    return integrate_batch_0inf(lambda x, idx: log_f(x), 1, spec)[0]


def integrate_batch_01(log_f, size, spec=None, complement=False, what="integrate_01"):
    """Integrate ``size`` integrands over (0, 1) simultaneously.

    ``log_f(p, idx)`` (or ``log_f(p, 1 - p, idx)``) gets node arrays and a
    broadcastable array of integrand indices.  The interval is split at 1/2
    and each half is mapped so that its outer endpoint sits at the origin;
    mass within 1e-300 of either endpoint is therefore still resolved.
    """
    spec = spec or DEFAULT_SPEC

    def log_g(v, owner):
        upper = owner >= size
        base = np.where(upper, owner - size, owner)
        u, _, logjac = _map_01(v, spec.substitution)
        half = 0.5 * u
        p = np.where(upper, 1.0 - half, half)
        q = np.where(upper, half, 1.0 - half)
        val = log_f(p, q, base) if complement else log_f(p, base)
        return _add_jacobian(val, logjac - _LOG2)

    return _combine_halves(_adaptive(log_g, 2 * size, spec, what), size)


def _combine_halves(halves, size):
    lo, hi = slice(0, size), slice(size, 2 * size)
    return BatchResult(
        halves.value[lo] + halves.value[hi],
        halves.error[lo] + halves.error[hi],
        np.logaddexp(halves.log_value[lo], halves.log_value[hi]),
        halves.n_panels[lo] + halves.n_panels[hi],
    )


def integrate_batch_0inf(log_f, size, spec=None, scale=None, what="integrate_0inf"):
    """Integrate ``size`` integrands over (0, inf) simultaneously.

    ``scale`` optionally gives a per-integrand split point (array of length
    ``size``), ideally near the bulk of the integrand; it defaults to
    ``spec.scale``.
    """
    spec = spec or DEFAULT_SPEC
    if spec.substitution not in ("smooth", "linear", "rational"):
        raise ParameterError(f"substitution {spec.substitution!r} is not available on (0, inf)")
    scales = np.broadcast_to(np.asarray(spec.scale if scale is None else scale, dtype=float), (size,))
    if not (np.isfinite(scales) & (scales > 0)).all():
        raise ParameterError("substitution scales must be positive and finite")

    def log_g(v, owner):
        upper = owner >= size
        base = np.where(upper, owner - size, owner)
        x, logjac = _map_0inf(v, spec.substitution, scales[base], upper)
        return _add_jacobian(log_f(x, base), logjac)

    return _combine_halves(_adaptive(log_g, 2 * size, spec, what), size)


def peak_scale(log_f, size, lo=-12.0, hi=12.0, num=241):
    """Crude per-integrand location of the maximum of ``x * f(x)`` on a log grid.

    Useful as the ``scale`` argument of :func:`integrate_batch_0inf`.
    """
    grid = np.logspace(lo, hi, num)
    x = np.broadcast_to(grid, (size, num))
    idx = np.arange(size)[:, None]
    with np.errstate(all="ignore"):
        vals = np.asarray(log_f(x, idx), dtype=float) + np.log(x)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    best = grid[np.argmax(vals, axis=1)]
    return np.where(np.isfinite(vals.max(axis=1)), best, 1.0)
