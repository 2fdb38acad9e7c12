"""Gibbs-type exchangeable partition probability functions.

A Gibbs EPPF of type alpha < 1 factorizes as::

    p(n_1, ..., n_k) = V[n, k] * prod_j (1 - alpha)_(n_j - 1)

with V[1, 1] = 1 and the backward recursion
V[n, k] = (n - alpha k) V[n+1, k] + V[n+1, k+1].  A :class:`GibbsModel`
carries log V either as a table (always through n_max + 1, so one-step
predictive probabilities exist for n <= n_max) or as a function of (n, k).

Weight families provided here:

* Pitman-Yor PD(alpha, theta), closed form, including alpha < 0 with
  theta = m |alpha| (Fisher's finite symmetric Dirichlet).
* Generalized Gamma / tilted stable, by one quadrature per (n, k).
* Stable conditioned on T = t, through structural moments.
* Any mixture over t of the conditional stable model.
"""
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import gammainc, gammaln

from .combinatorics import (PartitionShape, integer_partitions, log_rising_factorial,
                            shape_counts_by_enumeration, shape_multiplicity)
from .errors import NumericalError, ParameterError, TableError
from .levy import stable_model, tilt
from .quadrature import (QuadratureSpec, integrate_0inf, integrate_batch_0inf, peak_scale)
from .structural import MOMENT_SPEC, structural_moments

#: Tables are preferred up to this n; beyond it a functional form is used when available.
TABLE_PREFERENCE_N = 30

GG_SPEC = QuadratureSpec(rel_tol=1e-11, abs_tol=0.0)
MIXTURE_SPEC = QuadratureSpec(rel_tol=1e-10, abs_tol=0.0)

V11_TOLERANCE = 1e-8
RECURSION_TOLERANCE = 1e-6
NORMALIZATION_TOLERANCE = 1e-6
MIXING_NORMALIZATION_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class GibbsModel:
    """Gibbs-type partition model of type ``alpha``.

    ``log_v_table[n, k]`` holds log V for 1 <= k <= n <= table_n (row and
    column 0 unused, -inf marks V = 0 and entries with k > n).
    """

    alpha: float
    log_v_table: Optional[np.ndarray] = None
    log_v_func: Optional[Callable[[int, int], float]] = None
    label: str = "gibbs"
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.alpha < 1:
            raise ParameterError(f"Gibbs type alpha must be < 1, got {self.alpha!r}")
        if self.log_v_table is None and self.log_v_func is None:
            raise TableError("a GibbsModel needs a V table or a V function")
        if self.log_v_table is not None:
            tab = np.array(self.log_v_table, dtype=float)
            if tab.ndim != 2 or tab.shape[0] != tab.shape[1] or tab.shape[0] < 2:
                raise TableError(f"V table must be square with at least one row, got shape {tab.shape}")
            if np.isnan(tab).any() or np.isposinf(tab).any():
                raise TableError("V table contains nan or +inf")
            tab.setflags(write=False)
            object.__setattr__(self, "log_v_table", tab)

    @property
    def table_n(self):
        """Largest n covered by the table (0 without a table)."""
        return 0 if self.log_v_table is None else self.log_v_table.shape[0] - 1

    @property
    def n_max(self):
        """Largest n for which EPPF values and one-step predictions are available."""
        if self.log_v_func is not None:
            return math.inf
        return self.table_n - 1

    def log_v(self, n, k):
        if not (1 <= k <= n):
            raise ParameterError(f"need 1 <= k <= n, got n={n}, k={k}")
        if n <= self.table_n and (n <= TABLE_PREFERENCE_N or self.log_v_func is None):
            return float(self.log_v_table[n, k])
        if self.log_v_func is not None:
            return float(self.log_v_func(n, k))
        raise TableError(f"n={n} exceeds the V table (n <= {self.table_n})")

    def v(self, n, k):
        return math.exp(self.log_v(n, k))

    def v_rows(self, n=None):
        """Linear V as triangular rows [[V11], [V21, V22], ...] through n."""
        n = self.table_n if n is None else n
        return [[self.v(i, k) for k in range(1, i + 1)] for i in range(1, n + 1)]


def _table_from_func(log_v, n_top):
    tab = np.full((n_top + 1, n_top + 1), -np.inf)
    for n in range(1, n_top + 1):
        for k in range(1, n + 1):
            tab[n, k] = log_v(n, k)
    return tab


# --------------------------------------------------------------------------
# EPPF evaluation


def log_block_weight(alpha, size):
    """log (1 - alpha)_(size - 1), the rising factorial with unit step."""
    sign, val = log_rising_factorial(1.0 - alpha, size - 1)
    if sign <= 0:
        raise ParameterError(f"block weight is not positive for alpha={alpha}")
    return val


def log_gibbs_eppf(model, shape):
    shape = PartitionShape(shape)
    lv = model.log_v(shape.n, shape.k)
    if lv == -math.inf:
        return -math.inf
    return lv + math.fsum(log_block_weight(model.alpha, s) for s in shape)


def gibbs_eppf(model, shape):
    """Probability of one particular set partition whose block sizes are ``shape``."""
    return math.exp(log_gibbs_eppf(model, shape))


@dataclass(frozen=True)
class ShapeRow:
    shape: PartitionShape
    multiplicity: int
    probability: float
    log_probability: float


def eppf_table(model, n):
    """EPPF of every shape of [n], largest block first."""
    rows = []
    for shape in integer_partitions(n):
        lp = log_gibbs_eppf(model, shape)
        rows.append(ShapeRow(shape, shape_multiplicity(shape), math.exp(lp), lp))
    return rows


def shape_total(model, n):
    """Sum over shapes of multiplicity * EPPF (1 for a normalized model)."""
    return math.fsum(r.multiplicity * r.probability for r in eppf_table(model, n))


# --------------------------------------------------------------------------
# Pitman-Yor


def _check_pd(alpha, theta):
    alpha = float(alpha)
    theta = float(theta)
    if not (math.isfinite(alpha) and math.isfinite(theta)):
        raise ParameterError("alpha and theta must be finite")
    if alpha >= 1:
        raise ParameterError(f"PD requires alpha < 1, got {alpha}")
    if alpha >= 0:
        if not theta > -alpha:
            raise ParameterError(f"PD({alpha}, theta) requires theta > -alpha, got {theta}")
        return alpha, theta, None
    m = theta / -alpha
    m_int = round(m)
    if m_int < 1 or abs(m - m_int) > 1e-9 * max(1.0, m):
        raise ParameterError(
            f"PD with alpha={alpha} < 0 requires theta = m|alpha| for a positive integer m, got theta={theta}")
    return alpha, -alpha * m_int, int(m_int)


def pd_log_v(alpha, theta, n, k):
    """log V for PD(alpha, theta): (theta + alpha)_(k-1; alpha) / (1 + theta)_(n-1)."""
    s_num, num = log_rising_factorial(theta + alpha, k - 1, alpha)
    if s_num == 0:
        return -math.inf
    if s_num < 0:
        raise NumericalError(f"negative PD weight at n={n}, k={k}")
    _, den = log_rising_factorial(1.0 + theta, n - 1)
    return num - den


def _digits_lost(alpha, theta):
    lost = 0.0
    if theta + alpha != 0:
        lost = max(lost, math.log10(max(abs(theta), abs(alpha), 1e-300) / abs(theta + alpha)))
    if alpha > 0:
        lost = max(lost, math.log10(1.0 / (1.0 - alpha)))
    return lost


def pd_v_weights(alpha, theta, N):
    """PD(alpha, theta) weights as a table through N + 1 plus the closed form."""
    alpha, theta, m = _check_pd(alpha, theta)
    N = _check_n(N)
    lost = _digits_lost(alpha, theta)
    diagnostics = {"digits_lost_to_cancellation": lost}
    if lost > 6:
        warnings.warn(f"PD({alpha}, {theta}) is near a parameter boundary: about {lost:.1f} digits "
                      "are lost to cancellation in the rising factorials", RuntimeWarning, stacklevel=2)
        diagnostics["boundary_flag"] = True

    def log_v(n, k):
        return pd_log_v(alpha, theta, n, k)

    params = {"theta": theta}
    label = "pd"
    if m is not None:
        params["m"] = m
        label = "fisher"
    return GibbsModel(alpha, _table_from_func(log_v, N + 1), log_v, label, params,
                      {"exact": True}, diagnostics)


def _check_n(N):
    if int(N) != N or N < 1:
        raise ParameterError(f"N must be a positive integer, got {N!r}")
    return int(N)


# --------------------------------------------------------------------------
# generalized Gamma


def _check_gg(alpha, delta, zeta):
    if not 0 < alpha < 1:
        raise ParameterError(f"generalized Gamma requires 0 < alpha < 1, got {alpha}")
    if not (delta > 0 and math.isfinite(delta)):
        raise ParameterError(f"delta must be positive, got {delta}")
    if not (zeta >= 0 and math.isfinite(zeta)):
        raise ParameterError(f"zeta must be >= 0, got {zeta}")


def _pairs(n_top):
    ns, ks = [], []
    for n in range(1, n_top + 1):
        for k in range(1, n + 1):
            ns.append(n)
            ks.append(k)
    return np.array(ns), np.array(ks)


def gg_v_weights(alpha, delta, zeta, N, spec=None):
    """Generalized Gamma weights through N + 1 by quadrature.

    V[n, k] = e^(delta zeta) (delta alpha)^k 2^n / Gamma(n)
              * int_0^inf l^(n-1) exp(-delta (c + 2l)^alpha) (c + 2l)^(k alpha - n) dl

    with c = zeta**(1/alpha).  Validates V[1, 1] = 1 and the backward
    recursion before returning; results are cached per argument tuple.
    """
    _check_gg(alpha, delta, zeta)
    return _gg_v_weights(float(alpha), float(delta), float(zeta), _check_n(N), spec or GG_SPEC)


@lru_cache(maxsize=64)
def _gg_v_weights(alpha, delta, zeta, N, spec):
    ns, ks = _pairs(N + 1)
    c = zeta ** (1.0 / alpha)

    def log_f(lam, idx):
        n = ns[idx]
        u = c + 2.0 * lam
        return (n - 1) * np.log(lam) - delta * u ** alpha + (ks[idx] * alpha - n) * np.log(u)

    scales = peak_scale(log_f, ns.size)
    res = integrate_batch_0inf(log_f, ns.size, spec, scale=scales, what="generalized Gamma V weights")
    log_v = (delta * zeta + ks * math.log(delta * alpha) + ns * math.log(2.0) - gammaln(ns)
             + res.log_value)
    tab = np.full((N + 2, N + 2), -np.inf)
    tab[ns, ks] = log_v
    model = GibbsModel(alpha, tab, None, "gg", {"delta": delta, "zeta": zeta},
                       {"rel_tol": spec.rel_tol, "abs_tol": spec.abs_tol},
                       {"max_quadrature_rel_error": float(np.max(res.error / res.value))})
    _validate_table(model, N)
    return model


def _validate_table(model, N, v11_tol=V11_TOLERANCE, rec_tol=RECURSION_TOLERANCE):
    v11 = model.v(1, 1)
    if abs(v11 - 1.0) > v11_tol:
        raise NumericalError(f"{model.label}: V[1,1] = {v11!r} differs from 1 by more than {v11_tol}")
    rec = verify_gibbs_recursion(model, N)
    model.diagnostics["recursion_residual"] = rec
    model.diagnostics["v11_error"] = abs(v11 - 1.0)
    if not rec <= rec_tol:
        raise NumericalError(f"{model.label}: recursion residual {rec:.3g} exceeds {rec_tol}")


# --------------------------------------------------------------------------
# stable conditioned on T = t


def _conditional_log_prefactor(alpha, kappa, ns, ks):
    # log of Gamma(1 - alpha) / Gamma(n - k alpha) * (alpha kappa)^(k-1), the t-free part
    return (gammaln(1.0 - alpha) - gammaln(ns - ks * alpha) + (ks - 1) * math.log(alpha * kappa))


def _moment_orders(alpha, ns, ks):
    return ns - 1 - (ks - 1) * alpha


def conditional_stable_model(alpha, delta, t, N, spec=None, allow_series=None):
    """EPPF of the stable(alpha, delta) model conditioned on T = t.

    V[n, k] = Gamma(1-alpha) / Gamma(n - k alpha) * (alpha kappa / t^alpha)^(k-1)
              * mu(n - 1 - k alpha + alpha | t)

    where mu(q | t) is the q-th structural moment.  ``kappa`` is the
    constant in the Lévy density x^(-1-alpha) kappa alpha / Gamma(1-alpha):
    kappa = delta 2^alpha in this package's stable convention.  The formula
    with kappa = 1 is only normalized for the standard (psi(l) = l^alpha)
    scaling; kappa is therefore recomputed from the n = 2 normalization
    p(2) + p(1,1) = 1 and compared with delta 2^alpha, and both numbers are
    kept in ``diagnostics``.  Normalization is then checked for every
    n <= min(N, 8).
    """
    _check_gg(alpha, delta, 0.0)
    if not (t > 0 and math.isfinite(t)):
        raise ParameterError(f"t must be positive, got {t}")
    N = _check_n(N)
    spec = spec or MOMENT_SPEC
    if allow_series is None:
        allow_series = True
    model = stable_model(alpha, delta)
    ns, ks = _pairs(N + 1)
    qs = _moment_orders(alpha, ns, ks)
    orders = np.concatenate([qs, [1.0, 1.0 - alpha]])
    res = structural_moments(model, orders, float(t), spec, allow_series=allow_series)
    log_mu = res.log_value

    mu1, mu1a = res.value[-2], res.value[-1]
    kappa_cal = ((1.0 - mu1) * math.exp(gammaln(2.0 - 2.0 * alpha) - gammaln(1.0 - alpha))
                 * t ** alpha / (alpha * mu1a))
    kappa = delta * 2.0 ** alpha
    cal_residual = abs(kappa_cal / kappa - 1.0)
    if not cal_residual <= NORMALIZATION_TOLERANCE:
        raise NumericalError(
            f"n=2 normalization gives kappa={kappa_cal!r}, expected delta*2^alpha={kappa!r} "
            f"(relative gap {cal_residual:.3g})")

    log_v = (_conditional_log_prefactor(alpha, kappa, ns, ks) - (ks - 1) * alpha * math.log(t)
             + log_mu[:-2])
    tab = np.full((N + 2, N + 2), -np.inf)
    tab[ns, ks] = log_v
    diagnostics = {
        "kappa": kappa,
        "kappa_calibrated": kappa_cal,
        "kappa_calibration_residual": cal_residual,
        "correction_factor_vs_unit_kappa": kappa,
        "density_method": model.density_method,
        "max_moment_rel_error": float(np.max(res.error / res.value)),
    }
    out = GibbsModel(alpha, tab, None, "conditional-stable", {"delta": delta, "t": float(t)},
                     {"rel_tol": spec.rel_tol, "abs_tol": spec.abs_tol}, diagnostics)
    worst = max(abs(shape_total(out, n) - 1.0) for n in range(1, min(N, 8) + 1))
    diagnostics["normalization_residual"] = worst
    if not worst <= NORMALIZATION_TOLERANCE:
        raise NumericalError(f"conditional stable EPPF normalization off by {worst:.3g}")
    return out


def conditional_stable_eppf(alpha, delta, t, shape, spec=None):
    shape = PartitionShape(shape)
    return gibbs_eppf(conditional_stable_model(alpha, delta, t, shape.n, spec), shape)


# --------------------------------------------------------------------------
# mixtures over t


@dataclass(frozen=True, eq=False)
class MixingDensity:
    """Probability density gamma(t) on (0, inf), given by its logarithm.

    Normalization is checked by quadrature when constructed.
    """

    name: str
    log_density: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)
    scale: float = 1.0
    normalization: float = field(default=math.nan, compare=False)

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ParameterError("mixing scale must be positive")
        spec = QuadratureSpec(rel_tol=1e-12, abs_tol=0.0, scale=self.scale)
        total = integrate_0inf(lambda x: np.asarray(self.log_density(x), dtype=float), spec).value
        object.__setattr__(self, "normalization", total)
        if not abs(total - 1.0) <= MIXING_NORMALIZATION_TOLERANCE:
            raise ParameterError(f"mixing density {self.name!r} integrates to {total!r}, not 1")

    def __call__(self, t):
        return np.exp(self.log_density(np.asarray(t, dtype=float)))


def tilted_stable_mixing(alpha, delta, lam):
    """Law of T under stable(alpha, delta) tilted by ``lam`` (lam = 0 gives the stable law)."""
    base = stable_model(alpha, delta)
    model = tilt(base, lam) if lam > 0 else base
    scale = _mode_scale(model.log_density)
    return MixingDensity("tilted-stable" if lam > 0 else "stable", model.log_density,
                         {"alpha": alpha, "delta": delta, "lambda": float(lam)}, scale)


def stable_mixing(alpha, delta):
    return tilted_stable_mixing(alpha, delta, 0.0)


def truncated_gamma_mixing(shape=2.0, rate=1.0, upper=10.0):
    """Gamma(shape, rate) restricted to (0, upper)."""
    if not (shape > 0 and rate > 0 and upper > 0):
        raise ParameterError("truncated Gamma needs positive shape, rate and upper bound")
    log_mass = math.log(gammainc(shape, rate * upper))
    log_c = shape * math.log(rate) - math.lgamma(shape) - log_mass

    def log_density(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            val = log_c + (shape - 1.0) * np.log(t) - rate * t
        return np.where((t > 0) & (t < upper), val, -np.inf)

    return MixingDensity("truncated-gamma", log_density,
                         {"shape": shape, "rate": rate, "upper": upper}, shape / rate)


def lognormal_bump(center, width):
    """Log-normal density with median ``center`` and log-scale ``width``."""
    if not (center > 0 and width > 0):
        raise ParameterError("log-normal bump needs positive center and width")
    mu = math.log(center)
    log_c = -math.log(width) - 0.5 * math.log(2.0 * math.pi)

    def log_density(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            lt = np.log(t)
        return log_c - lt - 0.5 * ((lt - mu) / width) ** 2

    return MixingDensity("lognormal-bump", log_density, {"center": center, "width": width}, center)


def _mode_scale(log_density):
    scale = peak_scale(lambda x, idx: log_density(x), 1)
    return float(scale[0])


def mixture_v_weights(alpha, delta, mixing, N, spec=None, moment_spec=None):
    """V weights of the stable(alpha, delta) conditional EPPF mixed over t ~ ``mixing``.

    The t-dependent part t^(-alpha (k-1)) mu(q | t) is integrated against
    the mixing density, with all structural moments at the outer nodes
    computed in one inner batch.
    """
    _check_gg(alpha, delta, 0.0)
    N = _check_n(N)
    return _mixture_v_weights(float(alpha), float(delta), mixing, N,
                              spec or MIXTURE_SPEC, moment_spec or MOMENT_SPEC)


@lru_cache(maxsize=64)
def _mixture_v_weights(alpha, delta, mixing, N, spec, moment_spec):
    model = stable_model(alpha, delta)
    ns, ks = _pairs(N + 1)
    qs = _moment_orders(alpha, ns, ks)

    def log_f(t, idx):
        t = np.asarray(t, dtype=float)
        idx = np.broadcast_to(idx, t.shape)
        out = np.full(t.shape, -np.inf)
        lg = np.asarray(mixing.log_density(t), dtype=float)
        live = np.isfinite(lg) & (t > 0) & np.isfinite(t)
        if live.any():
            tl, il = t[live], idx[live]
            mom = structural_moments(model, qs[il], tl, moment_spec, allow_series=True)
            out[live] = lg[live] - (ks[il] - 1) * alpha * np.log(tl) + mom.log_value
        return out

    res = integrate_batch_0inf(log_f, ns.size, spec, scale=np.full(ns.size, mixing.scale),
                               what="mixture V weights")
    log_v = _conditional_log_prefactor(alpha, delta * 2.0 ** alpha, ns, ks) + res.log_value
    tab = np.full((N + 2, N + 2), -np.inf)
    tab[ns, ks] = log_v
    return GibbsModel(alpha, tab, None, "mixture", {"delta": delta, "mixing": mixing.name,
                                                     **mixing.params},
                      {"rel_tol": spec.rel_tol, "moment_rel_tol": moment_spec.rel_tol},
                      {"max_quadrature_rel_error": float(np.max(res.error / res.value))})


def mixture_eppf(alpha, delta, mixing, shape, spec=None):
    shape = PartitionShape(shape)
    return gibbs_eppf(mixture_v_weights(alpha, delta, mixing, shape.n, spec), shape)


# --------------------------------------------------------------------------
# checks


def verify_gibbs_recursion(model, N):
    """Max relative residual of V[n,k] = (n - alpha k) V[n+1,k] + V[n+1,k+1] over k <= n <= N.

    Entries with V[n, k] = 0 contribute the absolute residual instead.
    """
    worst = 0.0
    for n in range(1, N + 1):
        for k in range(1, n + 1):
            lv = model.log_v(n, k)
            a = model.log_v(n + 1, k)
            b = model.log_v(n + 1, k + 1)
            if lv == -math.inf:
                r = (n - model.alpha * k) * math.exp(a) + math.exp(b)
            else:
                r = abs(1.0 - (n - model.alpha * k) * math.exp(a - lv) - math.exp(b - lv))
            worst = max(worst, r)
    return worst


def verify_normalization(model, n):
    """|sum over all set partitions of [n] of p - 1|, by exhaustive enumeration.

    ``model`` is a :class:`GibbsModel` or any callable mapping a shape to
    its EPPF value.
    """
    eppf = (lambda s: gibbs_eppf(model, s)) if isinstance(model, GibbsModel) else model
    if n == 1:
        return abs(eppf(PartitionShape((1,))) - 1.0)
    counts = shape_counts_by_enumeration(n)
    return abs(math.fsum(c * eppf(s) for s, c in counts.items()) - 1.0)


def verify_consistency(model, N):
    """Max over shapes with n < N of |p(shape) - sum of its one-step extensions|."""
    worst = 0.0
    for n in range(1, N):
        for shape in integer_partitions(n):
            parts = list(shape)
            ext = [PartitionShape(parts[:j] + [parts[j] + 1] + parts[j + 1:]) for j in range(len(parts))]
            ext.append(PartitionShape(parts + [1]))
            lhs = gibbs_eppf(model, shape)
            rhs = math.fsum(gibbs_eppf(model, e) for e in ext)
            worst = max(worst, abs(lhs - rhs) / lhs if lhs > 0 else abs(rhs))
    return worst


# --------------------------------------------------------------------------
# JSON tables

TABLE_FORMAT = "gibbspk-v-table"
TABLE_VERSION = 1


def v_table_document(model):
    """Versioned JSON-ready document of the model's V table."""
    if model.log_v_table is None:
        raise TableError("model has no V table to export")
    params = {k: (v if isinstance(v, (int, float, str)) else str(v)) for k, v in model.params.items()}
    return {
        "format": TABLE_FORMAT,
        "version": TABLE_VERSION,
        "label": model.label,
        "alpha": model.alpha,
        "params": params,
        "N": model.table_n,
        "tolerances": dict(model.tolerances),
        "rows": [[format(v, ".17g") for v in row] for row in model.v_rows()],
    }


def dump_v_table(model, fp):
    json.dump(v_table_document(model), fp, indent=1)
    fp.write("\n")


def model_from_document(doc):
    """Rebuild a :class:`GibbsModel` from :func:`v_table_document` output."""
    try:
        if doc["format"] != TABLE_FORMAT:
            raise TableError(f"unknown table format {doc['format']!r}")
        if int(doc["version"]) > TABLE_VERSION:
            raise TableError(f"table version {doc['version']} is newer than supported ({TABLE_VERSION})")
        alpha = float(doc["alpha"])
        rows = [[float(x) for x in row] for row in doc["rows"]]
        N = int(doc["N"])
    except (KeyError, TypeError, ValueError) as exc:
        raise TableError(f"malformed V table document: {exc}") from exc
    if len(rows) != N or any(len(row) != i + 1 for i, row in enumerate(rows)):
        raise TableError("V table rows must be triangular with N rows")
    if any(v < 0 or not math.isfinite(v) for row in rows for v in row):
        raise TableError("V table entries must be finite and non-negative")
    tab = np.full((N + 1, N + 1), -np.inf)
    with np.errstate(divide="ignore"):
        for i, row in enumerate(rows, start=1):
            tab[i, 1:i + 1] = np.log(row)
    return GibbsModel(alpha, tab, None, doc.get("label", "imported"), dict(doc.get("params", {})),
                      dict(doc.get("tolerances", {})), {"source": "imported"})


def load_v_table(fp):
    try:
        doc = json.load(fp)
    except json.JSONDecodeError as exc:
        raise TableError(f"V table is not valid JSON: {exc}") from exc
    return model_from_document(doc)
