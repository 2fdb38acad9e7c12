"""Lévy densities, Laplace exponents and exponential tilting.

Stable models keep the convention in which the Lévy density carries a
``2**alpha`` factor::

    rho(x) = delta * 2**alpha * alpha / Gamma(1 - alpha) * x**(-1 - alpha)
    psi(l) = delta * (2 * l)**alpha

The more common normalization ``psi(l) = c * l**alpha`` corresponds to
``c = delta * 2**alpha``.  Tilting by ``l = zeta**(1/alpha) / 2`` gives the
generalized Gamma model with ``psi(b) = -delta*zeta + delta*(zeta**(1/alpha) + 2b)**alpha``.
"""
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln

from .errors import ModelError, ParameterError
from .quadrature import QuadratureSpec, integrate_0inf, integrate_batch_01

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GammaParams:
    theta: float
    rate: float = 1.0

    def __post_init__(self):
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise ParameterError(f"Gamma shape theta must be positive, got {self.theta!r}")
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ParameterError(f"Gamma rate must be positive, got {self.rate!r}")


@dataclass(frozen=True)
class StableParams:
    alpha: float
    delta: float

    def __post_init__(self):
        _check_stable(self.alpha, self.delta)


@dataclass(frozen=True)
class TiltedStableParams:
    alpha: float
    delta: float
    zeta: float

    def __post_init__(self):
        _check_stable(self.alpha, self.delta)
        if not (self.zeta >= 0 and math.isfinite(self.zeta)):
            raise ParameterError(f"tilt zeta must be >= 0, got {self.zeta!r}")

    @property
    def tilt(self):
        return self.zeta ** (1.0 / self.alpha) / 2.0


def _check_stable(alpha, delta):
    if not 0 < alpha < 1:
        raise ParameterError(f"stable index alpha must lie in (0, 1), got {alpha!r}")
    if not (delta > 0 and math.isfinite(delta)):
        raise ParameterError(f"stable scale delta must be positive, got {delta!r}")


# --------------------------------------------------------------------------
# base families (untilted)


def _gamma_log_levy(p, x):
    return math.log(p.theta) - np.log(x) - p.rate * x


def _gamma_psi(p, lam):
    return p.theta * np.log1p(lam / p.rate)


def _gamma_log_density(p, t):
    return p.theta * math.log(p.rate) - gammaln(p.theta) + (p.theta - 1.0) * np.log(t) - p.rate * t


def _stable_log_const(p):
    return math.log(p.delta) + p.alpha * math.log(2.0) + math.log(p.alpha) - gammaln(1.0 - p.alpha)


def _stable_log_levy(p, x):
    return _stable_log_const(p) - (1.0 + p.alpha) * np.log(x)


def _stable_psi(p, lam):
    return p.delta * (2.0 * lam) ** p.alpha


def _stable_log_density(p, t):
    if p.alpha == 0.5:
        return stable_half_log_density(t, p.delta)
    return stable_log_density_series(t, p.alpha, p.delta)


def stable_half_log_density(t, delta):
    """log of delta / sqrt(2 pi) * t**(-3/2) * exp(-delta**2 / (2 t))."""
    t = np.asarray(t, dtype=float)
    return math.log(delta) - 0.5 * _LOG_2PI - 1.5 * np.log(t) - delta * delta / (2.0 * t)


def inverse_gaussian_log_density(t, delta, zeta):
    """Inverse Gaussian (delta, zeta) log-density.

    delta / sqrt(2 pi) * exp(delta zeta) * t**(-3/2) * exp(-(delta**2 / t + zeta**2 t) / 2)
    """
    t = np.asarray(t, dtype=float)
    return (math.log(delta) - 0.5 * _LOG_2PI + delta * zeta - 1.5 * np.log(t)
            - 0.5 * (delta * delta / t + zeta * zeta * t))


# Kanter's integral representation of the standard one-sided stable law
# (Laplace transform exp(-l**alpha)):
#   f(x) = alpha/(1-alpha) x**(-1/(1-alpha)) / pi * int_0^pi A(u) exp(-A(u) x**(-alpha/(1-alpha))) du
#   A(u) = sin(alpha u)**(alpha/(1-alpha)) sin((1-alpha) u) / sin(u)**(1/(1-alpha))
# A is increasing with A(0) = alpha**(alpha/(1-alpha)) (1-alpha); the factor
# exp(-A(0) z) is pulled out analytically so large z keeps full precision.

# For large x the integrand spikes below float resolution next to u = pi, so
# the convergent power series in x**-alpha is used there instead:
#   f(x) = 1/pi sum_{k>=1} (-1)**(k+1) Gamma(alpha k + 1) / k! sin(pi alpha k) x**(-alpha k - 1)

_SERIES_SPEC = QuadratureSpec(rel_tol=1e-12, abs_tol=0.0, substitution="linear", max_subdivisions=4000)
_KANTER_MIN_Z = 1e-2  # below this x**(-alpha/(1-alpha)) the power series is used
_SERIES_TERMS = 80
_series_cache = {}
_SERIES_CACHE_MAX = 500_000


def _power_series_log_density(log_x, alpha):
    y = np.exp(-alpha * log_x)
    k = np.arange(1, _SERIES_TERMS + 1)
    log_mag = gammaln(alpha * k + 1.0) - gammaln(k + 1.0)
    coef = (-1.0) ** (k + 1) * np.exp(log_mag) * np.sin(np.pi * alpha * k)
    total = np.sum(coef[None, :] * y[:, None] ** k[None, :], axis=1)
    return np.log(total / np.pi) - log_x


def _log_sinc(x):
    """log(sin(x) / x) for 0 <= x < pi, accurate near 0."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    small = -x2 * (1.0 / 6 + x2 * (1.0 / 180 + x2 * (1.0 / 2835 + x2 / 37800)))
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.log(np.sin(x) / np.where(x > 0, x, 1.0))
    return np.where(x < 0.1, small, big)


def _kanter_log_ratio(v, alpha):
    """log A(u) - log A(0) for u = pi v.

    The log(u) terms cancel exactly, leaving a combination of log-sinc terms
    that is accurate near u = 0.  sin(u) itself is taken from the nearer
    endpoint so relative accuracy survives near u = pi.
    """
    b = 1.0 - alpha
    u = np.pi * v
    near_pi = v > 0.5
    w = np.pi * (1.0 - v)
    with np.errstate(divide="ignore"):
        log_sinc_u = np.where(near_pi, np.log(np.sin(w)) - np.log(u), _log_sinc(np.where(near_pi, 0.0, u)))
    return (alpha / b) * _log_sinc(alpha * u) + _log_sinc(b * u) - log_sinc_u / b


def _stable_lead(alpha, delta):
    """(C, beta) such that log f(t) = -C t**-beta + (slowly varying part)."""
    b = 1.0 - alpha
    beta = alpha / b
    log_a0 = beta * math.log(alpha) + math.log(b)
    log_sigma = math.log(2.0) + math.log(delta) / alpha  # T = sigma * S, S standard
    return math.exp(log_a0 + beta * log_sigma), beta


def stable_log_density_rest(t, alpha, delta):
    """log f(t) + C t**-beta for the stable law, see :func:`_stable_lead`.

    The leading term is removed analytically, so the remainder keeps full
    precision even when log f(t) itself is of order -1e10.  Values are cached
    per (alpha, delta, t).
    """
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    b = 1.0 - alpha
    beta = alpha / b
    log_sigma = math.log(2.0) + math.log(delta) / alpha
    out = np.empty(flat.size)
    missing = []
    for i, ti in enumerate(flat):
        val = _series_cache.get((alpha, delta, float(ti)))
        if val is not None:
            out[i] = val
        elif not ti > 0:
            out[i] = -np.inf
        else:
            missing.append(i)
    if not missing:
        return out.reshape(t.shape)
    missing = np.array(missing)
    log_x = np.log(flat[missing]) - log_sigma
    z = np.exp(-beta * log_x)
    log_a0 = beta * math.log(alpha) + math.log(b)
    a0 = math.exp(log_a0)
    far = z < _KANTER_MIN_Z
    vals = np.empty(missing.size)
    if far.any():
        vals[far] = _power_series_log_density(log_x[far], alpha) + a0 * z[far]
    if (~far).any():
        zn = z[~far]

        def log_f(v, idx):
            d = _kanter_log_ratio(v, alpha)
            return d - a0 * zn[idx] * np.expm1(d)

        res = integrate_batch_01(log_f, int(zn.size), _SERIES_SPEC, what="stable density series")
        vals[~far] = math.log(alpha / b) + log_a0 - log_x[~far] / b + res.log_value
    vals -= log_sigma
    if len(_series_cache) > _SERIES_CACHE_MAX:
        _series_cache.clear()
    for j, i in enumerate(missing):
        out[i] = vals[j]
        _series_cache[(alpha, delta, float(flat[i]))] = float(vals[j])
    return out.reshape(t.shape)


def stable_log_density_series(t, alpha, delta):
    """Stable log-density for any alpha in (0, 1), evaluated numerically.

    Uses Kanter's integral by quadrature for small and moderate arguments
    and the convergent power series for large ones.  This is the
    "series-computed" path: agreement with a 40-digit reference is about
    1e-15 * max(1, |log f|) in log f.
    """
    t = np.asarray(t, dtype=float)
    c, beta = _stable_lead(alpha, delta)
    with np.errstate(divide="ignore", over="ignore"):
        lead = c * np.where(t > 0, t, 1.0) ** -beta
    return np.where(t > 0, stable_log_density_rest(t, alpha, delta) - lead, -np.inf)


# --------------------------------------------------------------------------
# model


@dataclass(frozen=True)
class LevyModel:
    """A Lévy density with its Laplace exponent and (optionally) the law of T.

    ``base`` holds the untilted family parameters and ``tilt`` the
    accumulated exponential tilt l >= 0, so that::

        rho(x) = exp(-l x) rho_base(x)
        psi(b) = psi_base(b + l) - psi_base(l)
        f(t)   = exp(psi_base(l) - l t) f_base(t)
    """

    name: str
    base: object
    tilt: float = 0.0

    @property
    def params(self):
        if isinstance(self.base, StableParams) and self.tilt > 0:
            zeta = (2.0 * self.tilt) ** self.base.alpha
            return TiltedStableParams(self.base.alpha, self.base.delta, zeta)
        return self.base

    @property
    def is_stable_family(self):
        return isinstance(self.base, StableParams)

    @property
    def alpha(self):
        """Stable index, or 0 for the Gamma family."""
        return self.base.alpha if self.is_stable_family else 0.0

    @property
    def density_method(self):
        if self.is_stable_family and self.base.alpha != 0.5:
            return "series-computed"
        return "closed-form"

    @property
    def total_mass_finite(self):
        # Gamma and stable Lévy densities are not integrable at 0; tilting
        # only changes the tail, so every model here has infinite activity.
        return False

    def _base_log_levy(self, x):
        return _gamma_log_levy(self.base, x) if not self.is_stable_family else _stable_log_levy(self.base, x)

    def _base_psi(self, lam):
        return _gamma_psi(self.base, lam) if not self.is_stable_family else _stable_psi(self.base, lam)

    def _base_log_density(self, t):
        if self.is_stable_family:
            return _stable_log_density(self.base, t)
        return _gamma_log_density(self.base, t)

    def log_levy_density(self, x):
        x = np.asarray(x, dtype=float)
        return self._base_log_levy(x) - self.tilt * x

    def levy_density(self, x):
        return np.exp(self.log_levy_density(x))

    def laplace_exponent(self, b):
        b = np.asarray(b, dtype=float)
        if self.tilt == 0:
            return self._base_psi(b)
        return self._base_psi(b + self.tilt) - self._base_psi(self.tilt)

    def log_density(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._base_log_density(np.where(t > 0, t, 1.0))
        out = np.where(t > 0, out, -np.inf)
        if self.tilt:
            out = out + float(self._base_psi(self.tilt)) - self.tilt * t
        return out

    def density(self, t):
        return np.exp(self.log_density(t))

    def log_density_ratio(self, t, p, pbar=None):
        """log f((1 - p) t) - log f(t) for 0 < p < 1.

        Computed without subtracting the two log-densities: the leading
        t-behaviour of each family is differenced analytically, which keeps
        full precision when f(t) is astronomically small.
        """
        t = np.asarray(t, dtype=float)
        p = np.asarray(p, dtype=float)
        pbar = 1.0 - p if pbar is None else np.asarray(pbar, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_pbar = np.where(p < 0.5, np.log1p(-p), np.log(pbar))
            if not self.is_stable_family:
                out = (self.base.theta - 1.0) * log_pbar + self.base.rate * p * t
            else:
                alpha, delta = self.base.alpha, self.base.delta
                c, beta = _stable_lead(alpha, delta)
                lead = -c * t ** -beta * np.expm1(-beta * log_pbar)
                if alpha == 0.5:
                    rest = -1.5 * log_pbar
                else:
                    rest = stable_log_density_rest(pbar * t, alpha, delta) - stable_log_density_rest(t, alpha, delta)
                out = lead + rest
        return out + self.tilt * p * t

    def tail_mass(self, eps, upper=1.0):
        """Integral of rho over (eps, upper), in closed form for the untilted families."""
        if self.tilt:
            raise ModelError("tail_mass is only available in closed form for untilted models")
        if self.is_stable_family:
            c = math.exp(_stable_log_const(self.base)) / self.base.alpha
            return c * (eps ** -self.base.alpha - upper ** -self.base.alpha)
        from scipy.special import exp1

        return self.base.theta * (exp1(self.base.rate * eps) - exp1(self.base.rate * upper))


def gamma_model(theta, rate=1.0):
    """Gamma(theta, rate) subordinator: rho(x) = theta x^-1 e^(-rate x)."""
    return LevyModel("gamma", GammaParams(float(theta), float(rate)))


def stable_model(alpha, delta):
    """Positive alpha-stable subordinator with psi(l) = delta (2 l)**alpha."""
    return LevyModel("stable", StableParams(float(alpha), float(delta)))


def generalized_gamma_model(alpha, delta, zeta):
    """Stable model tilted by l = zeta**(1/alpha) / 2."""
    p = TiltedStableParams(float(alpha), float(delta), float(zeta))
    return LevyModel("generalized_gamma", StableParams(p.alpha, p.delta), p.tilt)


def tilt(model, lam):
    """Exponentially tilt ``model`` by ``lam`` > 0."""
    lam = float(lam)
    if not lam > 0:
        raise ParameterError(f"tilt must be positive, got {lam!r}")
    if not math.isfinite(float(model._base_psi(model.tilt + lam))):
        raise ParameterError("Laplace exponent is infinite at the requested tilt")
    name = model.name if model.name != "stable" else "generalized_gamma"
    return replace(model, name=name, tilt=model.tilt + lam)


def laplace_exponent_by_quadrature(model, b, spec=None):
    """Integral of (1 - exp(-b x)) rho(x) over (0, inf) by quadrature."""
    if not b > 0:
        raise ParameterError("b must be positive")
    spec = spec or QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14)
    spec = spec.with_(scale=1.0 / b)

    def log_f(x):
        return np.log(-np.expm1(-b * x)) + model.log_levy_density(x)

    return integrate_0inf(log_f, spec)


def verify_laplace_exponent(model, b, spec=None):
    """|psi(b) - quadrature of the Lévy-Khintchine integral|."""
    return abs(float(model.laplace_exponent(b)) - laplace_exponent_by_quadrature(model, b, spec).value)
