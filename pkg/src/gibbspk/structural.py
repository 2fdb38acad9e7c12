"""Law of the first size-biased pick given the total mass.

For a subordinator with Lévy density rho and law f of T, the size-biased
first jump divided by T = t has density on (0, 1)::

    f(p | t) = p t rho(p t) f((1 - p) t) / f(t)

Everything is evaluated as a log-density, with log f((1-p)t) - log f(t)
taken from :meth:`LevyModel.log_density_ratio` so that small t (where f(t)
underflows by millions of orders of magnitude) loses no precision.  The
complement ``1 - p`` may be passed explicitly so that values near p = 1 keep
full precision.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ModelError, ParameterError
from .levy import LevyModel, tilt
from .quadrature import QuadratureSpec, integrate_batch_01

_LOG_2PI = math.log(2.0 * math.pi)

#: Default accuracy for structural moments.  Mixture EPPFs integrate these
#: over t, so they are kept well below the 1e-6 partition-level tolerance.
MOMENT_SPEC = QuadratureSpec(rel_tol=1e-11, abs_tol=0.0)


@dataclass(frozen=True)
class StructuralDensity:
    """Density of P1 = (first size-biased jump) / T given T = t."""

    source: LevyModel

    def log_pdf(self, p, t, pbar=None):
        p = np.asarray(p, dtype=float)
        t = np.asarray(t, dtype=float)
        pbar = 1.0 - p if pbar is None else np.asarray(pbar, dtype=float)
        inside = (p > 0) & (pbar > 0)
        ps = np.where(inside, p, 0.5)
        qs = np.where(inside, pbar, 0.5)
        m = self.source
        with np.errstate(divide="ignore", invalid="ignore"):
            pt = ps * t
            out = np.log(pt) + m.log_levy_density(pt) + m.log_density_ratio(t, ps, qs)
        return np.where(inside, out, -np.inf)

    def pdf(self, p, t, pbar=None):
        return np.exp(self.log_pdf(p, t, pbar))

    def normalization(self, t, spec=None):
        """Integral of the density over (0, 1) at each t."""
        return structural_moments(self.source, 0.0, t, spec).value


def structural_density(model, allow_series=False):
    """Structural density of ``model``.

    Stable models with alpha != 1/2 rely on the numerically evaluated
    density; they are refused unless ``allow_series`` is set.
    """
    if not isinstance(model, LevyModel):
        raise ModelError(f"expected a LevyModel, got {type(model).__name__}")
    if model.density_method != "closed-form" and not allow_series:
        raise ModelError(
            f"{model.name} with alpha={model.alpha} has no closed-form density; "
            "pass allow_series=True to use the series-computed density")
    return StructuralDensity(model)


# closed forms, used as independent oracles


def gamma_structural_log_pdf(p, theta, pbar=None):
    """Gamma(theta): Beta(1, theta) density theta (1 - p)**(theta - 1), free of t."""
    p = np.asarray(p, dtype=float)
    pbar = 1.0 - p if pbar is None else np.asarray(pbar, dtype=float)
    return math.log(theta) + (theta - 1.0) * np.log(pbar)


def stable_half_structural_log_pdf(p, t, delta, pbar=None):
    """Stable alpha = 1/2 (and any tilt of it).

    delta / sqrt(2 pi p t) * (1 - p)**(-3/2) * exp(-p delta**2 / (2 (1 - p) t))
    """
    p = np.asarray(p, dtype=float)
    t = np.asarray(t, dtype=float)
    pbar = 1.0 - p if pbar is None else np.asarray(pbar, dtype=float)
    return (math.log(delta) - 0.5 * _LOG_2PI - 0.5 * np.log(p * t) - 1.5 * np.log(pbar)
            - 0.5 * p * delta * delta / (pbar * t))


# --------------------------------------------------------------------------


def verify_tilt_invariance(model, lam, ps, ts, allow_series=False):
    """Max relative gap between the structural densities of ``model`` and its tilt.

    Evaluated on the product grid ``ps x ts``; denominators are floored at
    1e-300 so deep tails do not produce 0/0.
    """
    ps = np.asarray(ps, dtype=float)
    ts = np.asarray(ts, dtype=float)
    base = structural_density(model, allow_series)
    tilted = structural_density(tilt(model, lam), allow_series)
    P, T = np.meshgrid(ps, ts, indexing="ij")
    a = tilted.pdf(P, T)
    b = base.pdf(P, T)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def structural_moments(model, q, t, spec=None, allow_series=False):
    """E[P1**q | T = t] for broadcast arrays ``q`` and ``t``.

    Returns a :class:`~gibbspk.quadrature.BatchResult` over the flattened
    broadcast shape, carrying per-entry error estimates.
    """
    q, t = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(t, dtype=float))
    q = q.ravel()
    t = t.ravel()
    if (q < 0).any() or not np.isfinite(q).all():
        raise ParameterError("moment order q must be finite and >= 0")
    if not (t > 0).all() or not np.isfinite(t).all():
        raise ParameterError("t must be positive and finite")
    density = structural_density(model, allow_series)
    spec = spec or MOMENT_SPEC

    def log_f(p, pbar, idx):
        return density.log_pdf(p, t[idx], pbar) + q[idx] * np.log(p)

    return integrate_batch_01(log_f, q.size, spec, complement=True, what="structural moment")


def structural_moment(model, q, t, spec=None, allow_series=False):
    """E[P1**q | T = t] by quadrature over (0, 1)."""
    return float(structural_moments(model, q, t, spec, allow_series).value[0])


def stable_half_moment(q, t, delta):
    """Closed form of the alpha = 1/2 structural moment via Tricomi's U.

    delta / sqrt(2 pi t) * Gamma(q + 1/2) * U(q + 1/2, 3/2, delta**2 / (2 t))
    """
    from scipy.special import hyperu

    q = np.asarray(q, dtype=float)
    return (delta / np.sqrt(2.0 * np.pi * t) * np.exp(gammaln(q + 0.5))
            * hyperu(q + 0.5, 1.5, delta * delta / (2.0 * t)))
