"""Acceptance criteria 1-10, each at its stated tolerance and runtime budget.

Every test appends one line to the session summary (see conftest.py) and
prints it, so ``pytest -s tests/test_acceptance.py`` shows a pass/fail line
per criterion.  Caches are cleared first so runtimes are cold-start.
"""
import time

import numpy as np
import pytest

from gibbspk.eppf import (_gg_v_weights, _mixture_v_weights, conditional_stable_model, gg_v_weights,
                          mixture_v_weights, pd_v_weights, tilted_stable_mixing, truncated_gamma_mixing, verify_consistency,
                          verify_gibbs_recursion, verify_normalization)
from gibbspk.levy import (gamma_model, generalized_gamma_model, inverse_gaussian_log_density, stable_model, tilt,
                          verify_laplace_exponent)
from gibbspk.samplers import RandomSource, crp_sample_labels, fisher_sample_labels, gibbs_predictive_labels
from gibbspk.structural import (gamma_structural_log_pdf, stable_half_structural_log_pdf, structural_density,
                                verify_tilt_invariance)
from gibbspk.verification import max_eppf_gap, monte_carlo_z

SEED = 20240601
P_GRID = np.array([0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99])
T_GRID = np.array([0.5, 1.0, 2.0])
PD_GRID = [(a, t) for a in (-1.0, 0.0, 0.3, 0.5, 0.9) for t in (0.5, 1.0, 5.0)
           if a >= 0 or (t / -a).is_integer()]


@pytest.fixture(autouse=True)
def cold_caches():
    _gg_v_weights.cache_clear()
    _mixture_v_weights.cache_clear()


def record(log, number, description, metric, tolerance, elapsed, budget, comparison="<"):
    ok_metric = metric > tolerance if comparison == ">" else metric < tolerance
    ok_time = elapsed < budget
    passed = bool(ok_metric and ok_time)
    detail = (f"{description}: {metric:.3e} {comparison} {tolerance:.0e}"
              f"  runtime {elapsed:.2f}s < {budget:g}s{'' if ok_time else ' (over budget)'}")
    log.append((number, passed, detail))
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
    assert ok_metric, detail
    assert ok_time, detail


def test_criterion_01_pd_normalization(acceptance_log):
    start = time.perf_counter()
    worst = max(verify_normalization(pd_v_weights(a, t, n), n) for a, t in PD_GRID for n in range(2, 9))
    record(acceptance_log, 1, f"PD EPPF normalization, {len(PD_GRID)} pairs x n=2..8",
           worst, 1e-10, time.perf_counter() - start, 10)


def test_criterion_02_gibbs_recursion(acceptance_log):
    start = time.perf_counter()
    pd_worst = max(verify_gibbs_recursion(pd_v_weights(a, t, 20), 20) for a, t in PD_GRID)
    gg_worst = max(verify_gibbs_recursion(gg_v_weights(a, d, z, 8), 8) for a, d, z in [(0.5, 1, 1), (0.5, 2, 0.5)])
    elapsed = time.perf_counter() - start
    assert pd_worst < 1e-12, f"PD recursion residual {pd_worst:.3e}"
    record(acceptance_log, 2, f"recursion residual PD N=20 {pd_worst:.1e} (< 1e-12), generalized Gamma N=8",
           gg_worst, 1e-6, elapsed, 60)


def test_criterion_03_tilt_invariance(acceptance_log):
    start = time.perf_counter()
    models = [gamma_model(0.5), gamma_model(2.0)] + [stable_model(0.5, d) for d in (0.5, 1.0, 2.0)]
    worst = max(verify_tilt_invariance(m, lam, P_GRID, T_GRID) for m in models for lam in (0.1, 1.0, 10.0))
    record(acceptance_log, 3, "structural density under tilting, 9x3 grid", worst, 1e-10,
           time.perf_counter() - start, 5)


def test_criterion_04_mixture_equals_gg(acceptance_log):
    start = time.perf_counter()
    alpha, delta, N = 0.5, 1.0, 6
    gaps, falsify = [], []
    for zeta in (0.5, 2.0):
        gg = gg_v_weights(alpha, delta, zeta, N)
        lam = zeta ** (1 / alpha) / 2
        mix = mixture_v_weights(alpha, delta, tilted_stable_mixing(alpha, delta, lam), N)
        gaps.append(max_eppf_gap(mix, gg, N))
        falsify.append(max_eppf_gap(mixture_v_weights(alpha, delta, truncated_gamma_mixing(), N), gg, N))
    elapsed = time.perf_counter() - start
    assert min(falsify) > 1e-3, f"truncated Gamma mixing gap {min(falsify):.3e}"
    record(acceptance_log, 4, f"tilted mixing vs generalized Gamma, n<=6 (truncated Gamma gap "
                              f"{min(falsify):.2e} > 1e-3)", max(gaps), 1e-6, elapsed, 300)


def test_criterion_05_inverse_gaussian_structural(acceptance_log):
    start = time.perf_counter()
    P, T = np.meshgrid(P_GRID, T_GRID, indexing="ij")
    worst = 0.0
    for delta, zeta in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5), (1.0, 3.0)]:
        levy = generalized_gamma_model(0.5, delta, zeta)
        # p t rho(p t) f((1 - p) t) / f(t) with f the inverse Gaussian density, evaluated as written
        generic = np.exp(np.log(P * T) + levy.log_levy_density(P * T)
                         + inverse_gaussian_log_density((1 - P) * T, delta, zeta)
                         - inverse_gaussian_log_density(T, delta, zeta))
        closed = np.exp(stable_half_structural_log_pdf(P, T, delta))
        worst = max(worst, float(np.max(np.abs(generic - closed) / closed)))
    record(acceptance_log, 5, "inverse Gaussian structural density vs closed form", worst, 1e-10,
           time.perf_counter() - start, 1)


def test_criterion_06_gamma_examples(acceptance_log):
    start = time.perf_counter()
    P, T = np.meshgrid(P_GRID, np.array([0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0]), indexing="ij")
    variation, closed_gap, tilt_gap = 0.0, 0.0, 0.0
    for theta in (0.5, 1.0, 2.0, 5.0):
        dens = structural_density(gamma_model(theta)).pdf(P, T)
        variation = max(variation, float(np.max(np.ptp(dens, axis=1))))
        closed_gap = max(closed_gap, float(np.max(np.abs(dens - np.exp(gamma_structural_log_pdf(P, theta))))))
        t = np.logspace(-3, 1.5, 40)
        for lam in (0.1, 1.0, 10.0):
            a = tilt(gamma_model(theta), lam).density(t)
            b = gamma_model(theta, 1.0 + lam).density(t)
            tilt_gap = max(tilt_gap, float(np.max(np.abs(a - b) / b)))
    elapsed = time.perf_counter() - start
    assert closed_gap < 1e-12, f"gap to theta (1-p)^(theta-1): {closed_gap:.3e}"
    assert tilt_gap < 1e-12, f"tilted Gamma vs Gamma(theta, 1 + lambda): {tilt_gap:.3e}"
    record(acceptance_log, 6, f"Gamma structural t-variation (tilted Gamma density gap {tilt_gap:.1e})",
           variation, 1e-12, elapsed, 1)


def test_criterion_07_laplace_exponent(acceptance_log):
    start = time.perf_counter()
    models = []
    for base in (gamma_model(0.5), gamma_model(2.0), stable_model(0.5, 1.0), stable_model(0.5, 2.0)):
        models += [base, tilt(base, 0.5), tilt(base, 3.0)]
    worst = max(verify_laplace_exponent(m, b) for m in models for b in (0.1, 1.0, 10.0))
    record(acceptance_log, 7, "Levy-Khintchine quadrature vs closed-form Laplace exponent", worst, 1e-8,
           time.perf_counter() - start, 5)


def test_criterion_08_monte_carlo(acceptance_log):
    start = time.perf_counter()
    n, count = 5, 1_000_000
    streams = iter(RandomSource(SEED).spawn(5))
    z = {}
    for alpha, theta in [(0.5, 0.5), (0.0, 1.0)]:
        model = pd_v_weights(alpha, theta, n)
        z[f"crp PD({alpha},{theta})"] = monte_carlo_z(crp_sample_labels(alpha, theta, n, count, next(streams)), model)
        z[f"predictive PD({alpha},{theta})"] = monte_carlo_z(
            gibbs_predictive_labels(model, n, count, next(streams)), model)
    gg = gg_v_weights(0.5, 1.0, 1.0, n)
    z["predictive gg(1/2,1,1)"] = monte_carlo_z(gibbs_predictive_labels(gg, n, count, next(streams)), gg)
    worst_name = max(z, key=z.get)
    record(acceptance_log, 8, f"max |z| over shapes, 5 runs of 1e6 at n=5 (worst: {worst_name})",
           z[worst_name], 4.0, time.perf_counter() - start, 180)


def test_criterion_09_conditional_stable(acceptance_log):
    start = time.perf_counter()
    norm, cons = 0.0, 0.0
    for t in (0.5, 1.0, 2.0):
        model = conditional_stable_model(0.5, 1.0, t, 5)
        assert model.diagnostics["kappa_calibration_residual"] < 1e-6
        norm = max(norm, max(verify_normalization(model, n) for n in range(1, 6)))
        cons = max(cons, verify_consistency(model, 5))
    elapsed = time.perf_counter() - start
    assert cons < 1e-6, f"consistency residual {cons:.3e}"
    record(acceptance_log, 9, f"conditional stable normalization, n<=5 (consistency {cons:.1e} < 1e-6)",
           norm, 1e-6, elapsed, 120)


def test_criterion_10_fisher(acceptance_log):
    start = time.perf_counter()
    count = 1_000_000
    src3, src6 = RandomSource(SEED + 10).spawn(2)
    labels3 = fisher_sample_labels(-1.0, 2, 3, count, src3)
    labels6 = fisher_sample_labels(-1.0, 2, 6, count, src6)
    max_blocks = int(max(labels3.max(), labels6.max())) + 1
    z = monte_carlo_z(labels3, pd_v_weights(-1.0, 2.0, 3))
    elapsed = time.perf_counter() - start
    assert max_blocks <= 2, f"saw {max_blocks} blocks"
    record(acceptance_log, 10, f"m=2 atoms: max blocks {max_blocks} over 2x1e6 (n=3, n=6); n=3 shape |z|",
           z, 4.0, elapsed, 60)
