import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gibbspk import _kernels
from gibbspk.combinatorics import PartitionShape, SetPartition, integer_partitions, shape_multiplicity
from gibbspk.eppf import gg_v_weights, gibbs_eppf, pd_v_weights
from gibbspk.errors import ParameterError, TableError
from gibbspk.samplers import (PredictiveState, RandomSource, crp_sample, crp_sample_labels, fisher_sample,
                              fisher_sample_labels, gibbs_predictive_labels, gibbs_predictive_sample,
                              label_shapes, partition_histogram, predictive_tables, shape_histogram)
from gibbspk.verification import monte_carlo_z

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not importable")


def is_rgs(row):
    top = -1
    for x in row:
        if x > top + 1:
            return False
        top = max(top, x)
    return row[0] == 0


def test_seed_determinism():
    a = crp_sample_labels(0.5, 1.0, 7, 100, RandomSource(3))
    b = crp_sample_labels(0.5, 1.0, 7, 100, RandomSource(3))
    c = crp_sample_labels(0.5, 1.0, 7, 100, RandomSource(4))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.array_equal(crp_sample_labels(0.5, 1.0, 7, 100, 3), a)


def test_spawned_streams_differ():
    s1, s2 = RandomSource(1).spawn(2)
    assert not np.array_equal(s1.uniform(10), s2.uniform(10))


def test_chunking_matches_single_draw(monkeypatch):
    import gibbspk.samplers as samplers
    whole = crp_sample_labels(0.3, 2.0, 6, 1000, 11)
    monkeypatch.setattr(samplers, "_CHUNK", 128)
    assert np.array_equal(crp_sample_labels(0.3, 2.0, 6, 1000, 11), whole)


@needs_numba
@pytest.mark.parametrize("sampler", ["crp", "gibbs", "fisher"])
def test_backends_bit_identical(sampler):
    out = {}
    for backend in ("numba", "numpy"):
        src = RandomSource(2024)
        if sampler == "crp":
            out[backend] = crp_sample_labels(0.4, 1.5, 9, 3000, src, backend)
        elif sampler == "gibbs":
            out[backend] = gibbs_predictive_labels(gg_v_weights(0.5, 1.0, 1.0, 9), 9, 3000, src, backend)
        else:
            out[backend] = fisher_sample_labels(-0.7, 3, 9, 3000, src, backend)
    assert np.array_equal(out["numba"], out["numpy"])
    assert np.array_equal(label_shapes(out["numba"], "numba"), label_shapes(out["numba"], "numpy"))


@pytest.mark.parametrize("n", [1, 2, 8])
def test_labels_are_restricted_growth_strings(n):
    for labels in (crp_sample_labels(0.5, 0.5, n, 200, 1),
                   gibbs_predictive_labels(pd_v_weights(0.0, 1.0, n), n, 200, 2),
                   fisher_sample_labels(-1.0, 2, n, 200, 3)):
        assert labels.shape == (200, n)
        assert all(is_rgs(list(r)) for r in labels)


def test_single_draw_helpers():
    for part in (crp_sample(0.5, 1.0, 6, 1), gibbs_predictive_sample(pd_v_weights(0.5, 1.0, 6), 6, 1),
                 fisher_sample(-1.0, 3, 6, 1)):
        assert isinstance(part, SetPartition) and part.n == 6


def test_trivial_cases():
    assert np.array_equal(crp_sample_labels(0.0, 1.0, 1, 5, 7), np.zeros((5, 1), dtype=np.int64))
    # theta = 0, alpha = 0 never opens a second block
    assert crp_sample_labels(0.0, 1e-300, 5, 100, 1).max() == 0
    assert crp_sample_labels(0.5, 1.0, 4, 0, 1).shape == (0, 4)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_fisher_never_exceeds_m_blocks(m):
    labels = fisher_sample_labels(-1.0, m, 8, 20000, 5)
    assert labels.max() <= m - 1


def test_parameter_errors():
    with pytest.raises(ParameterError):
        crp_sample_labels(1.0, 1.0, 3, 1)
    with pytest.raises(ParameterError):
        crp_sample_labels(0.5, 1.0, 0, 1)
    with pytest.raises(ParameterError):
        fisher_sample_labels(0.5, 2, 3, 1)
    with pytest.raises(ParameterError):
        fisher_sample_labels(-1.0, 0, 3, 1)


def test_predictive_tables_need_enough_rows():
    with pytest.raises(TableError):
        predictive_tables(gg_v_weights(0.5, 1.0, 1.0, 4), 7)
    with pytest.raises(ParameterError):
        predictive_tables("model", 3)
    _, _, worst = predictive_tables(gg_v_weights(0.5, 1.0, 1.0, 6), 6)
    assert worst < 1e-12


def test_predictive_state():
    state = PredictiveState(pd_v_weights(0.5, 1.0, 10))
    assert state.probabilities().tolist() == [1.0]
    for block in (0, 1, 0, 2):
        state.add(block)
    probs = state.probabilities()
    assert state.n == 4 and state.k == 3
    assert probs.sum() == pytest.approx(1.0, abs=1e-14)
    # PD: join block j with (n_j - alpha) / (n + theta), open with (theta + k alpha) / (n + theta)
    np.testing.assert_allclose(probs, np.array([1.5, 0.5, 0.5, 2.5]) / 5.0, rtol=1e-13)
    with pytest.raises(ParameterError):
        state.add(7)


@given(st.floats(0.0, 0.9), st.floats(0.1, 10.0), st.lists(st.integers(1, 5), min_size=1, max_size=5))
def test_predictive_probabilities_sum_to_one(alpha, theta, sizes):
    state = PredictiveState(pd_v_weights(alpha, theta, sum(sizes) + 1), sizes)
    probs = state.probabilities()
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert (probs >= 0).all()


def test_histograms():
    labels = np.array([[0, 0, 1], [0, 1, 2], [0, 1, 0], [0, 0, 0]])
    hist = shape_histogram(labels)
    assert hist == {PartitionShape((2, 1)): 2, PartitionShape((1, 1, 1)): 1, PartitionShape((3,)): 1}
    assert sum(partition_histogram(labels).values()) == 4
    assert shape_histogram(np.zeros((0, 3), dtype=np.int64)) == {}


@pytest.mark.parametrize("alpha, theta", [(0.5, 0.5), (0.0, 1.0), (0.8, 3.0)])
def test_crp_frequencies(alpha, theta):
    labels = crp_sample_labels(alpha, theta, 4, 100_000, 99)
    assert monte_carlo_z(labels, pd_v_weights(alpha, theta, 4)) < 4.5


def test_predictive_frequencies_gg():
    model = gg_v_weights(0.5, 2.0, 0.5, 4)
    labels = gibbs_predictive_labels(model, 4, 100_000, 7)
    assert monte_carlo_z(labels, model) < 4.5


def test_partitions_with_equal_shape_are_equally_likely():
    # exchangeability: each set partition of a shape appears equally often
    labels = crp_sample_labels(0.5, 1.0, 4, 200_000, 8)
    counts = partition_histogram(labels)
    model = pd_v_weights(0.5, 1.0, 4)
    for rgs, c in counts.items():
        part = SetPartition.from_labels(rgs)
        p = gibbs_eppf(model, [len(b) for b in part])
        se = math.sqrt(p * (1 - p) / 200_000)
        assert abs(c / 200_000 - p) < 4.5 * se
    assert len(counts) == 15
    assert sum(shape_multiplicity(s) for s in integer_partitions(4)) == 15


@pytest.mark.parametrize("n", [5, 30])
def test_histogram_key_paths_agree(n):
    # n = 30 exceeds the packed-integer key and uses the row-wise unique
    labels = crp_sample_labels(0.5, 1.0, n, 2000, 12)
    hist = shape_histogram(labels)
    assert sum(hist.values()) == 2000
    direct = {}
    for row in labels:
        shape = PartitionShape(np.bincount(row))
        direct[shape] = direct.get(shape, 0) + 1
    assert hist == direct
