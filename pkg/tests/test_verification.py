import json
import math

import numpy as np
import pytest

from gibbspk.eppf import pd_v_weights
from gibbspk.errors import NumericalError
from gibbspk.samplers import crp_sample_labels
from gibbspk.verification import (SCHEMA_VERSION, CheckReport, max_eppf_gap, monte_carlo_z, run_table_suite,
                                  run_theorem1_suite)


def test_report_records_pass_fail_and_errors():
    report = CheckReport("demo")
    report.run("small", "anchor", {"x": np.float64(1.5), "grid": (1, 2)}, 1e-3, lambda: 1e-4)
    report.run("big", "anchor", {}, 1e-3, lambda: 1.0)
    report.run("boom", "anchor", {}, 1e-3, lambda: (_ for _ in ()).throw(NumericalError("diverged")))
    report.run("above", "anchor", {}, 1e-3, lambda: 0.5, comparison=">")
    assert [c.passed for c in report.checks] == [True, False, False, True]
    assert math.isnan(report.checks[2].metric)
    assert "diverged" in report.checks[2].note
    assert not report.passed
    with pytest.raises(ValueError):
        report.run("small", "anchor", {}, 1.0, lambda: 0.0)
    with pytest.raises(ValueError):
        report.run("other", "anchor", {}, 1.0, lambda: 0.0, comparison="<")


def test_report_schema():
    report = CheckReport("demo")
    report.run("c", "a statement", {"alpha": np.float64(0.5), "grid": (1, 2)}, 1.0, lambda: 0.0)
    doc = json.loads(report.to_json())
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["suite"] == "demo" and doc["passed"] is True
    (check,) = doc["checks"]
    assert set(check) == {"name", "anchor", "parameters", "metric", "tolerance", "passed", "runtime",
                          "comparison", "note"}
    assert check["parameters"] == {"alpha": 0.5, "grid": [1, 2]}
    text = report.to_text()
    assert text.splitlines()[0].startswith("suite demo: PASS")


def test_extend_rejects_duplicates():
    a, b = CheckReport("a"), CheckReport("b")
    a.run("x", "", {}, 1.0, lambda: 0.0)
    b.run("x", "", {}, 1.0, lambda: 0.0)
    with pytest.raises(ValueError):
        a.extend(b)


def test_monte_carlo_z_flags_impossible_shapes():
    model = pd_v_weights(-1.0, 2.0, 3)
    labels = np.array([[0, 1, 2]] * 10)
    assert monte_carlo_z(labels, model) == math.inf
    good = crp_sample_labels(-1.0, 2.0, 3, 20000, 1)
    assert monte_carlo_z(good, model) < 4.5


def test_max_eppf_gap():
    assert max_eppf_gap(pd_v_weights(0.5, 1.0, 5), pd_v_weights(0.5, 1.0, 5), 5) == 0.0
    assert max_eppf_gap(pd_v_weights(0.5, 1.0, 5), pd_v_weights(0.5, 2.0, 5), 5) > 0.01


def test_type_regime_suite_passes():
    report = run_theorem1_suite(N=5, mc_count=20_000)
    assert report.passed, report.to_text()
    names = {c.name for c in report.checks}
    assert {"fisher-at-most-m-blocks", "ewens-monte-carlo", "conditional-stable-kappa", "gg-recursion"} <= names


def test_table_suite_detects_corruption():
    model = pd_v_weights(0.5, 1.0, 6)
    assert run_table_suite(model).passed
    tab = model.log_v_table.copy()
    tab[4, 2] += 0.01
    from gibbspk.eppf import GibbsModel
    broken = GibbsModel(0.5, tab)
    report = run_table_suite(broken)
    assert not report.passed
    assert not next(c for c in report.checks if c.name == "table-recursion").passed
