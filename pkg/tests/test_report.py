import json
import math

from invbeta.report import FAIL, INCONCLUSIVE, PASS, CheckRecord, VerificationReport
from invbeta.suites import GridSpec, run_suite


def test_compare_sets_status():
    assert CheckRecord.compare("x", {}, 1e-14, 1e-13).status == PASS
    assert CheckRecord.compare("x", {}, 1e-12, 1e-13).status == FAIL
    assert CheckRecord.compare("x", {}, math.nan, 1.0).status == FAIL


def test_overall_pass_ignores_observations():
    report = VerificationReport("demo")
    report.add(CheckRecord.compare("ok", {"b": 1}, 0.0, 0.0))
    report.observations.append({"tag": "conjecture", "negative": 5})
    assert report.overall_pass
    report.add(CheckRecord("maybe", {}, math.nan, 0.0, INCONCLUSIVE))
    assert not report.overall_pass
    assert [c.name for c in report.failures()] == ["maybe"]


def test_json_is_strict_and_versioned():
    report = VerificationReport("demo", tolerances={"t": 1e-13})
    report.add(CheckRecord("inf", {"a": float("inf")}, math.nan, 1.0, FAIL, {"w": [1.0, math.inf]}))
    text = report.to_json()
    data = json.loads(text, parse_constant=lambda c: (_ for _ in ()).throw(ValueError(c)))
    assert data["schema"] == 1
    assert data["checks"][0]["residual"] == "nan"
    assert data["checks"][0]["passed"] is False
    assert set(data) == {"schema", "suite", "overall_pass", "tolerances", "checks", "observations"}


SMALL = GridSpec(b_values=(0.5, 1.0, 3.0), p_values=(0.5,), a_points=12)


def test_small_grid_suites_pass():
    for name in ("monotonicity", "convexity", "logconcavity"):
        report = run_suite(name, SMALL)
        assert report.overall_pass, [c.name for c in report.failures()]
        assert report.suite == name


def test_conjecture_is_observation_only():
    report = run_suite("convexity", SMALL)
    tags = [o["tag"] for o in report.observations]
    assert tags == ["conjecture"]
    assert report.observations[0]["params"] == {"b": 3.0, "p": 0.5}
    assert all(c.name != "phi_concave" for c in report.checks)
