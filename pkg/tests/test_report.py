import json

import click
import numpy as np
import pytest

from utils.report import (
    Check,
    VerificationReport,
    json_safe,
    make_stencil,
    parse_point,
    parse_tolerances,
    within,
)


def test_within():
    assert within(1.05, 1.0, 0.1, relative=False)
    assert not within(1.2, 1.0, 0.1, relative=False)
    assert within(105.0, 100.0, 0.1, relative=True)
    assert not within(105.0, 100.0, 0.01, relative=True)
    # relative against zero falls back to absolute
    assert within(1e-9, 0.0, 1e-8, relative=True)
    assert not within(float("nan"), 0.0, 1.0, relative=False)


def test_checks_gate_the_exit_code():
    report = VerificationReport(command="x", params={})
    report.check("a", 1.0, 1.0, 0.0)
    assert report.ok and report.exit_code == 0
    report.check("b", 2.0, 1.0, 0.1, gated=False)
    assert report.ok
    report.check("c", 2.0, 1.0, 0.1)
    assert report.failing == ["c"]
    assert report.exit_code == 1


def test_error_fails_the_report():
    report = VerificationReport(command="x", params={}, error="ShapeError: bad")
    assert not report.ok
    payload = report.to_dict()
    assert payload["ok"] is False
    assert payload["error"] == "ShapeError: bad"


def test_tolerance_override():
    report = VerificationReport(command="x", params={}, tolerances={"loose": 1.0})
    entry = report.check("loose", 1.5, 1.0, 1e-6)
    assert entry.tolerance == 1.0
    assert entry.passed


def test_json_round_trip():
    params = json_safe({"mu": 1.0, "point": [0.1 + 0.2j]})
    report = VerificationReport(command="tyz", params=params, seed=7, runtime_ms=12)
    report.check("tyz.a0", 1.0, 1.0, 1e-8, relative=True)
    report.add_data("a", np.array([1.0, -3.0, 2.0]))
    text = report.to_json()
    assert VerificationReport.from_json(text) == report
    payload = json.loads(text)
    assert payload["checks"][0]["pass"] is True
    assert payload["params"]["point"] == [[0.1, 0.2]]
    assert list(payload) == sorted(payload)


def test_check_from_dict():
    entry = Check("n", 1.0, 2.0, 0.5, relative=True, gated=False, passed=False)
    assert Check.from_dict(entry.to_dict()) == entry


def test_json_safe():
    value = json_safe({"c": 1 + 2j, "i": np.int64(3), "f": np.float32(0.5), "b": np.bool_(True),
                       "t": (1, 2), 4: np.arange(2)})
    assert value == {"c": [1.0, 2.0], "i": 3, "f": 0.5, "b": True, "t": [1, 2], "4": [0, 1]}
    assert isinstance(value["b"], bool)


def test_parse_point():
    np.testing.assert_array_equal(parse_point("0,0", 2), [0, 0])
    assert parse_point("0.1,0.2", 1)[0] == 0.1 + 0.2j
    np.testing.assert_array_equal(parse_point("0.3, -0.1", 2), [0.3, -0.1])
    with pytest.raises(click.BadParameter):
        parse_point("0.1,0.2,0.3", 2)
    with pytest.raises(click.BadParameter):
        parse_point("a,b", 2)


def test_parse_tolerances():
    assert parse_tolerances(["a.b=1e-3", "det_identity.typeI:1,1.mu1=0.5"]) == {
        "a.b": 1e-3,
        "det_identity.typeI:1,1.mu1": 0.5,
    }
    assert parse_tolerances(()) == {}
    for bad in (["bad"], ["=1"], ["a=x"], ["a=-1"]):
        with pytest.raises(click.BadParameter):
            parse_tolerances(bad)


def test_make_stencil():
    stencil = make_stencil(2e-3, False)
    assert stencil.step == 2e-3 and not stencil.richardson
    with pytest.raises(click.BadParameter):
        make_stencil(1.0, None)
