import pytest

from conftest import coupled
from twobath.model import InitialState, SystemParams
from twobath.validation import max_rel_dev, run_validation, steady_time


def statuses(report):
    return {c.name: c.status for c in report.checks}


def test_reference_report():
    report = run_validation(coupled(), InitialState(1, 6))
    assert statuses(report) == {
        "analytic-vs-rk4": "pass",
        "analytic-steady-vs-lyapunov": "pass",
        "closed-form-moments": "flagged",
        "weak-vs-high-t": "pass",
    }
    assert not report.breached
    rk4 = report.checks[0]
    assert rk4.deviation < 1e-6


def test_asymmetric_closed_form_report_lists_oracle_values():
    report = run_validation(coupled(gamma1=0.02, gamma2=0.005, T1=2, T2=0.5), InitialState(1, 6))
    closed = next(c for c in report.checks if c.name == "closed-form-moments")
    assert set(closed.data) >= {"xx1", "x1p2"}
    assert closed.data["x1p2"]["oracle"] != 0
    text = "\n".join(report.lines())
    assert "x1p2" in text and "MISMATCH" in text


def test_steady_time_scales_with_damping():
    assert steady_time(coupled(gamma1=0.02, gamma2=0.02)) == pytest.approx(steady_time(coupled()) / 2, rel=1e-6)


def test_max_rel_dev():
    assert max_rel_dev([1.0, 2.0], [1.0, 4.0]) == 0.5
    assert max_rel_dev([0.0], [0.0]) == 0.0


def test_undamped_is_unsupported_not_breach():
    report = run_validation(SystemParams(m=1, omega0=1, kappa=0), InitialState(1, 1))
    assert not report.breached
    assert set(statuses(report).values()) == {"unsupported"}
