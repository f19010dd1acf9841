import pytest

from poisson_widths.reproduce import (
    CHECKS,
    CheckResult,
    all_passed,
    check_determinants_beta0,
    check_determinants_beta1,
    check_implications,
    check_nq,
    check_nq_star,
    check_uniform_certificate,
    format_check,
    run_checks,
)


@pytest.mark.parametrize(
    "check",
    [check_nq, check_nq_star, check_determinants_beta0, check_determinants_beta1,
     check_uniform_certificate, check_implications],
)
def test_fast_checks_pass(check):
    result = check()
    assert result.passed, result.to_dict()


@pytest.mark.slow
def test_all_checks_pass_in_order():
    results = run_checks(threads=3)
    assert [r.name for r in results] == [r.name for r in run_checks(threads=1)]
    assert len(results) == len(CHECKS)
    assert all_passed(results)


def test_format_check():
    passed = CheckResult("n_q(0.5)", 969, 969, True)
    failed = CheckResult("n_q(0.5)", 969, 968, False)
    assert "PASS" in format_check(passed)
    assert "FAIL" in format_check(failed)
    assert "968" in format_check(failed)
    assert not all_passed([passed, failed])


def test_determinant_check_beta1_reports_reference_bound():
    result = check_determinants_beta1()
    assert result.passed
    assert result.expected["first"] == pytest.approx(-1.682803297860862e-9, rel=1e-9)
    assert result.actual["reference_bound_met"] is False
    assert result.actual["not_cvd"] is True
