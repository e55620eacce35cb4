import pytest

from compop.suite import CheckResult, pair_checks, run_suite
from compop.symbol import make_symbol
from compop.weight import make_classical_weight


def test_quick_suite_passes():
    results = run_suite("quick", seed=0)
    failed = [r.name for r in results if not r.passed]
    assert not failed and len(results) > 50


@pytest.mark.slow
def test_full_suite_passes():
    assert all(r.passed for r in run_suite("full", seed=1))


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("everything")


def test_pair_checks_depend_on_class():
    phi = make_symbol("z^2")
    names_ii = {c.name for c in pair_checks(phi, make_classical_weight(1.0))}
    names_i = {c.name for c in pair_checks(phi, make_classical_weight(3.0))}
    assert "littlewood" not in names_ii
    assert "submean" in {c.name for c in pair_checks(phi, make_classical_weight(1.0), full=True)}
    assert names_i >= {"moment_bounds", "schwarz", "lower_triangular"}


def test_check_result_serializes_infinity():
    d = CheckResult("x", True, "", float("inf")).to_dict()
    assert d == {"name": "x", "passed": True, "detail": "", "value": "inf"}
