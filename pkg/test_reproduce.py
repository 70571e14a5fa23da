from dataclasses import replace

import pytest

import reproduce
from errors import TooLargeError, UnknownCaseError
from reproduce import REGISTRY, Claim, RunOptions, close, exact, holds, run_case, run_suite

CASES = [case_id for case_id, entry in REGISTRY.items() if not entry.out_of_scope]


def test_claim_helpers():
    assert close("near", 1.0, 1.0 + 1e-9, 1e-8).passed
    assert not close("far", 1.0, 1.1, 1e-8).passed
    assert exact("same", [1, 2], [1, 2]).passed
    assert not holds("false", False).passed
    assert holds("true", True, detail=3).computed == 3


def test_registry_uses_result_ids():
    assert list(REGISTRY) == [
        "prop-II2", "prop-III1", "prop-III2", "thm-III3", "prop-IV1", "cor-IV2", "prop-IV7", "remark-IV6", "thm-IV8",
        "prop-IV9", "thm-V1", "thm-V2-k2", "thm-V2-k3", "appendix-C5", "appendix-C6c", "appendix-CI2",
        "appendix-qtheta",
    ]
    assert all(entry.title for entry in REGISTRY.values())


def test_registry_covers_the_out_of_scope_note():
    entry = REGISTRY["appendix-qtheta"]
    assert entry.out_of_scope
    assert entry.notes


@pytest.mark.parametrize("case_id", CASES)
def test_cases_pass(case_id):
    case = run_case(case_id, RunOptions(seed=0))
    failed = [c.statement for c in case.claims if not c.passed]
    assert case.status == "pass", failed
    assert case.id == case_id
    assert case.claims


def test_pentagon_case_values():
    claims = {c.statement: c for c in run_case("appendix-C5", RunOptions(seed=0)).claims}
    assert claims["alpha of the pentagon"].computed == 2
    assert claims["theta of the pentagon"].computed == pytest.approx(5 ** 0.5, abs=1e-5)
    assert claims["beta upper bound at most 3"].passed


def test_out_of_scope_case_is_noted():
    case = run_case("appendix-qtheta", RunOptions())
    assert case.status == "out-of-scope-noted"
    assert case.claims == []
    assert any("out of scope" in note for note in case.notes)


def test_unknown_case():
    with pytest.raises(UnknownCaseError):
        run_case("no-such-case")
    with pytest.raises(UnknownCaseError):
        run_suite(["appendix-C5", "no-such-case"])


def test_suite_keeps_order_and_is_deterministic():
    ids = ["appendix-C6c", "prop-IV9", "appendix-qtheta"]
    first = run_suite(ids, RunOptions(seed=3), timed=False)
    second = run_suite(ids, RunOptions(seed=3), timed=False)
    assert [c.id for c in first.cases] == ids
    assert first.passed
    assert all(c.elapsed is None for c in first.cases)
    assert first.model_dump_json() == second.model_dump_json()


def test_library_errors_become_failing_claims(monkeypatch):
    def broken(options):
        raise TooLargeError("synthetic")

    monkeypatch.setitem(reproduce.REGISTRY, "appendix-C5", replace(REGISTRY["appendix-C5"], run=broken))
    case = run_case("appendix-C5")
    assert case.status == "fail"
    assert case.claims == [
        Claim(statement="case runs without errors", expected=None, computed="TooLargeError: synthetic", passed=False)
    ]
