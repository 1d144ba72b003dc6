"""Test validation, kill checks, the kill matrix, and the bounded
equivalence oracle."""

import pytest

from arena.lang.interp import Outcome, TrapKind
from arena.lang.parser import parse_unit
from arena.lang.typecheck import check_unit
from arena.testing import (Assertion, DomainTooLarge, TestCase, TestRejection,
                           bounded_equivalence_oracle, build_kill_matrix,
                           counterexample_test, kill_check, validate_test)


def unit_of(source):
    return check_unit(parse_unit(source))


def assertion(args, expected):
    return Assertion("abs_diff", tuple(args), expected)


def test_valid_test_reports_coverage(abs_diff_unit):
    valid = validate_test(abs_diff_unit, TestCase([assertion([7, 2], 5)]))
    assert valid.covered_lines == frozenset({1, 2})
    valid = validate_test(abs_diff_unit, TestCase([assertion([2, 7], 5)]))
    assert valid.covered_lines == frozenset({1, 3})


@pytest.mark.parametrize("case,code", [
    (TestCase([]), "empty_test"),
    (TestCase([assertion([1, 2], 1)] * 11), "too_many_assertions"),
    (TestCase([Assertion("nope", (1, 2), 1)]), "bad_assertion"),
    (TestCase([Assertion("abs_diff", (1,), 1)]), "bad_assertion"),
    (TestCase([Assertion("abs_diff", (True, 2), 1)]), "bad_assertion"),
    (TestCase([assertion([1, 2], True)]), "bad_assertion"),
    (TestCase([assertion([7, 2], 4)]), "assertion_fails_on_original"),
])
def test_rejection_codes(abs_diff_unit, case, code):
    with pytest.raises(TestRejection) as exc:
        validate_test(abs_diff_unit, case)
    assert exc.value.code == code


def test_trap_on_original_rejected():
    unit = unit_of("fun f(a: int) -> int { return 10 / a; }")
    with pytest.raises(TestRejection) as exc:
        validate_test(unit, TestCase([Assertion("f", (0,), 0)]))
    assert exc.value.code == "trap_on_original"


def test_kill_check_reports_first_difference(abs_diff_unit):
    mutant = unit_of("fun abs_diff(a: int, b: int) -> int {\n"
                     "  if (a > b) { return a + b; }\n"
                     "  return b - a;\n}\n")
    case = TestCase([assertion([2, 7], 5), assertion([7, 2], 5)])
    result = kill_check(abs_diff_unit, mutant, case)
    assert result.killed and result.assertion_index == 1
    survivor = TestCase([assertion([2, 7], 5)])
    assert not kill_check(abs_diff_unit, mutant, survivor).killed


def test_mutant_trap_counts_as_difference(abs_diff_unit):
    mutant = unit_of("fun abs_diff(a: int, b: int) -> int {\n"
                     "  if (a > b) { return a / b; }\n"
                     "  return b - a;\n}\n")
    case = TestCase([assertion([7, 0], 7)])
    assert kill_check(abs_diff_unit, mutant, case).killed


def test_kill_matrix_and_score(abs_diff_unit):
    mutants = {
        "m1": unit_of("fun abs_diff(a: int, b: int) -> int {\n"
                      "  if (a > b) { return a + b; }\n"
                      "  return b - a;\n}\n"),
        "m2": unit_of("fun abs_diff(a: int, b: int) -> int {\n"
                      "  if (a >= b) { return a - b; }\n"
                      "  return b - a;\n}\n"),
    }
    tests = {"t1": TestCase([assertion([7, 2], 5)])}
    matrix = build_kill_matrix(abs_diff_unit, mutants, tests)
    assert matrix.entries[("t1", "m1")] == "killed"
    assert matrix.entries[("t1", "m2")] == "survived"
    assert matrix.mutation_score == 0.5


def test_empty_matrix_is_vacuously_perfect(abs_diff_unit):
    assert build_kill_matrix(abs_diff_unit, {}, {}).mutation_score == 1.0


def test_oracle_finds_lexicographically_first_counterexample(abs_diff_unit):
    mutant = unit_of("fun abs_diff(a: int, b: int) -> int {\n"
                     "  if (a < b) { return a - b; }\n"
                     "  return b - a;\n}\n")
    verdict = bounded_equivalence_oracle(abs_diff_unit, mutant, "abs_diff")
    assert not verdict.equivalent
    assert verdict.args == (-8, -7)
    assert verdict.original == Outcome(value=1)
    assert verdict.mutant == Outcome(value=-1)


def test_oracle_proves_boundary_mutant_equivalent(abs_diff_unit):
    mutant = unit_of("fun abs_diff(a: int, b: int) -> int {\n"
                     "  if (a >= b) { return a - b; }\n"
                     "  return b - a;\n}\n")
    verdict = bounded_equivalence_oracle(abs_diff_unit, mutant, "abs_diff")
    assert verdict.equivalent


def test_counterexample_converts_to_killing_test(abs_diff_unit):
    mutant = unit_of("fun abs_diff(a: int, b: int) -> int {\n"
                     "  if (a > b) { return a * b; }\n"
                     "  return b - a;\n}\n")
    verdict = bounded_equivalence_oracle(abs_diff_unit, mutant, "abs_diff")
    case = counterexample_test(verdict)
    validate_test(abs_diff_unit, case)  # passes on the original
    assert kill_check(abs_diff_unit, mutant, case).killed


def test_domain_cap():
    unit = unit_of("fun f(a: int[], b: int[], c: int[], d: int[]) -> int {\n"
                   "  return 0;\n}\n")
    with pytest.raises(DomainTooLarge):
        bounded_equivalence_oracle(unit, unit, "f")


def test_trap_counterexample_has_no_test(abs_diff_unit):
    from arena.testing import EquivalenceVerdict
    verdict = EquivalenceVerdict(False, "d", "abs_diff", (1, 0),
                                 Outcome(trap=TrapKind.DIV_BY_ZERO),
                                 Outcome(value=1))
    assert counterexample_test(verdict) is None


def test_assertion_record_round_trip():
    a = Assertion.from_record({"fn": "f", "args": [[1, 2], 3], "expected": [4]})
    assert a.args == ((1, 2), 3)
    assert a.to_record() == {"fn": "f", "args": [[1, 2], 3], "expected": [4]}
