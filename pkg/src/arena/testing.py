"""Defender test validation, differential kill checks, kill matrix, and the
bounded-exhaustive equivalence oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .lang import nodes as n
from .lang.interp import DEFAULT_BUDGET, Outcome, evaluate_call, value_matches_type

MAX_ASSERTIONS = 10
ORACLE_MAX_TUPLES = 10 ** 6

# Default adjudication domain: small enough that exhaustive checking of a
# teaching-scale signature stays under the tuple cap.
DEFAULT_INT_RANGE = (-8, 8)
DEFAULT_ARRAY_MAX_LEN = 3
DEFAULT_ARRAY_ELEM_RANGE = (-2, 2)


@dataclass(frozen=True)
class Assertion:
    fn: str
    args: tuple
    expected: object

    @staticmethod
    def from_record(record: dict) -> "Assertion":
        args = tuple(tuple(a) if isinstance(a, list) else a for a in record["args"])
        expected = record["expected"]
        if isinstance(expected, list):
            expected = tuple(expected)
        return Assertion(record["fn"], args, expected)

    def to_record(self) -> dict:
        args = [list(a) if isinstance(a, tuple) else a for a in self.args]
        expected = list(self.expected) if isinstance(self.expected, tuple) else self.expected
        return {"fn": self.fn, "args": args, "expected": expected}

    def call_args(self) -> list[object]:
        return [list(a) if isinstance(a, tuple) else a for a in self.args]

    def expected_value(self) -> object:
        return list(self.expected) if isinstance(self.expected, tuple) else self.expected


@dataclass
class TestCase:
    """A defender test: an ordered sequence of call + expected-value assertions."""

    assertions: list[Assertion]
    id: str | None = None
    author: str | None = None


class TestRejection(Exception):
    def __init__(self, code: str, message: str, index: int | None = None):
        super().__init__(message)
        self.code = code
        self.index = index


@dataclass
class ValidTest:
    test: TestCase
    covered_lines: frozenset[int]
    executed_lines: frozenset[int]


def validate_test(unit: n.SourceUnit, test: TestCase,
                  budget: int = DEFAULT_BUDGET) -> ValidTest:
    """Admit a test iff every assertion passes on the original unit.

    Rejection codes: too_many_assertions, empty_test, bad_assertion,
    assertion_fails_on_original, trap_on_original.
    """
    if not test.assertions:
        raise TestRejection("empty_test", "a test needs at least one assertion")
    if len(test.assertions) > MAX_ASSERTIONS:
        raise TestRejection("too_many_assertions",
                            f"at most {MAX_ASSERTIONS} assertions per test")
    covered: set[int] = set()
    executed: set[int] = set()
    for i, a in enumerate(test.assertions):
        fn = unit.function(a.fn)
        if fn is None:
            raise TestRejection("bad_assertion", f"unknown function {a.fn!r}", i)
        args = a.call_args()
        if len(args) != len(fn.params) or any(
                not value_matches_type(v, t) for v, (_, t) in zip(args, fn.params)):
            raise TestRejection("bad_assertion",
                                f"arguments of assertion {i} do not match {a.fn!r}", i)
        if not value_matches_type(a.expected_value(), fn.return_type):
            raise TestRejection("bad_assertion",
                                f"expected value of assertion {i} must be {fn.return_type}", i)
        outcome, trace = evaluate_call(unit, a.fn, args, budget)
        if not outcome.is_value:
            raise TestRejection("trap_on_original",
                                f"assertion {i} traps on the original unit "
                                f"({outcome.trap.value})", i)
        if outcome.value != a.expected_value():
            raise TestRejection("assertion_fails_on_original",
                                f"assertion {i} expects {a.expected_value()!r} "
                                f"but the original returns {outcome.value!r}", i)
        covered |= trace.covered_lines
        executed |= trace.executed_lines
    return ValidTest(test, frozenset(covered), frozenset(executed))


@dataclass(frozen=True)
class KillResult:
    killed: bool
    assertion_index: int | None = None  # first differing assertion


def kill_check(original: n.SourceUnit, mutant_unit: n.SourceUnit, test: TestCase,
               budget: int = DEFAULT_BUDGET) -> KillResult:
    """Killed iff some assertion yields a different Outcome on the mutant.

    Assertions are checked in order and the first difference is reported;
    differing trap kinds count as a difference, mutant traps are outcomes,
    not errors.
    """
    for i, a in enumerate(test.assertions):
        args = a.call_args()
        orig_outcome, _ = evaluate_call(original, a.fn, args, budget)
        mut_outcome, _ = evaluate_call(mutant_unit, a.fn, args, budget)
        if orig_outcome != mut_outcome:
            return KillResult(True, i)
    return KillResult(False)


@dataclass
class KillMatrix:
    # (test id, mutant id) -> "killed" | "survived"
    entries: dict[tuple[str, str], str] = field(default_factory=dict)
    mutation_score: float = 1.0


def build_kill_matrix(unit: n.SourceUnit, mutants: dict[str, n.SourceUnit],
                      tests: dict[str, TestCase],
                      budget: int = DEFAULT_BUDGET) -> KillMatrix:
    """Run every (test, mutant) pair; score = killed mutants / all mutants,
    with 0/0 defined as 1.0."""
    matrix = KillMatrix()
    killed_mutants: set[str] = set()
    for mid, munit in mutants.items():
        for tid, test in tests.items():
            result = kill_check(unit, munit, test, budget)
            matrix.entries[(tid, mid)] = "killed" if result.killed else "survived"
            if result.killed:
                killed_mutants.add(mid)
    matrix.mutation_score = len(killed_mutants) / len(mutants) if mutants else 1.0
    return matrix


# --- bounded-exhaustive equivalence oracle ---

class DomainTooLarge(Exception):
    pass


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    domain: str = ""
    fn: str | None = None
    args: tuple | None = None
    original: Outcome | None = None
    mutant: Outcome | None = None


def default_domain(fn: n.FunctionDecl,
                   int_range: tuple[int, int] = DEFAULT_INT_RANGE) -> list[list[object]]:
    """Per-parameter candidate values: ints in int_range, both bools, and
    int arrays up to length 3 with elements in [-2, 2]."""
    lo, hi = int_range
    domain: list[list[object]] = []
    for _, ty in fn.params:
        if ty == n.Type.INT:
            domain.append(list(range(lo, hi + 1)))
        elif ty == n.Type.BOOL:
            domain.append([False, True])
        else:
            elo, ehi = DEFAULT_ARRAY_ELEM_RANGE
            arrays: list[object] = []
            for length in range(DEFAULT_ARRAY_MAX_LEN + 1):
                for elems in itertools.product(range(elo, ehi + 1), repeat=length):
                    arrays.append(list(elems))
            domain.append(arrays)
    return domain


def bounded_equivalence_oracle(original: n.SourceUnit, mutant_unit: n.SourceUnit,
                               fn: str, domain: list[list[object]] | None = None,
                               budget: int = DEFAULT_BUDGET) -> EquivalenceVerdict:
    """Exhaustively compare both units over the domain cross-product.

    Returns the lexicographically first counterexample, else Equivalent.
    Raises DomainTooLarge above 10^6 argument tuples.
    """
    decl = original.function(fn)
    if domain is None:
        domain = default_domain(decl)
    total = 1
    for values in domain:
        total *= len(values)
        if total > ORACLE_MAX_TUPLES:
            raise DomainTooLarge(f"domain exceeds {ORACLE_MAX_TUPLES} tuples")
    desc = "x".join(str(len(v)) for v in domain) + f" = {total} tuples"
    for args in itertools.product(*domain):
        call = [list(a) if isinstance(a, list) else a for a in args]
        o1, _ = evaluate_call(original, fn, list(call), budget)
        o2, _ = evaluate_call(mutant_unit, fn, list(call), budget)
        if o1 != o2:
            return EquivalenceVerdict(False, desc, fn, tuple(args), o1, o2)
    return EquivalenceVerdict(True, desc, fn)


def counterexample_test(verdict: EquivalenceVerdict) -> TestCase | None:
    """Convert a counterexample into a single-assertion killing test,
    when the original outcome is a value."""
    if verdict.equivalent or verdict.original is None or not verdict.original.is_value:
        return None
    args = tuple(tuple(a) if isinstance(a, list) else a for a in verdict.args)
    expected = verdict.original.value
    if isinstance(expected, list):
        expected = tuple(expected)
    return TestCase([Assertion(verdict.fn, args, expected)])
