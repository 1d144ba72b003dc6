"""Naive seeded bot policies for headless simulation.

Bots exist to exercise the engine, not to play well.  They act only
through the public command surface and decide their moves from public
state (the unit source and the mutants' published sources).
"""

from __future__ import annotations

import random

from .engine import MUTANT_ALIVE, Game
from .lang.interp import evaluate_call
from .lang.parser import parse_unit
from .mutation import enumerate_mutants
from .testing import Assertion, TestCase, default_domain, kill_check

DEFAULT_ATTACK_OPS = ("AOR", "ROR")
DEFAULT_TEST_TRIES = 25


class AttackerBot:
    """Submits a uniformly random not-yet-submitted enumerated candidate."""

    def __init__(self, player_id: str, seed: int, ops=DEFAULT_ATTACK_OPS):
        self.player_id = player_id
        self.rng = random.Random(seed)
        self.ops = ops
        self._remaining: list[str] | None = None

    def move(self, game: Game) -> bool:
        """Submit one mutant; returns False (a pass) when none remain."""
        if self._remaining is None:
            candidates = enumerate_mutants(game.unit, self.ops)
            self._remaining = [c.mutated_source for c in candidates]
        submitted = {m.source for m in game.state.mutants.values()}
        pool = [s for s in self._remaining if s not in submitted]
        if not pool:
            return False
        choice = self.rng.choice(pool)
        self._remaining.remove(choice)
        game.submit_mutant(self.player_id, choice)
        return True


class DefenderBot:
    """Tries up to ``tries`` random single-assertion tests per turn and
    submits the first that kills an alive unclaimed mutant or increases
    suite coverage; otherwise passes."""

    def __init__(self, player_id: str, seed: int, tries: int = DEFAULT_TEST_TRIES):
        self.player_id = player_id
        self.rng = random.Random(seed)
        self.tries = tries

    def _random_assertion(self, game: Game) -> Assertion | None:
        fn = self.rng.choice(game.unit.functions)
        args = [self.rng.choice(column) for column in default_domain(fn)]
        outcome, _ = evaluate_call(game.unit, fn.name, [
            list(a) if isinstance(a, list) else a for a in args],
            game.config.step_budget)
        if not outcome.is_value:
            return None
        expected = outcome.value
        if isinstance(expected, list):
            expected = tuple(expected)
        frozen = tuple(tuple(a) if isinstance(a, list) else a for a in args)
        return Assertion(fn.name, frozen, expected)

    def move(self, game: Game) -> bool:
        targets = [(mid, m) for mid, m in game.state.mutants.items()
                   if m.state == MUTANT_ALIVE and mid not in game.state.claims]
        mutant_units = {mid: parse_unit(m.source, game.config.unit_name)
                        for mid, m in targets}
        suite_cover = game.state.suite_covered_lines()
        for _ in range(self.tries):
            assertion = self._random_assertion(game)
            if assertion is None:
                continue
            test = TestCase([assertion])
            kills = any(kill_check(game.unit, mu, test, game.config.step_budget).killed
                        for mu in mutant_units.values())
            _, trace = evaluate_call(game.unit, assertion.fn, assertion.call_args(),
                                     game.config.step_budget)
            widens = bool(trace.covered_lines - suite_cover)
            if kills or widens:
                game.submit_test(self.player_id, [assertion.to_record()])
                return True
        return False
