"""Bounded exhaustive exploration of the computation tree.

Walks every maximal step from the initial configuration breadth-first,
memoizing visited configurations. A configuration seen again, whether
on the same path (a cycle) or another one, is not re-expanded: its
halting descendants were or will be collected from the first visit.

When no budget is hit the computation tree has been enumerated in full
and the collected results are exactly the system's generated number
set. Any budget hit is reported, never silently absorbed.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .engine import Configuration, Engine, EnvContent, StepChoice
from .model import (
    CellAntiport,
    CellPSystem,
    CellRule,
    MembraneStructure,
    SymportIn,
    SymportOut,
    validate_cell,
)
from .multiset import EMPTY, Multiset

DEFAULT_MAX_DEPTH = 64
DEFAULT_MAX_TOTAL_OBJECTS = 64
DEFAULT_MAX_BRANCHES = 10_000
DEFAULT_MAX_CONFIGS = 1_000_000


@dataclass(frozen=True)
class ExploreBudget:
    max_depth: int = DEFAULT_MAX_DEPTH
    max_total_objects: int = DEFAULT_MAX_TOTAL_OBJECTS
    max_branches: int = DEFAULT_MAX_BRANCHES
    max_configs: int = DEFAULT_MAX_CONFIGS

    def __post_init__(self):
        for name in (
            "max_depth",
            "max_total_objects",
            "max_branches",
            "max_configs",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class ExploreOutcome:
    results: frozenset[int]
    exhausted: bool
    halting_leaves: int
    cut_branches: int
    visited_configs: int

    def as_dict(self) -> dict:
        return {
            "results": sorted(self.results),
            "exhausted": self.exhausted,
            "halting_leaves": self.halting_leaves,
            "cut_branches": self.cut_branches,
            "visited": self.visited_configs,
        }


EdgeHook = Callable[[Configuration, StepChoice, Configuration], None]


def explore(
    sys,
    budget: ExploreBudget = ExploreBudget(),
    *,
    start: Optional[Configuration] = None,
    on_edge: Optional[EdgeHook] = None,
) -> ExploreOutcome:
    """Collect the results of all halting computations within budgets.

    `on_edge` is an instrumentation hook for property harnesses; it sees
    every generated (configuration, step, successor) edge once.
    """
    engine = sys if isinstance(sys, Engine) else Engine(sys)
    if start is None:
        start = engine.initial()
    results: set[int] = set()
    halting_leaves = 0
    cut_branches = 0
    exhausted = True
    visited = {start}
    queue: deque[tuple[Configuration, int]] = deque([(start, 0)])
    while queue:
        config, depth = queue.popleft()
        steps, complete = engine.maximal_steps(config, cap=budget.max_branches)
        if not steps:
            halting_leaves += 1
            results.add(config.regions[engine.output].size)
            continue
        if config.total_tracked > budget.max_total_objects:
            cut_branches += 1
            exhausted = False
            continue
        if not complete:
            cut_branches += 1
            exhausted = False
        if depth >= budget.max_depth:
            cut_branches += 1
            exhausted = False
            continue
        for choice in steps:
            successor = engine.apply(config, choice)
            if on_edge is not None:
                on_edge(config, choice, successor)
            if successor in visited:
                continue
            if len(visited) >= budget.max_configs:
                cut_branches += 1
                exhausted = False
                continue
            visited.add(successor)
            queue.append((successor, depth + 1))
    return ExploreOutcome(
        results=frozenset(results),
        exhausted=exhausted,
        halting_leaves=halting_leaves,
        cut_branches=cut_branches,
        visited_configs=len(visited),
    )


def decide_accept(
    sys, input_objects: Multiset, input_region: int, budget: ExploreBudget = ExploreBudget()
) -> str:
    """Exhaustive acceptance: does any computation on this input halt?

    "rejected_exhaustive" is only returned when the whole (finite,
    cycle-closed) computation graph was enumerated without finding a
    halting configuration, which proves every computation is infinite.
    """
    engine = Engine(sys)
    boosted = dict(sys.init)
    boosted[input_region] = boosted.get(input_region, EMPTY) + input_objects
    regions = {label: boosted.get(label, EMPTY) for label in engine.labels}
    start = Configuration(regions, EnvContent(sys.env_support))
    outcome = explore(engine, budget, start=start)
    if outcome.halting_leaves > 0:
        return "accepted"
    if outcome.exhausted:
        return "rejected_exhaustive"
    return "unknown"


@dataclass(frozen=True)
class DeterminismVerdict:
    status: str  # "deterministic_up_to_budget" | "nondeterministic" | "unknown"
    witness: Optional[Configuration] = None


def check_deterministic(
    sys, budget: ExploreBudget = ExploreBudget()
) -> DeterminismVerdict:
    """Search reachable configurations for one admitting several maximal steps."""
    engine = sys if isinstance(sys, Engine) else Engine(sys)
    start = engine.initial()
    visited = {start}
    queue: deque[tuple[Configuration, int]] = deque([(start, 0)])
    exhausted = True
    while queue:
        config, depth = queue.popleft()
        steps, complete = engine.maximal_steps(config, cap=budget.max_branches)
        if len(steps) > 1:
            return DeterminismVerdict("nondeterministic", config)
        if not complete:
            exhausted = False
        if not steps:
            continue
        if config.total_tracked > budget.max_total_objects:
            exhausted = False
            continue
        if depth >= budget.max_depth:
            exhausted = False
            continue
        successor = engine.apply(config, steps[0])
        if successor in visited:
            continue
        if len(visited) >= budget.max_configs:
            exhausted = False
            continue
        visited.add(successor)
        queue.append((successor, depth + 1))
    if exhausted:
        return DeterminismVerdict("deterministic_up_to_budget")
    return DeterminismVerdict("unknown")


@dataclass(frozen=True)
class HarnessReport:
    checked: int
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _random_shrinking_minimal_system(rng: random.Random) -> CellPSystem:
    """One-membrane system whose rules provably cannot grow the inside count.

    Rule forms: symport-out of one or two objects, and one-for-one
    antiport. An antiport (a, out; b, in) is only emitted when a is in
    the unlimited supply or b is not: otherwise each firing adds a to
    the tracked environment remainder while drawing b from the unlimited
    pool, growing the tracked total without bound.

    Symport-in is deliberately absent: a rule (x, in) at the skin can
    re-import objects previously sent out, raising the inside count
    mid-run even in systems the validator accepts.
    """
    alphabet = [f"o{i}" for i in range(rng.randint(1, 4))]
    env = frozenset(name for name in alphabet if rng.random() < 0.4)
    rules = []
    for _ in range(rng.randint(0, 5)):
        if rng.random() < 0.5:
            objects = Multiset(rng.choices(alphabet, k=rng.randint(1, 2)))
            rules.append(CellRule(1, SymportOut(objects)))
        else:
            candidates = [
                (a, b)
                for a in alphabet
                for b in alphabet
                if a in env or b not in env
            ]
            if not candidates:
                continue
            a, b = rng.choice(candidates)
            rules.append(CellRule(1, CellAntiport(Multiset([a]), Multiset([b]))))
    init = Multiset(rng.choices(alphabet, k=rng.randint(0, 4)))
    return CellPSystem(
        alphabet=alphabet,
        structure=MembraneStructure(1),
        init={1: init},
        env_support=env,
        rules=rules,
        output=1,
    )


def harness_monotone_minimal(sample_count: int, seed: int) -> HarnessReport:
    """Random one-membrane minimal systems: the inside count never grows.

    For each sample, checks three things: the inside count is
    non-increasing across every explored edge, exploration bounded by
    the initial inside count exhausts the whole tree, and every halting
    result is at most the initial inside count.
    """
    rng = random.Random(seed)
    violations: list[str] = []
    for k in range(sample_count):
        sys = _random_shrinking_minimal_system(rng)
        report = validate_cell(sys)
        if not report.ok:
            violations.append(f"sample {k}: generator produced an invalid system: {report}")
            continue
        initial_inside = sys.initial_contents(1).size

        def watch_edge(config, choice, successor, _k=k):
            if successor.total_inside > config.total_inside:
                violations.append(
                    f"sample {_k}: inside count grew {config.total_inside} -> "
                    f"{successor.total_inside} on {choice}"
                )

        budget = ExploreBudget(
            max_depth=4096,
            max_total_objects=max(initial_inside, 1),
            max_branches=10_000,
            max_configs=1_000_000,
        )
        outcome = explore(sys, budget, on_edge=watch_edge)
        if not outcome.exhausted:
            violations.append(
                f"sample {k}: exploration bounded by the initial size did not exhaust"
            )
        for value in outcome.results:
            if value > initial_inside:
                violations.append(
                    f"sample {k}: result {value} exceeds initial inside count "
                    f"{initial_inside}"
                )
    return HarnessReport(checked=sample_count, violations=tuple(violations))


def _is_minimal_cell_rule(rule: CellRule) -> bool:
    form = rule.form
    if isinstance(form, (SymportIn, SymportOut)):
        return form.objects.size <= 2
    return form.outbound.size == 1 and form.inbound.size == 1


def harness_deterministic_minimal(
    corpus: Sequence[CellPSystem], budget: ExploreBudget = ExploreBudget()
) -> HarnessReport:
    """Deterministic minimal systems: halting runs never exceed the initial total.

    Each corpus entry must use only minimal rules (symport of at most
    two objects, one-for-one antiport), be deterministic within the
    budget, and halt; the harness then replays its single run and
    checks the inside total against the initial total at every step.
    """
    violations: list[str] = []
    for k, sys in enumerate(corpus):
        if not all(_is_minimal_cell_rule(rule) for rule in sys.rules):
            violations.append(f"system {k}: has non-minimal rules")
            continue
        report = validate_cell(sys)
        if not report.ok:
            violations.append(f"system {k}: invalid: {report}")
            continue
        verdict = check_deterministic(sys, budget)
        if verdict.status != "deterministic_up_to_budget":
            violations.append(
                f"system {k}: not certified deterministic ({verdict.status})"
            )
            continue
        engine = Engine(sys)
        config = engine.initial()
        initial_total = config.total_inside
        halted = False
        for _ in range(budget.max_depth):
            steps, _complete = engine.maximal_steps(config, cap=budget.max_branches)
            if not steps:
                halted = True
                break
            config = engine.apply(config, steps[0])
            if config.total_inside > initial_total:
                violations.append(
                    f"system {k}: inside total {config.total_inside} exceeds "
                    f"initial {initial_total}"
                )
        if not halted:
            violations.append(
                f"system {k}: no halting computation within {budget.max_depth} steps; "
                "corpus entries must halt"
            )
    return HarnessReport(checked=len(corpus), violations=tuple(violations))
