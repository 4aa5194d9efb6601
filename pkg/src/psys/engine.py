"""Exact maximally-parallel operational semantics.

Every rule form reduces to the same shape: consume some multisets at
some nodes, then produce some multisets at some nodes. The engine
normalizes a system once, then enumerates maximal steps, applies them
in two phases (all consumption from the old configuration, then all
production), detects halting and extracts results.

Node 0 is the environment. Objects in the system's unlimited supply are
never tracked there; everything else accumulates in a finite remainder.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union

from .model import (
    CellAntiport,
    CellPSystem,
    InteractionRule,
    InteractionSystem,
    PSystem,
    SymportIn,
    SymportOut,
    TissueAntiport,
    TissuePSystem,
    TissueSymport,
    UniportRule,
    cell_rule_text,
    interaction_rule_text,
    tissue_rule_text,
)
from .multiset import EMPTY, EnvContent, Multiset


class UnboundedStepError(Exception):
    """A rule can apply any number of times at once.

    Only happens on systems that skip validation: every check rejects
    rules drawing solely on the unlimited environment supply.
    """


class Configuration:
    """Immutable snapshot: one multiset per region plus the environment."""

    __slots__ = ("regions", "env", "_hash")

    def __init__(self, regions: Mapping[int, Multiset], env: EnvContent):
        object.__setattr__(self, "regions", dict(regions))
        object.__setattr__(self, "env", env)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Configuration is immutable")

    def region(self, label: int) -> Multiset:
        return self.regions[label]

    @property
    def total_inside(self) -> int:
        return sum(ms.size for ms in self.regions.values())

    @property
    def total_tracked(self) -> int:
        """All finitely-tracked objects: every region plus the env remainder."""
        return self.total_inside + self.env.finite.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.regions == other.regions and self.env == other.env

    def __hash__(self) -> int:
        if self._hash is None:
            key = (tuple(sorted(self.regions.items())), self.env)
            object.__setattr__(self, "_hash", hash(key))
        return self._hash

    def __repr__(self) -> str:
        inside = ", ".join(f"{label}: {ms}" for label, ms in sorted(self.regions.items()))
        return f"<Configuration {{{inside}}} env {self.env.finite}>"


@dataclass(frozen=True)
class TransferRule:
    """Normalized rule: per-node consumption and production."""

    index: int
    rid: str
    text: str
    consume: tuple[tuple[int, Multiset], ...]
    produce: tuple[tuple[int, Multiset], ...]


@dataclass(frozen=True)
class StepChoice:
    """One maximally parallel step: rule index -> positive multiplicity."""

    applications: tuple[tuple[int, int], ...]

    def multiplicity(self, rule_index: int) -> int:
        for index, count in self.applications:
            if index == rule_index:
                return count
        return 0

    @property
    def total_applications(self) -> int:
        return sum(count for _, count in self.applications)


@dataclass
class TraceStep:
    choice: StepChoice
    after: Configuration
    note: Optional[str] = None


@dataclass
class Trace:
    initial: Configuration
    steps: list[TraceStep] = field(default_factory=list)
    halted: bool = False

    @property
    def steps_taken(self) -> int:
        return len(self.steps)

    @property
    def final(self) -> Configuration:
        return self.steps[-1].after if self.steps else self.initial

    def configurations(self) -> Iterator[Configuration]:
        yield self.initial
        for step in self.steps:
            yield step.after


def _merge(parts: list[tuple[int, Multiset]]) -> tuple[tuple[int, Multiset], ...]:
    by_node: dict[int, Multiset] = {}
    for node, ms in parts:
        by_node[node] = by_node.get(node, EMPTY) + ms
    return tuple(sorted(by_node.items()))


def normalize_rules(sys: PSystem) -> tuple[TransferRule, ...]:
    """Express every rule of the system as node-indexed transfers.

    Rule order is preserved and identifiers are positional (r1, r2, ...),
    so systems derived from each other rule-for-rule keep aligned ids.
    """
    out = []
    if isinstance(sys, CellPSystem):
        for pos, rule in enumerate(sys.rules):
            region = rule.region
            outer = sys.structure.outer(region)
            form = rule.form
            if isinstance(form, SymportIn):
                consume = [(outer, form.objects)]
                produce = [(region, form.objects)]
            elif isinstance(form, SymportOut):
                consume = [(region, form.objects)]
                produce = [(outer, form.objects)]
            else:
                consume = [(region, form.outbound), (outer, form.inbound)]
                produce = [(outer, form.outbound), (region, form.inbound)]
            text = f"{cell_rule_text(rule)} @ {region}"
            out.append(
                TransferRule(pos, f"r{pos + 1}", text, _merge(consume), _merge(produce))
            )
    elif isinstance(sys, TissuePSystem):
        for pos, rule in enumerate(sys.rules):
            if isinstance(rule, TissueSymport):
                consume = [(rule.src, rule.objects)]
                produce = [(rule.dst, rule.objects)]
            else:
                consume = [(rule.src, rule.outbound), (rule.dst, rule.inbound)]
                produce = [(rule.dst, rule.outbound), (rule.src, rule.inbound)]
            text = tissue_rule_text(rule)
            out.append(
                TransferRule(pos, f"r{pos + 1}", text, _merge(consume), _merge(produce))
            )
    else:
        for pos, rule in enumerate(sys.rules):
            if isinstance(rule, UniportRule):
                consume = [(rule.src, Multiset([rule.obj]))]
                produce = [(rule.dst, Multiset([rule.obj]))]
            else:
                consume = [
                    (rule.src_a, Multiset([rule.obj_a])),
                    (rule.src_b, Multiset([rule.obj_b])),
                ]
                produce = [
                    (rule.dst_a, Multiset([rule.obj_a])),
                    (rule.dst_b, Multiset([rule.obj_b])),
                ]
            text = interaction_rule_text(rule)
            out.append(
                TransferRule(pos, f"r{pos + 1}", text, _merge(consume), _merge(produce))
            )
    return tuple(out)


def _labels(sys: PSystem) -> range:
    if isinstance(sys, CellPSystem):
        return sys.structure.labels
    return range(1, sys.n_cells + 1)


class Engine:
    """Transition function of one system.

    Instances are cheap and stateless beyond the normalized rules; all
    methods are pure functions of the configuration they receive.
    """

    def __init__(self, sys: PSystem):
        self.system = sys
        self.labels = _labels(sys)
        self.rules = normalize_rules(sys)
        self.output = sys.output

    def initial(self) -> Configuration:
        regions = {label: self.system.initial_contents(label) for label in self.labels}
        return Configuration(regions, EnvContent(self.system.env_support))

    def _max_multiplicity(self, rule: TransferRule, c: Configuration) -> Optional[int]:
        """Largest m with m parallel applications affordable; None if unbounded."""
        bound: Optional[int] = None
        for node, need in rule.consume:
            if node == 0:
                for name, count in need.items():
                    if name in c.env.infinite:
                        continue
                    have = c.env.finite.count(name)
                    bound = min(bound, have // count) if bound is not None else have // count
            else:
                have_ms = c.regions[node]
                for name, count in need.items():
                    have = have_ms.count(name)
                    bound = min(bound, have // count) if bound is not None else have // count
            if bound == 0:
                return 0
        return bound

    def enabled(self, c: Configuration) -> list[tuple[TransferRule, int]]:
        """Rules applicable at least once, with the largest standalone multiplicity."""
        out = []
        for rule in self.rules:
            bound = self._max_multiplicity(rule, c)
            if bound is None:
                raise UnboundedStepError(
                    f"rule {rule.rid} {rule.text} consumes only unlimited objects"
                )
            if bound > 0:
                out.append((rule, bound))
        return out

    def is_halted(self, c: Configuration) -> bool:
        return not self.enabled(c)

    def result(self, c: Configuration) -> int:
        if not self.is_halted(c):
            raise ValueError("result is only defined for halted configurations")
        return c.regions[self.output].size

    def maximal_steps(
        self, c: Configuration, cap: int = 10_000
    ) -> tuple[tuple[StepChoice, ...], bool]:
        """All maximal steps from `c`, in a fixed canonical order.

        Returns (choices, complete). complete is False when `cap` many
        choices were found and more may exist, or when the enumeration
        work limit was hit on a pathologically wide configuration.
        """
        enabled = self.enabled(c)
        if not enabled:
            return (), True
        choices: list[StepChoice] = []
        aborted = False
        # Every jointly applicable multiplicity vector, highest counts
        # first, keeping the ones no single extra application extends.
        # Abort only once we are sure to overflow, so hitting cap exactly
        # still reports a complete enumeration.
        work_limit = max(cap * 64, 65_536)
        leaves = 0

        def available_after(
            assignment: list[tuple[TransferRule, int]], rule: TransferRule
        ) -> int:
            remaining_bound: Optional[int] = None
            for node, need in rule.consume:
                if node == 0:
                    pool = c.env.finite
                    spent = Multiset()
                    for chosen, m in assignment:
                        for cnode, cms in chosen.consume:
                            if cnode == 0:
                                spent = spent + cms.scale(m)
                    for name, count in need.items():
                        if name in c.env.infinite:
                            continue
                        have = pool.count(name) - spent.count(name)
                        b = have // count
                        remaining_bound = (
                            b if remaining_bound is None else min(remaining_bound, b)
                        )
                else:
                    pool = c.regions[node]
                    spent = Multiset()
                    for chosen, m in assignment:
                        for cnode, cms in chosen.consume:
                            if cnode == node:
                                spent = spent + cms.scale(m)
                    for name, count in need.items():
                        have = pool.count(name) - spent.count(name)
                        b = have // count
                        remaining_bound = (
                            b if remaining_bound is None else min(remaining_bound, b)
                        )
                if remaining_bound == 0:
                    return 0
            return remaining_bound if remaining_bound is not None else 0

        rules_in_play = [rule for rule, _ in enabled]

        def extendable(assignment: list[tuple[TransferRule, int]]) -> bool:
            return any(available_after(assignment, rule) > 0 for rule in rules_in_play)

        def dfs(pos: int, assignment: list[tuple[TransferRule, int]]):
            nonlocal aborted, leaves
            if len(choices) > cap or leaves >= work_limit:
                aborted = True
                return
            if pos == len(rules_in_play):
                leaves += 1
                if not extendable(assignment):
                    apps = tuple(
                        sorted((rule.index, m) for rule, m in assignment if m > 0)
                    )
                    choices.append(StepChoice(apps))
                return
            rule = rules_in_play[pos]
            top = available_after(assignment, rule)
            for m in range(top, -1, -1):
                assignment.append((rule, m))
                dfs(pos + 1, assignment)
                assignment.pop()
                if aborted:
                    return

        dfs(0, [])
        if len(choices) > cap:
            return tuple(choices[:cap]), False
        return tuple(choices), not aborted

    def apply(self, c: Configuration, choice: StepChoice) -> Configuration:
        """Apply one step: consume everything first, then add all products.

        Objects produced by the step are therefore never consumed by it.
        An inapplicable choice surfaces as a multiset underflow, which
        indicates a defect in the caller, not bad user input.
        """
        consumed: dict[int, Multiset] = {}
        produced: dict[int, Multiset] = {}
        for index, m in choice.applications:
            rule = self.rules[index]
            for node, ms in rule.consume:
                consumed[node] = consumed.get(node, EMPTY) + ms.scale(m)
            for node, ms in rule.produce:
                produced[node] = produced.get(node, EMPTY) + ms.scale(m)
        regions = dict(c.regions)
        for node, ms in consumed.items():
            if node != 0:
                regions[node] = regions[node] - ms
        env = c.env.take(consumed.get(0, EMPTY))
        for node, ms in produced.items():
            if node != 0:
                regions[node] = regions[node] + ms
        env = env.give(produced.get(0, EMPTY))
        return Configuration(regions, env)

    def run(
        self,
        seed: int = 0,
        max_steps: int = 10_000,
        policy: str = "enumerate-uniform",
        cap: int = 10_000,
    ) -> Trace:
        """Run one computation, choosing among maximal steps with `seed`.

        policy "enumerate-uniform" lists all maximal steps and picks one
        uniformly; if the listing overflows `cap` the step falls back to
        "greedy-random" and the trace step carries a note saying so.
        policy "greedy-random" saturates rules in a shuffled order; it
        is cheap but weights step choices unevenly.
        """
        return self._run_from(self.initial(), seed, max_steps, policy, cap)

    def _run_from(
        self, start: Configuration, seed: int, max_steps: int, policy: str, cap: int
    ) -> Trace:
        if policy not in ("enumerate-uniform", "greedy-random"):
            raise ValueError(f"unknown policy {policy!r}")
        rng = random.Random(seed)
        c = start
        trace = Trace(c)
        for _ in range(max_steps):
            if self.is_halted(c):
                trace.halted = True
                return trace
            note = None
            if policy == "enumerate-uniform":
                steps, complete = self.maximal_steps(c, cap)
                if complete:
                    choice = steps[rng.randrange(len(steps))]
                else:
                    choice = self._greedy_step(c, rng)
                    note = "greedy-random fallback: maximal-step listing overflowed"
            else:
                choice = self._greedy_step(c, rng)
            c = self.apply(c, choice)
            trace.steps.append(TraceStep(choice, c, note))
        trace.halted = self.is_halted(c)
        return trace

    def _greedy_step(self, c: Configuration, rng: random.Random) -> StepChoice:
        """Build one maximal step by saturating rules in shuffled order.

        Availability only shrinks as rules are granted, so one pass
        leaves nothing extendable.
        """
        order = list(self.rules)
        rng.shuffle(order)
        regions = dict(c.regions)
        env_finite = c.env.finite
        granted: dict[int, int] = {}
        for rule in order:
            bound: Optional[int] = None
            for node, need in rule.consume:
                pool = env_finite if node == 0 else regions[node]
                for name, count in need.items():
                    if node == 0 and name in c.env.infinite:
                        continue
                    b = pool.count(name) // count
                    bound = b if bound is None else min(bound, b)
            if bound is None:
                raise UnboundedStepError(
                    f"rule {rule.rid} {rule.text} consumes only unlimited objects"
                )
            if bound == 0:
                continue
            granted[rule.index] = bound
            for node, need in rule.consume:
                if node == 0:
                    env_finite = env_finite - need.without(c.env.infinite).scale(bound)
                else:
                    regions[node] = regions[node] - need.scale(bound)
        return StepChoice(tuple(sorted(granted.items())))

    def run_accepting(
        self,
        input_objects: Multiset,
        input_region: int,
        seed: int = 0,
        max_steps: int = 10_000,
        policy: str = "enumerate-uniform",
    ) -> tuple[str, Trace]:
        """Accepting mode: seed a region with the input, accept iff halting.

        Returns ("accepted", trace) or ("budget_exhausted", trace); a
        non-halting system cannot be distinguished from a slow one here.
        """
        boosted = dict(self.system.init)
        boosted[input_region] = boosted.get(input_region, EMPTY) + input_objects
        regions = {label: boosted.get(label, EMPTY) for label in self.labels}
        start = Configuration(regions, EnvContent(self.system.env_support))
        trace = self._run_from(start, seed, max_steps, policy, cap=10_000)
        return ("accepted" if trace.halted else "budget_exhausted"), trace

    def trace_records(self, trace: Trace) -> Iterator[dict]:
        """Line-oriented trace serialization, one JSON-ready dict per record."""

        def snapshot(c: Configuration) -> dict:
            return {
                "regions": {
                    str(label): dict(c.regions[label].items()) for label in self.labels
                },
                "env": dict(c.env.finite.items()),
            }

        yield {"step": 0, **snapshot(trace.initial)}
        for t, step in enumerate(trace.steps, start=1):
            record = {
                "step": t,
                "choice": [
                    {"rule": self.rules[index].rid, "n": m}
                    for index, m in step.choice.applications
                ],
                **snapshot(step.after),
            }
            if step.note:
                record["note"] = step.note
            yield record
        summary = {"halted": trace.halted, "steps": trace.steps_taken}
        if trace.halted:
            summary["result"] = trace.final.regions[self.output].size
        yield summary


def trace_to_lines(engine: Engine, trace: Trace) -> Iterator[str]:
    for record in engine.trace_records(trace):
        yield json.dumps(record, separators=(", ", ": "))
