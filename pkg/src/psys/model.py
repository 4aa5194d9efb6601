"""System descriptions for membrane (cell) and tissue P systems.

A cell system places multisets in a tree of nested membranes and moves
objects across membranes with symport and antiport rules. A tissue
system replaces the tree with numbered cells 1..n plus node 0, the
environment, and attaches each rule to a pair of nodes. Minimal
interaction systems move at most two named objects per rule between
arbitrary nodes.

Validators report violations as data with stable codes; they never
raise on bad systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .multiset import Multiset, format_multiset, is_valid_name

# Violation codes are stable identifiers; tests and scripts match on them.
SKIN_PULLS_UNLIMITED = "V001"  # symport-in at the skin over unlimited objects only
OUTPUT_NOT_ELEMENTARY = "V002"
OBJECT_NOT_DECLARED = "V003"
EMPTY_RULE_SIDE = "V004"
ENV_SYMPORT_UNLIMITED = "V005"  # tissue symport out of node 0 over unlimited objects only
EQUAL_ENDPOINTS = "V006"
NODE_OUT_OF_RANGE = "V007"
BAD_STRUCTURE = "V008"
UNKNOWN_INIT_REGION = "V009"
OUTPUT_OUT_OF_RANGE = "V010"
ENV_NOT_IN_ALPHABET = "V011"
BAD_OBJECT_NAME = "V012"
UNBOUNDED_RULE = "V013"  # rule consumes unlimited objects only; applicability has no bound
INERT_RULE = "W001"  # interaction rule that moves nothing


@dataclass(frozen=True)
class Violation:
    code: str
    location: str
    message: str
    severity: str = "error"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors()

    def errors(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.severity == "error")

    def warnings(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.severity == "warning")

    def __str__(self) -> str:
        if not self.violations:
            return "valid"
        return "\n".join(
            f"{v.code} [{v.severity}] {v.location}: {v.message}" for v in self.violations
        )


class MembraneStructure:
    """Rooted tree of membranes labeled 1..n, given by a parent map.

    The skin is the single label without a parent. `outer` maps the skin
    to 0, the environment, mirroring node numbering in tissue systems.
    """

    __slots__ = ("n", "parent")

    def __init__(self, n: int, parent: Mapping[int, int] = ()):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "parent", dict(parent))

    def __setattr__(self, name, value):
        raise AttributeError("MembraneStructure is immutable")

    @property
    def labels(self) -> range:
        return range(1, self.n + 1)

    def problems(self) -> list[str]:
        """Everything preventing this from being a rooted tree on 1..n."""
        out = []
        if self.n < 1:
            out.append(f"membrane count must be positive, got {self.n}")
            return out
        labels = set(self.labels)
        bad_keys = set(self.parent) - labels
        if bad_keys:
            out.append(f"parent entries for unknown labels {sorted(bad_keys)}")
        bad_values = set(self.parent.values()) - labels
        if bad_values:
            out.append(f"parents point at unknown labels {sorted(bad_values)}")
        roots = labels - set(self.parent)
        if len(roots) != 1:
            out.append(f"expected exactly one skin membrane, found {sorted(roots)}")
        if out:
            return out
        # Walk up from every label; a tree reaches the root without repeats.
        root = next(iter(roots))
        for label in labels:
            seen = set()
            node = label
            while node != root:
                if node in seen:
                    out.append(f"parent chain from membrane {label} loops")
                    break
                seen.add(node)
                node = self.parent[node]
        return out

    @property
    def skin(self) -> int:
        roots = [label for label in self.labels if label not in self.parent]
        if len(roots) != 1:
            raise ValueError("structure has no unique skin membrane")
        return roots[0]

    def outer(self, label: int) -> int:
        """Enclosing region; 0 is the environment outside the skin."""
        return self.parent.get(label, 0)

    def children(self, label: int) -> tuple[int, ...]:
        return tuple(child for child, p in sorted(self.parent.items()) if p == label)

    def leaves(self) -> tuple[int, ...]:
        inner = set(self.parent.values())
        return tuple(label for label in self.labels if label not in inner)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MembraneStructure):
            return NotImplemented
        return self.n == other.n and self.parent == other.parent

    def __hash__(self) -> int:
        return hash((self.n, tuple(sorted(self.parent.items()))))

    def __repr__(self) -> str:
        return f"MembraneStructure({self.n}, {self.parent!r})"


@dataclass(frozen=True)
class SymportIn:
    """Pull `objects` into the owning region from its outer region."""

    objects: Multiset


@dataclass(frozen=True)
class SymportOut:
    """Push `objects` from the owning region to its outer region."""

    objects: Multiset


@dataclass(frozen=True)
class CellAntiport:
    """Swap `outbound` (inside the region) for `inbound` (in the outer region)."""

    outbound: Multiset
    inbound: Multiset


CellRuleForm = Union[SymportIn, SymportOut, CellAntiport]


@dataclass(frozen=True)
class CellRule:
    region: int
    form: CellRuleForm


@dataclass(frozen=True)
class TissueSymport:
    """Move `objects` from node `src` to node `dst`."""

    src: int
    objects: Multiset
    dst: int


@dataclass(frozen=True)
class TissueAntiport:
    """Swap `outbound` (at `src`) for `inbound` (at `dst`)."""

    src: int
    outbound: Multiset
    inbound: Multiset
    dst: int


TissueRule = Union[TissueSymport, TissueAntiport]


@dataclass(frozen=True)
class InteractionRule:
    """Move object `obj_a` from `src_a` to `dst_a` and `obj_b` from `src_b` to `dst_b`,
    jointly: both objects must be present for the rule to fire."""

    obj_a: str
    src_a: int
    obj_b: str
    src_b: int
    dst_a: int
    dst_b: int

    def swapped(self) -> "InteractionRule":
        """The same rule with the two object roles exchanged."""
        return InteractionRule(
            self.obj_b, self.src_b, self.obj_a, self.src_a, self.dst_b, self.dst_a
        )


@dataclass(frozen=True)
class UniportRule:
    """Move a single object from `src` to `dst`, unconditionally."""

    obj: str
    src: int
    dst: int


@dataclass
class CellPSystem:
    alphabet: frozenset[str]
    structure: MembraneStructure
    init: dict[int, Multiset]
    env_support: frozenset[str]
    rules: tuple[CellRule, ...]
    output: int

    def __init__(self, alphabet, structure, init, env_support, rules, output):
        self.alphabet = frozenset(alphabet)
        self.structure = structure
        self.init = {label: ms for label, ms in dict(init).items() if ms}
        self.env_support = frozenset(env_support)
        self.rules = tuple(rules)
        self.output = output

    def initial_contents(self, label: int) -> Multiset:
        return self.init.get(label, Multiset())

    def __eq__(self, other: object) -> bool:
        # Rule order carries no meaning, so compare rules as a multiset.
        if not isinstance(other, CellPSystem):
            return NotImplemented
        key = lambda r: (r.region, cell_rule_text(r))
        return (
            self.alphabet == other.alphabet
            and self.structure == other.structure
            and self.init == other.init
            and self.env_support == other.env_support
            and self.output == other.output
            and sorted(self.rules, key=key) == sorted(other.rules, key=key)
        )


@dataclass
class TissuePSystem:
    alphabet: frozenset[str]
    n_cells: int
    init: dict[int, Multiset]
    env_support: frozenset[str]
    rules: tuple[TissueRule, ...]
    output: int

    def __init__(self, alphabet, n_cells, init, env_support, rules, output):
        self.alphabet = frozenset(alphabet)
        self.n_cells = n_cells
        self.init = {cell: ms for cell, ms in dict(init).items() if ms}
        self.env_support = frozenset(env_support)
        self.rules = tuple(rules)
        self.output = output

    def initial_contents(self, cell: int) -> Multiset:
        return self.init.get(cell, Multiset())

    def __eq__(self, other: object) -> bool:
        # Rule order carries no meaning, so compare rules as a multiset.
        if not isinstance(other, TissuePSystem):
            return NotImplemented
        key = lambda r: (r.src, r.dst, tissue_rule_text(r))
        return (
            self.alphabet == other.alphabet
            and self.n_cells == other.n_cells
            and self.init == other.init
            and self.env_support == other.env_support
            and self.output == other.output
            and sorted(self.rules, key=key) == sorted(other.rules, key=key)
        )


@dataclass
class InteractionSystem:
    """Tissue-style system whose rules are interaction and uniport rules."""

    alphabet: frozenset[str]
    n_cells: int
    init: dict[int, Multiset]
    env_support: frozenset[str]
    rules: tuple[Union[InteractionRule, UniportRule], ...]
    output: int

    def __init__(self, alphabet, n_cells, init, env_support, rules, output):
        self.alphabet = frozenset(alphabet)
        self.n_cells = n_cells
        self.init = {cell: ms for cell, ms in dict(init).items() if ms}
        self.env_support = frozenset(env_support)
        self.rules = tuple(rules)
        self.output = output

    def initial_contents(self, cell: int) -> Multiset:
        return self.init.get(cell, Multiset())


PSystem = Union[CellPSystem, TissuePSystem, InteractionSystem]


def cell_rule_text(rule: CellRule) -> str:
    form = rule.form
    if isinstance(form, SymportIn):
        return f"({format_multiset(form.objects)}, in)"
    if isinstance(form, SymportOut):
        return f"({format_multiset(form.objects)}, out)"
    return f"({format_multiset(form.outbound)}, out; {format_multiset(form.inbound)}, in)"


def tissue_rule_text(rule: TissueRule) -> str:
    if isinstance(rule, TissueSymport):
        return f"({rule.src}, {format_multiset(rule.objects)}, {rule.dst})"
    return (
        f"({rule.src}, {format_multiset(rule.outbound)} / "
        f"{format_multiset(rule.inbound)}, {rule.dst})"
    )


def interaction_rule_text(rule: Union[InteractionRule, UniportRule]) -> str:
    if isinstance(rule, UniportRule):
        return f"({rule.obj},{rule.src}) -> ({rule.obj},{rule.dst})"
    return (
        f"({rule.obj_a},{rule.src_a})({rule.obj_b},{rule.src_b})"
        f" -> ({rule.obj_a},{rule.dst_a})({rule.obj_b},{rule.dst_b})"
    )


def _check_names(alphabet: Iterable[str], env_support: Iterable[str], out: list[Violation]):
    for name in sorted(alphabet):
        if not is_valid_name(name):
            out.append(
                Violation(BAD_OBJECT_NAME, "alphabet", f"invalid object name {name!r}")
            )
    stray = sorted(set(env_support) - set(alphabet))
    if stray:
        out.append(
            Violation(
                ENV_NOT_IN_ALPHABET,
                "environment",
                f"environment objects not in the alphabet: {stray}",
            )
        )


def _check_objects(ms: Multiset, alphabet: frozenset[str], where: str, out: list[Violation]):
    unknown = sorted(name for name, _ in ms.items() if name not in alphabet)
    if unknown:
        out.append(
            Violation(OBJECT_NOT_DECLARED, where, f"undeclared objects: {unknown}")
        )


def _check_init(init, valid_regions, alphabet, out: list[Violation]):
    for label in sorted(init):
        if label not in valid_regions:
            out.append(
                Violation(
                    UNKNOWN_INIT_REGION,
                    f"init {label}",
                    f"no region labeled {label}",
                )
            )
        else:
            _check_objects(init[label], alphabet, f"init {label}", out)


def validate_cell(sys: CellPSystem) -> ValidationReport:
    """Check every structural invariant of a cell system.

    Violations are reported with their location; an empty report means
    the system is well formed and safe to hand to the engine.
    """
    out: list[Violation] = []
    _check_names(sys.alphabet, sys.env_support, out)
    structure_problems = sys.structure.problems()
    for problem in structure_problems:
        out.append(Violation(BAD_STRUCTURE, "structure", problem))
    tree_ok = not structure_problems
    labels = set(sys.structure.labels) if tree_ok else set()
    _check_init(sys.init, labels, sys.alphabet, out)
    for idx, rule in enumerate(sys.rules):
        where = f"rule {idx + 1} at region {rule.region}"
        if tree_ok and rule.region not in labels:
            out.append(
                Violation(NODE_OUT_OF_RANGE, where, f"no membrane labeled {rule.region}")
            )
            continue
        form = rule.form
        sides = (
            [form.objects]
            if isinstance(form, (SymportIn, SymportOut))
            else [form.outbound, form.inbound]
        )
        for side in sides:
            if not side:
                out.append(
                    Violation(EMPTY_RULE_SIDE, where, "rule sides must be non-empty")
                )
            _check_objects(side, sys.alphabet, where, out)
        if (
            tree_ok
            and isinstance(form, SymportIn)
            and rule.region == sys.structure.skin
            and form.objects
            and all(name in sys.env_support for name in form.objects.support())
        ):
            out.append(
                Violation(
                    SKIN_PULLS_UNLIMITED,
                    where,
                    "symport-in at the skin may not draw only on the unlimited "
                    "environment supply",
                )
            )
    if tree_ok:
        if sys.output not in labels:
            out.append(
                Violation(
                    OUTPUT_OUT_OF_RANGE, "output", f"no membrane labeled {sys.output}"
                )
            )
        elif sys.output not in sys.structure.leaves():
            out.append(
                Violation(
                    OUTPUT_NOT_ELEMENTARY,
                    "output",
                    f"membrane {sys.output} contains other membranes",
                )
            )
    return ValidationReport(tuple(out))


def validate_tissue(sys: TissuePSystem) -> ValidationReport:
    out: list[Violation] = []
    _check_names(sys.alphabet, sys.env_support, out)
    if sys.n_cells < 1:
        out.append(
            Violation(BAD_STRUCTURE, "cells", f"cell count must be positive, got {sys.n_cells}")
        )
    cells = set(range(1, sys.n_cells + 1))
    _check_init(sys.init, cells, sys.alphabet, out)
    nodes = cells | {0}
    for idx, rule in enumerate(sys.rules):
        where = f"rule {idx + 1} {tissue_rule_text(rule)}"
        for node in (rule.src, rule.dst):
            if node not in nodes:
                out.append(Violation(NODE_OUT_OF_RANGE, where, f"no node {node}"))
        if rule.src == rule.dst:
            out.append(
                Violation(EQUAL_ENDPOINTS, where, "rule endpoints must differ")
            )
        sides = (
            [rule.objects]
            if isinstance(rule, TissueSymport)
            else [rule.outbound, rule.inbound]
        )
        for side in sides:
            if not side:
                out.append(
                    Violation(EMPTY_RULE_SIDE, where, "rule sides must be non-empty")
                )
            _check_objects(side, sys.alphabet, where, out)
        if (
            isinstance(rule, TissueSymport)
            and rule.src == 0
            and rule.objects
            and all(name in sys.env_support for name in rule.objects.support())
        ):
            out.append(
                Violation(
                    ENV_SYMPORT_UNLIMITED,
                    where,
                    "symport out of the environment may not draw only on the "
                    "unlimited supply",
                )
            )
    if sys.output not in cells:
        out.append(
            Violation(OUTPUT_OUT_OF_RANGE, "output", f"no cell {sys.output}")
        )
    return ValidationReport(tuple(out))


def validate_interaction(sys: InteractionSystem) -> ValidationReport:
    out: list[Violation] = []
    _check_names(sys.alphabet, sys.env_support, out)
    if sys.n_cells < 1:
        out.append(
            Violation(BAD_STRUCTURE, "cells", f"cell count must be positive, got {sys.n_cells}")
        )
    cells = set(range(1, sys.n_cells + 1))
    _check_init(sys.init, cells, sys.alphabet, out)
    nodes = cells | {0}
    for idx, rule in enumerate(sys.rules):
        where = f"rule {idx + 1} {interaction_rule_text(rule)}"
        if isinstance(rule, UniportRule):
            positions = (rule.src, rule.dst)
            objects = (rule.obj,)
            unbounded = rule.src == 0 and rule.obj in sys.env_support
            inert = rule.src == rule.dst
        else:
            positions = (rule.src_a, rule.src_b, rule.dst_a, rule.dst_b)
            objects = (rule.obj_a, rule.obj_b)
            unbounded = (
                rule.src_a == 0
                and rule.src_b == 0
                and rule.obj_a in sys.env_support
                and rule.obj_b in sys.env_support
            )
            inert = rule.src_a == rule.dst_a and rule.src_b == rule.dst_b
        for node in positions:
            if node not in nodes:
                out.append(Violation(NODE_OUT_OF_RANGE, where, f"no node {node}"))
        for name in objects:
            if name not in sys.alphabet:
                out.append(
                    Violation(OBJECT_NOT_DECLARED, where, f"undeclared object {name!r}")
                )
        if unbounded:
            out.append(
                Violation(
                    UNBOUNDED_RULE,
                    where,
                    "rule consumes only unlimited environment objects; its "
                    "applicability would have no bound",
                )
            )
        if inert:
            out.append(
                Violation(INERT_RULE, where, "rule moves nothing", severity="warning")
            )
    if sys.output not in cells:
        out.append(
            Violation(OUTPUT_OUT_OF_RANGE, "output", f"no cell {sys.output}")
        )
    return ValidationReport(tuple(out))


def validate(sys: PSystem) -> ValidationReport:
    if isinstance(sys, CellPSystem):
        return validate_cell(sys)
    if isinstance(sys, TissuePSystem):
        return validate_tissue(sys)
    return validate_interaction(sys)


def derive_graph(sys: TissuePSystem) -> frozenset[tuple[int, int]]:
    """Directed communication edges induced by the rule set.

    A symport yields one edge src->dst; an antiport yields both
    directions between its endpoints.
    """
    edges = set()
    for rule in sys.rules:
        if isinstance(rule, TissueSymport):
            edges.add((rule.src, rule.dst))
        else:
            edges.add((rule.src, rule.dst))
            edges.add((rule.dst, rule.src))
    return frozenset(edges)


def encode_cell_as_tissue(sys: CellPSystem) -> TissuePSystem:
    """Re-express a cell system as a tissue system with the same behavior.

    Membranes become cells with the same labels, the region outside the
    skin becomes node 0, and each rule is attached to the membrane/outer
    pair it crosses. Rule order is preserved, so rule k of the output
    corresponds to rule k of the input.
    """
    report = validate_cell(sys)
    if not report.ok:
        raise ValueError(f"cannot encode an invalid cell system:\n{report}")
    rules: list[TissueRule] = []
    for rule in sys.rules:
        outer = sys.structure.outer(rule.region)
        form = rule.form
        if isinstance(form, SymportIn):
            rules.append(TissueSymport(outer, form.objects, rule.region))
        elif isinstance(form, SymportOut):
            rules.append(TissueSymport(rule.region, form.objects, outer))
        else:
            rules.append(
                TissueAntiport(rule.region, form.outbound, form.inbound, outer)
            )
    return TissuePSystem(
        alphabet=sys.alphabet,
        n_cells=sys.structure.n,
        init=dict(sys.init),
        env_support=sys.env_support,
        rules=rules,
        output=sys.output,
    )
