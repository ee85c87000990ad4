"""Domain types for behaviour specifications and their consistency checks.

All types are immutable once built. A :class:`Specification` is not validated
on construction so that malformed input can still be represented and reported
on; call :func:`validate_specification` to obtain the list of problems.
"""
from __future__ import annotations

import enum
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    location: Optional[tuple[int, int]] = None
    state: Optional["State"] = None

    def __str__(self) -> str:
        where = f"{self.location[0]}:{self.location[1]}: " if self.location else ""
        return f"{where}{self.severity.value}: {self.code}: {self.message}"


def error(code: str, message: str, location=None, state=None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, location, state)


class SpecificationError(Exception):
    """Raised when a specification cannot be parsed or fails validation."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


# ---------------------------------------------------------------------------
# Conditions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    variable: str
    value: str
    negated: bool = False

    def holds(self, state: Mapping[str, str]) -> bool:
        return (state[self.variable] == self.value) != self.negated

    def __str__(self) -> str:
        text = f"{self.variable} is {self.value}"
        return f"NOT {text}" if self.negated else text


@dataclass(frozen=True)
class And:
    children: tuple["Condition", ...]

    def holds(self, state: Mapping[str, str]) -> bool:
        return all(c.holds(state) for c in self.children)


@dataclass(frozen=True)
class Or:
    children: tuple["Condition", ...]

    def holds(self, state: Mapping[str, str]) -> bool:
        return any(c.holds(state) for c in self.children)


Condition = Union[Literal, And, Or]


def all_of(*items: Condition) -> Condition:
    """Conjunction in normal form: nested ANDs flattened, singletons unwrapped."""
    flat: list[Condition] = []
    for item in items:
        flat.extend(item.children if isinstance(item, And) else (item,))
    if not flat:
        raise ValueError("empty conjunction")
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def any_of(*items: Condition) -> Condition:
    """Disjunction in normal form, see :func:`all_of`."""
    flat: list[Condition] = []
    for item in items:
        flat.extend(item.children if isinstance(item, Or) else (item,))
    if not flat:
        raise ValueError("empty disjunction")
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def literals(cond: Condition) -> Iterator[Literal]:
    if isinstance(cond, Literal):
        yield cond
    else:
        for child in cond.children:
            yield from literals(child)


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VariableDecl:
    name: str
    domain: tuple[str, ...]


@dataclass(frozen=True)
class EffectSet:
    assignments: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict[str, str]:
        return dict(self.assignments)

    def __str__(self) -> str:
        return ", ".join(f"{var} is {val}" for var, val in self.assignments)


@dataclass(frozen=True)
class ActionDef:
    name: str
    nominal: EffectSet
    duration: int = 0
    resources: tuple[str, ...] = ()
    preconditions: tuple[Literal, ...] = ()
    alternatives: tuple[EffectSet, ...] = ()

    @property
    def effects(self) -> tuple[EffectSet, ...]:
        return (self.nominal, *self.alternatives)


class Mode(str, enum.Enum):
    REQUIRE = "require"
    FORBID = "forbid"


@dataclass(frozen=True)
class ReactionRule:
    condition: Condition
    consequents: tuple[tuple[Mode, str], ...]


@dataclass(frozen=True)
class StateRule:
    antecedent: Condition
    consequent: Condition


@dataclass(frozen=True)
class GoalRule:
    when: Condition
    target: tuple[Literal, ...]


@dataclass(frozen=True)
class PlannerConfig:
    max_plan_length: int = 5


@dataclass(frozen=True)
class Specification:
    variables: tuple[VariableDecl, ...]
    actions: tuple[ActionDef, ...] = ()
    resources: tuple[str, ...] = ()
    reaction_rules: tuple[ReactionRule, ...] = ()
    state_rules: tuple[StateRule, ...] = ()
    goals: tuple[GoalRule, ...] = ()
    config: PlannerConfig = field(default_factory=PlannerConfig)

    @cached_property
    def variable_index(self) -> dict[str, int]:
        return {v.name: i for i, v in enumerate(self.variables)}

    @cached_property
    def action_map(self) -> dict[str, ActionDef]:
        return {a.name: a for a in self.actions}

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def action(self, name: str) -> ActionDef:
        return self.action_map[name]

    def state(self, values: Union[Mapping[str, str], tuple[str, ...], list]) -> "State":
        """Build a state from a variable->value mapping or a value tuple.

        Raises ``ValueError`` if the assignment is partial or out of domain.
        """
        if isinstance(values, Mapping):
            extra = set(values) - set(self.variable_index)
            if extra:
                raise ValueError(f"unknown variables: {sorted(extra)}")
            try:
                values = tuple(values[v.name] for v in self.variables)
            except KeyError as exc:
                raise ValueError(f"variable {exc.args[0]} not assigned") from None
        values = tuple(values)
        if len(values) != len(self.variables):
            raise ValueError(f"expected {len(self.variables)} values, got {len(values)}")
        for decl, val in zip(self.variables, values):
            if val not in decl.domain:
                raise ValueError(f"{val!r} is not a value of {decl.name}")
        return State(self.variable_index, values)


class State(Mapping[str, str]):
    """A total assignment of values to the specification's variables.

    Behaves as a read-only mapping keyed by variable name. Two states compare
    equal when their value tuples are equal; comparing states of different
    specifications is meaningless.
    """

    __slots__ = ("_index", "values", "_hash")

    def __init__(self, index: dict[str, int], values: tuple[str, ...]):
        self._index = index
        self.values = values
        self._hash = hash(values)

    def __getitem__(self, variable: str) -> str:
        return self.values[self._index[variable]]

    def __iter__(self) -> Iterator[str]:
        return iter(self._index)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, State):
            return self.values == other.values
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"State({', '.join(self.values)})"

    def __str__(self) -> str:
        return "(" + ", ".join(self.values) + ")"

    def replace(self, assignments: Mapping[str, str]) -> "State":
        values = list(self.values)
        for var, val in assignments.items():
            values[self._index[var]] = val
        return State(self._index, tuple(values))

    def describe(self) -> str:
        return ", ".join(f"{var} is {val}" for var, val in self.items())


# ---------------------------------------------------------------------------
# Plans and policies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Plan:
    steps: tuple[frozenset[str], ...]
    states: tuple[State, ...]  # start state followed by each nominal successor
    restoration_cost: int = 0

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def first_step(self) -> tuple[str, ...]:
        return tuple(sorted(self.steps[0])) if self.steps else ()

    @property
    def key(self) -> tuple[tuple[str, ...], ...]:
        return tuple(tuple(sorted(step)) for step in self.steps)


@dataclass(frozen=True)
class PolicyEntry:
    state: State
    actions: tuple[str, ...]


@dataclass(frozen=True)
class PolicyMeta:
    tool_version: str
    spec_digest: str


@dataclass(frozen=True)
class Policy:
    entries: tuple[PolicyEntry, ...]
    meta: PolicyMeta

    @cached_property
    def table(self) -> dict[State, tuple[str, ...]]:
        table: dict[State, tuple[str, ...]] = {}
        for entry in self.entries:
            table.setdefault(entry.state, entry.actions)
        return table

    def __getitem__(self, state: State) -> tuple[str, ...]:
        return self.table[state]

    def __len__(self) -> int:
        return len(self.entries)

    def with_entry(self, state: State, actions) -> "Policy":
        """Copy of the policy with the entry for ``state`` replaced."""
        entries = tuple(
            PolicyEntry(e.state, tuple(sorted(actions))) if e.state == state else e
            for e in self.entries
        )
        return Policy(entries, self.meta)

    def without_entry(self, state: State) -> "Policy":
        return Policy(tuple(e for e in self.entries if e.state != state), self.meta)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_specification(spec: Specification, origins: Optional[dict] = None) -> list[Diagnostic]:
    """Check every cross-reference and uniqueness constraint of ``spec``.

    ``origins`` optionally maps declaration keys such as ``("action", 2)`` to
    a ``(line, column)`` source location attached to the diagnostics.
    Diagnostics follow declaration order and, within a declaration, code order.
    """
    origins = origins or {}
    out: list[Diagnostic] = []

    def emit(key, found: list[tuple[str, str]]):
        loc = origins.get(key)
        for code, msg in sorted(found, key=lambda cm: cm[0]):
            out.append(error(code, msg, loc))

    domains: dict[str, tuple[str, ...]] = {}
    if not spec.variables:
        out.append(error("NO_VARIABLES", "specification declares no state variables"))
    for i, decl in enumerate(spec.variables):
        found = []
        if decl.name in domains:
            found.append(("DUPLICATE_VARIABLE", f"variable {decl.name} declared twice"))
        if not decl.domain:
            found.append(("EMPTY_DOMAIN", f"variable {decl.name} has no values"))
        seen = set()
        for val in decl.domain:
            if val in seen:
                found.append(("DUPLICATE_VALUE", f"value {val} repeated in {decl.name}"))
            seen.add(val)
        domains.setdefault(decl.name, decl.domain)
        emit(("variable", i), found)

    def check_literal(lit: Literal, found: list):
        if lit.variable not in domains:
            found.append(("UNDECLARED_VARIABLE", f"undeclared variable {lit.variable}"))
        elif lit.value not in domains[lit.variable]:
            found.append(("UNDECLARED_VALUE", f"{lit.value} is not a value of {lit.variable}"))

    def check_effect(eff: EffectSet, found: list, what: str):
        if not eff.assignments:
            found.append(("EMPTY_EFFECT", f"{what} assigns nothing"))
        seen = set()
        for var, val in eff.assignments:
            if var in seen:
                found.append(("DUPLICATE_ASSIGNMENT", f"{what} assigns {var} twice"))
            seen.add(var)
            check_literal(Literal(var, val), found)

    resources: set[str] = set()
    for i, res in enumerate(spec.resources):
        if res in resources:
            emit(("resource", i), [("DUPLICATE_RESOURCE", f"resource {res} declared twice")])
        resources.add(res)

    names: set[str] = set()
    for i, act in enumerate(spec.actions):
        found = []
        if act.name in names:
            found.append(("DUPLICATE_ACTION", f"action {act.name} declared twice"))
        names.add(act.name)
        if act.duration < 0:
            found.append(("NEGATIVE_DURATION", f"action {act.name} has negative duration"))
        for res in act.resources:
            if res not in spec.resources:
                found.append(("UNDECLARED_RESOURCE", f"action {act.name} uses undeclared resource {res}"))
        for lit in act.preconditions:
            check_literal(lit, found)
        check_effect(act.nominal, found, f"nominal effect of {act.name}")
        for eff in act.alternatives:
            check_effect(eff, found, f"alternative effect of {act.name}")
        emit(("action", i), found)

    for i, rule in enumerate(spec.reaction_rules):
        found = []
        for lit in literals(rule.condition):
            check_literal(lit, found)
        if not rule.consequents:
            found.append(("EMPTY_CONSEQUENT", "reaction rule has no consequents"))
        for _, name in rule.consequents:
            if name not in names:
                found.append(("UNDECLARED_ACTION", f"reaction rule names unknown action {name}"))
        emit(("reaction_rule", i), found)

    for i, rule in enumerate(spec.state_rules):
        found = []
        for lit in (*literals(rule.antecedent), *literals(rule.consequent)):
            check_literal(lit, found)
        emit(("state_rule", i), found)

    for i, goal in enumerate(spec.goals):
        found = []
        for lit in literals(goal.when):
            check_literal(lit, found)
        if not goal.target:
            found.append(("EMPTY_GOAL_TARGET", "goal has no target"))
        for lit in goal.target:
            check_literal(lit, found)
            if lit.negated:
                found.append(("NEGATED_GOAL_TARGET", f"goal target {lit} is negated"))
        emit(("goal", i), found)

    if spec.config.max_plan_length < 1:
        emit(("config", 0), [("BAD_PLAN_LENGTH", "max_plan_length must be positive")])
    return out
