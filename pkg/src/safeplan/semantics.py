"""Transition system of a specification.

Everything here is a pure function of its arguments. Safety of an action is
judged one action at a time against the current state: every outcome the
action may produce (nominal or alternative) must satisfy all state rules,
because any one of several concurrent actions may effectuate first.
"""
from __future__ import annotations

import itertools
from collections.abc import Collection, Iterable, Sequence
from dataclasses import dataclass
from typing import Optional

from .model import (
    ActionDef,
    Condition,
    Diagnostic,
    EffectSet,
    GoalRule,
    Literal,
    Mode,
    ReactionRule,
    Specification,
    State,
    StateRule,
    error,
)


def enumerate_states(spec: Specification) -> list[State]:
    """All states in canonical order (last variable varies fastest)."""
    index = spec.variable_index
    return [State(index, values) for values in itertools.product(*(v.domain for v in spec.variables))]


def state_sort_key(spec: Specification):
    positions = [{val: i for i, val in enumerate(v.domain)} for v in spec.variables]

    def key(state: State) -> tuple[int, ...]:
        return tuple(pos[val] for pos, val in zip(positions, state.values))

    return key


def eval_condition(cond: Condition, state: State) -> bool:
    return cond.holds(state)


def apply_effects(state: State, effect: EffectSet) -> State:
    return state.replace(effect.as_dict())


def violated_rules(state: State, rules: Sequence[StateRule]) -> list[int]:
    return [i for i, rule in enumerate(rules)
            if rule.antecedent.holds(state) and not rule.consequent.holds(state)]


def is_state_safe(state: State, rules: Sequence[StateRule]) -> bool:
    return all(not r.antecedent.holds(state) or r.consequent.holds(state) for r in rules)


def possible_effects(action: ActionDef) -> list[EffectSet]:
    """Nominal effect first, then the alternatives in declaration order."""
    return [action.nominal, *action.alternatives]


def preconditions_hold(action: ActionDef, state: State) -> bool:
    return all(lit.holds(state) for lit in action.preconditions)


def is_action_allowed(action: ActionDef, state: State, spec: Specification) -> bool:
    rules = spec.state_rules
    return all(is_state_safe(apply_effects(state, eff), rules) for eff in possible_effects(action))


@dataclass(frozen=True)
class GoalTarget:
    rank: int
    rule: GoalRule

    @property
    def target(self) -> tuple[Literal, ...]:
        return self.rule.target

    def satisfied(self, state: State) -> bool:
        return all(lit.holds(state) for lit in self.rule.target)


def active_goal(state: State, goals: Sequence[GoalRule]) -> Optional[GoalTarget]:
    """Highest-priority goal (earliest declared) whose condition holds."""
    for rank, goal in enumerate(goals):
        if goal.when.holds(state):
            return GoalTarget(rank, goal)
    return None


def target_satisfied(goal: Optional[GoalTarget], state: State) -> bool:
    return goal is None or goal.satisfied(state)


@dataclass(frozen=True)
class Obligations:
    required: frozenset[str]
    forbidden: frozenset[str]

    @property
    def conflict(self) -> frozenset[str]:
        return self.required & self.forbidden

    def diagnostic(self, state: State) -> Optional[Diagnostic]:
        if not self.conflict:
            return None
        names = ", ".join(sorted(self.conflict))
        return error("OBLIGATION_CONFLICT",
                     f"reaction rules both require and forbid {names} in {state}", state=state)


def reaction_obligations(state: State, rules: Iterable[ReactionRule]) -> Obligations:
    required: set[str] = set()
    forbidden: set[str] = set()
    for rule in rules:
        if rule.condition.holds(state):
            for mode, name in rule.consequents:
                (required if mode is Mode.REQUIRE else forbidden).add(name)
    return Obligations(frozenset(required), frozenset(forbidden))


# step feasibility reason codes, in clause order
EMPTY_STEP = "EMPTY_STEP"
UNKNOWN_ACTION = "UNKNOWN_ACTION"
PRECONDITION = "PRECONDITION"
RESOURCE_CONFLICT = "RESOURCE_CONFLICT"
WRITE_CONFLICT = "WRITE_CONFLICT"
NOT_ALLOWED = "NOT_ALLOWED"
OBLIGATION = "OBLIGATION"


def check_step(actions: Collection[str], state: State, spec: Specification,
               obligations: Optional[Obligations] = None) -> Optional[str]:
    """Return the reason code of the first violated feasibility clause, or None."""
    if not actions:
        return EMPTY_STEP
    try:
        defs = [spec.action(name) for name in sorted(actions)]
    except KeyError:
        return UNKNOWN_ACTION
    if not all(preconditions_hold(a, state) for a in defs):
        return PRECONDITION
    used: set[str] = set()
    for a in defs:
        if used.intersection(a.resources):
            return RESOURCE_CONFLICT
        used.update(a.resources)
    written: dict[str, str] = {}
    for a in defs:
        for var, val in a.nominal.assignments:
            if written.setdefault(var, val) != val:
                return WRITE_CONFLICT
    if not all(is_action_allowed(a, state, spec) for a in defs):
        return NOT_ALLOWED
    if obligations is None:
        obligations = reaction_obligations(state, spec.reaction_rules)
    names = set(actions)
    if not obligations.required <= names or names & obligations.forbidden:
        return OBLIGATION
    return None


def step_feasible(actions: Collection[str], state: State, spec: Specification) -> bool:
    return check_step(actions, state, spec) is None


def step_successor(state: State, actions: Iterable[str], spec: Specification) -> State:
    """Nominal successor: the union of the step's nominal assignments."""
    merged: dict[str, str] = {}
    for name in actions:
        merged.update(spec.action(name).nominal.assignments)
    return state.replace(merged) if merged else state


def step_duration(actions: Iterable[str], spec: Specification) -> int:
    return sum(spec.action(name).duration for name in actions)
