"""Assembly of complete policies from per-state plans."""
from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .dsl import print_canonical
from .model import Plan, Policy, PolicyEntry, PolicyMeta, Specification, State
from .planner import Category, Infeasibility, Planner, planner_for
from .semantics import active_goal, enumerate_states, step_successor


def spec_digest(spec: Specification) -> str:
    return "sha256:" + hashlib.sha256(print_canonical(spec).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class UnrealizableReport:
    entries: tuple[Infeasibility, ...] = ()
    total_states: int = 0

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def counts(self) -> dict[str, int]:
        counts = Counter(e.category.value for e in self.entries)
        return {c.value: counts[c.value] for c in Category if counts[c.value]}

    def states(self, category: Optional[Category] = None) -> list[State]:
        return [e.state for e in self.entries if category is None or e.category is category]

    def to_dict(self, spec: Specification) -> dict:
        names = spec.variable_names
        return {
            "realizable": not self.entries,
            "total_states": self.total_states,
            "counts": self.counts,
            "states": [
                {**dict(zip(names, e.state.values)), "category": e.category.value, "detail": e.detail}
                for e in self.entries
            ],
        }

    def render(self) -> str:
        if not self.entries:
            return f"all {self.total_states} states admit a plan\n"
        lines = [f"{len(self.entries)} of {self.total_states} states admit no plan:"]
        lines += [f"  {e}" for e in self.entries]
        lines.append("summary: " + ", ".join(f"{k}={v}" for k, v in self.counts.items()))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ConvergenceFailure:
    start: State
    reason: str
    repeated: Optional[State] = None
    trajectory: tuple[tuple[State, tuple[str, ...]], ...] = field(default=())

    def __str__(self) -> str:
        path = " -> ".join(f"{s} {list(a)}" for s, a in self.trajectory)
        return f"from {self.start}: {self.reason}; trajectory: {path}"


class UnrealizableError(Exception):
    def __init__(self, report: UnrealizableReport):
        self.report = report
        super().__init__(f"{len(report)} states admit no plan")


class ConvergenceError(Exception):
    """The assembled policy does not reach its goals; indicates a planner bug."""

    def __init__(self, failures: list[ConvergenceFailure]):
        self.failures = failures
        super().__init__(f"{len(failures)} states do not converge:\n" + "\n".join(map(str, failures[:5])))


def explain(spec: Specification, planner: Optional[Planner] = None) -> UnrealizableReport:
    planner = planner or planner_for(spec)
    failures = []
    for state in planner.states:
        result = planner.find_plan(state)
        if isinstance(result, Infeasibility):
            failures.append(result)
    return UnrealizableReport(tuple(failures), len(planner.states))


def plan_all(spec: Specification) -> dict[State, Plan]:
    """Plans for every state; raises :class:`UnrealizableError` if any state has none."""
    planner = planner_for(spec)
    plans, failures = {}, []
    for state in planner.states:
        result = planner.find_plan(state)
        if isinstance(result, Infeasibility):
            failures.append(result)
        else:
            plans[state] = result
    if failures:
        raise UnrealizableError(UnrealizableReport(tuple(failures), len(planner.states)))
    return plans


def build_policy(spec: Specification) -> Policy:
    """Complete policy: the first step of every state's optimal plan.

    Raises :class:`UnrealizableError` when some state has no plan (no partial
    policy is ever produced) and :class:`ConvergenceError` when the nominal
    closed loop fails to reach a goal.
    """
    plans = plan_all(spec)
    entries = tuple(PolicyEntry(state, plan.first_step) for state, plan in plans.items())
    policy = Policy(entries, PolicyMeta(__version__, spec_digest(spec)))
    failures = check_convergence(spec, policy)
    if failures:
        raise ConvergenceError(failures)
    return policy


def check_convergence(spec: Specification, policy: Policy) -> list[ConvergenceFailure]:
    """Follow the nominal closed loop from each goal-active state.

    A state fails if its goal target is not reached before a state repeats,
    before ``len(states)`` transitions, or if the loop hits a missing entry
    or an unknown action.
    """
    states = enumerate_states(spec)
    limit = len(states)
    table = policy.table
    failures = []
    for start in states:
        goal = active_goal(start, spec.goals)
        if goal is None:
            continue
        current, seen, trajectory = start, set(), []
        failure = None
        for _ in range(limit + 1):
            if goal.satisfied(current):
                break
            if current in seen:
                failure = ConvergenceFailure(start, "state repeats before the target holds",
                                             current, tuple(trajectory))
                break
            seen.add(current)
            actions = table.get(current)
            if actions is None:
                failure = ConvergenceFailure(start, f"no policy entry for {current}", None, tuple(trajectory))
                break
            unknown = [a for a in actions if a not in spec.action_map]
            if unknown:
                failure = ConvergenceFailure(start, f"unknown action {unknown[0]}", None,
                                             tuple(trajectory) + ((current, actions),))
                break
            trajectory.append((current, actions))
            current = step_successor(current, actions, spec)
        else:
            failure = ConvergenceFailure(start, f"target not reached within {limit} transitions",
                                         None, tuple(trajectory))
        if failure is not None:
            failures.append(failure)
    return failures
