"""Per-state bounded optimal planning.

For a start state ``s`` the planner looks for a sequence of concurrent steps
towards the target of the goal active in ``s``. Plans are compared on
``(restoration_cost, length, tiebreak)``: restoration cost is the summed
duration of the first step when ``s`` is unsafe (zero otherwise), and the
tiebreak is the sequence of sorted action-name tuples, which makes the optimum
unique.

Implementation: all feasible steps of every state are computed once per
specification. Because only the first step carries a cost, the optimal suffix
from the second state on is a shortest path over safe states, obtained by a
backward breadth-first search from the target states. The lexicographically
smallest shortest suffix is then read off greedily.
"""
from __future__ import annotations

import enum
import functools
import itertools
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

from .model import Plan, Specification, State
from .semantics import (
    GoalTarget,
    active_goal,
    check_step,
    enumerate_states,
    is_action_allowed,
    is_state_safe,
    preconditions_hold,
    reaction_obligations,
    step_duration,
    step_successor,
    target_satisfied,
)

StepNames = tuple[str, ...]


class Category(str, enum.Enum):
    NO_SAFE_STEP = "NO_SAFE_STEP"
    SAFETY_NOT_RESTORABLE = "SAFETY_NOT_RESTORABLE"
    GOAL_UNREACHABLE = "GOAL_UNREACHABLE"
    OBLIGATION_CONFLICT = "OBLIGATION_CONFLICT"


@dataclass(frozen=True)
class Infeasibility:
    state: State
    category: Category
    detail: str

    def __str__(self) -> str:
        return f"{self.state}: {self.category.value}: {self.detail}"


class PlanObjective(NamedTuple):
    restoration_cost: int
    length: int
    tiebreak: tuple[StepNames, ...]


def plan_objective(plan: Plan) -> PlanObjective:
    return PlanObjective(plan.restoration_cost, len(plan), plan.key)


def enumerate_feasible_steps(state: State, spec: Specification, allow_idle: bool = False) -> list[StepNames]:
    """All nonempty feasible action sets in ``state``.

    Ordered by (summed duration, cardinality, names). The empty step is
    appended when ``allow_idle`` is set, the state is safe and no reaction
    rule requires an action.
    """
    obligations = reaction_obligations(state, spec.reaction_rules)
    candidates = [
        a for a in spec.actions
        if a.name not in obligations.forbidden
        and preconditions_hold(a, state)
        and is_action_allowed(a, state, spec)
    ]
    candidates.sort(key=lambda a: a.name)
    found: list[StepNames] = []

    def extend(start: int, chosen: list[str], used: frozenset, written: dict):
        for i in range(start, len(candidates)):
            act = candidates[i]
            if used.intersection(act.resources):
                continue
            if any(written.get(var, val) != val for var, val in act.nominal.assignments):
                continue
            chosen.append(act.name)
            names = tuple(chosen)
            if obligations.required <= set(names):
                found.append(names)
            extend(i + 1, chosen, used.union(act.resources), {**written, **dict(act.nominal.assignments)})
            chosen.pop()

    extend(0, [], frozenset(), {})
    found.sort(key=lambda names: (step_duration(names, spec), len(names), names))
    if allow_idle and not obligations.required and is_state_safe(state, spec.state_rules):
        found.append(())
    return found


class Planner:
    """Plans for every state of one specification, sharing the step graph."""

    def __init__(self, spec: Specification):
        self.spec = spec
        self.states = enumerate_states(spec)
        self.horizon = spec.config.max_plan_length
        self._safe: dict[State, bool] = {s: is_state_safe(s, spec.state_rules) for s in self.states}
        self._feasible: dict[State, list[StepNames]] = {}
        self._edges: dict[State, list[tuple[StepNames, State]]] = {}
        self._reverse: Optional[dict[State, list[State]]] = None
        self._dist: dict[Optional[int], dict[State, int]] = {}

    def is_safe(self, state: State) -> bool:
        return self._safe[state]

    def feasible_steps(self, state: State) -> list[StepNames]:
        if state not in self._feasible:
            self._feasible[state] = enumerate_feasible_steps(state, self.spec)
        return self._feasible[state]

    def edges(self, state: State) -> list[tuple[StepNames, State]]:
        """Feasible steps whose nominal successor is safe, in step order."""
        if state not in self._edges:
            out = []
            for names in self.feasible_steps(state):
                succ = step_successor(state, names, self.spec)
                if self._safe[succ]:
                    out.append((names, succ))
            self._edges[state] = out
        return self._edges[state]

    def _reverse_graph(self) -> dict[State, list[State]]:
        if self._reverse is None:
            reverse: dict[State, list[State]] = {s: [] for s in self.states}
            for s in self.states:
                if self._safe[s]:
                    for _, succ in self.edges(s):
                        reverse[succ].append(s)
            self._reverse = reverse
        return self._reverse

    def distances(self, goal: Optional[GoalTarget]) -> dict[State, int]:
        """Shortest remaining length from safe states to the goal target.

        Only states within ``horizon - 1`` steps are present: a suffix always
        follows a first step.
        """
        rank = None if goal is None else goal.rank
        if rank in self._dist:
            return self._dist[rank]
        reverse = self._reverse_graph()
        dist = {s: 0 for s in self.states if self._safe[s] and target_satisfied(goal, s)}
        queue = deque(dist)
        while queue:
            s = queue.popleft()
            if dist[s] >= self.horizon - 1:
                continue
            for pred in reverse[s]:
                if pred not in dist:
                    dist[pred] = dist[s] + 1
                    queue.append(pred)
        self._dist[rank] = dist
        return dist

    def find_plan(self, state: State) -> Union[Plan, Infeasibility]:
        spec = self.spec
        goal = active_goal(state, spec.goals)
        obligations = reaction_obligations(state, spec.reaction_rules)
        if obligations.conflict:
            names = ", ".join(sorted(obligations.conflict))
            return Infeasibility(state, Category.OBLIGATION_CONFLICT,
                                 f"reaction rules both require and forbid {names}")
        safe = self._safe[state]
        if safe and target_satisfied(goal, state) and not obligations.required:
            return Plan((), (state,), 0)

        dist = self.distances(goal)
        best = None
        for names, succ in self.edges(state):
            remaining = dist.get(succ)
            if remaining is None:
                continue
            cost = 0 if safe else step_duration(names, spec)
            key = (cost, 1 + remaining, names)
            if best is None or key < best[0]:
                best = (key, names, succ)
        if best is None:
            return self._diagnose(state, goal, safe)

        (cost, _, _), names, succ = best
        steps, states = [frozenset(names)], [state, succ]
        current = succ
        while dist[current] > 0:
            want = dist[current] - 1
            names, current = min(
                ((n, t) for n, t in self.edges(current) if dist.get(t) == want),
                key=lambda nt: nt[0],
            )
            steps.append(frozenset(names))
            states.append(current)
        return Plan(tuple(steps), tuple(states), cost)

    def _diagnose(self, state: State, goal: Optional[GoalTarget], safe: bool) -> Infeasibility:
        target = "no goal" if goal is None else ", ".join(map(str, goal.target))
        if not self.edges(state):
            if not safe:
                return Infeasibility(state, Category.SAFETY_NOT_RESTORABLE,
                                     "state violates a state rule and no feasible step makes every outcome safe")
            if any(preconditions_hold(a, state) for a in self.spec.actions):
                return Infeasibility(state, Category.NO_SAFE_STEP,
                                     f"no applicable action is safe for target {target}")
        return Infeasibility(state, Category.GOAL_UNREACHABLE,
                             f"target {target} not reachable within {self.horizon} steps")

    def plan_all(self) -> dict[State, Union[Plan, Infeasibility]]:
        return {s: self.find_plan(s) for s in self.states}


@functools.lru_cache(maxsize=16)
def planner_for(spec: Specification) -> Planner:
    return Planner(spec)


def find_plan(state: State, spec: Specification) -> Union[Plan, Infeasibility]:
    return planner_for(spec).find_plan(state)


# ---------------------------------------------------------------------------
# Independent oracle
# ---------------------------------------------------------------------------


def _oracle_successors(state: State, spec: Specification, cache: dict) -> list[tuple[int, State]]:
    if state in cache:
        return cache[state]
    applicable = [a.name for a in spec.actions if preconditions_hold(a, state)]
    out = []
    for size in range(1, len(applicable) + 1):
        for subset in itertools.combinations(applicable, size):
            if check_step(subset, state, spec) is not None:
                continue
            succ = step_successor(state, subset, spec)
            if is_state_safe(succ, spec.state_rules):
                out.append((step_duration(subset, spec), succ))
    cache[state] = out
    return out


def plan_length_oracle(state: State, spec: Specification, cache: Optional[dict] = None) -> Optional[int]:
    """Optimal plan length by forward breadth-first search over action subsets.

    Shares no code with :class:`Planner`. From an unsafe state the cheapest
    first steps that still lead to the target are tried first, mirroring the
    lexicographic objective. ``cache`` may be shared between calls on the
    same specification to memoise successor sets.
    """
    cache = {} if cache is None else cache
    goal = active_goal(state, spec.goals)
    obligations = reaction_obligations(state, spec.reaction_rules)
    if obligations.conflict:
        return None
    safe = is_state_safe(state, spec.state_rules)
    if safe and target_satisfied(goal, state) and not obligations.required:
        return 0
    horizon = spec.config.max_plan_length

    def bfs(frontier: set[State]) -> Optional[int]:
        depth, seen = 1, set(frontier)
        while frontier:
            if any(target_satisfied(goal, s) for s in frontier):
                return depth
            if depth == horizon:
                return None
            nxt = set()
            for s in frontier:
                for _, t in _oracle_successors(s, spec, cache):
                    if t not in seen:
                        seen.add(t)
                        nxt.add(t)
            frontier, depth = nxt, depth + 1
        return None

    first = _oracle_successors(state, spec, cache)
    if safe:
        return bfs({t for _, t in first})
    for cost in sorted({c for c, _ in first}):
        found = bfs({t for c, t in first if c == cost})
        if found is not None:
            return found
    return None
