"""Seeded stochastic closed-loop execution of a policy.

Each tick one action of the commanded entry effectuates: it is picked
uniformly, then either stalls (no effect), produces its nominal effect, or
produces one of its alternatives uniformly. The policy is consulted again
after every effectuation. Run ``i`` draws from its own
``random.Random(f"{seed}/{i}")`` stream, so runs are independent and the whole
report is a function of the inputs.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import mean
from typing import Any, Optional

from .model import Policy, Specification, State
from .semantics import active_goal, apply_effects, enumerate_states, is_state_safe

RNG_ID = "python-random-mt19937:str-seed='{seed}/{run}'"


@dataclass(frozen=True)
class SimParams:
    seed: int = 0
    max_ticks: int = 50
    p_nominal: Fraction = Fraction(1)
    p_stall: Fraction = Fraction(0)
    runs: int = 1
    start: Optional[State] = None

    def __post_init__(self):
        for name in ("p_nominal", "p_stall"):
            value = Fraction(getattr(self, name))
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
            object.__setattr__(self, name, value)
        if self.max_ticks < 1 or self.runs < 1:
            raise ValueError("max_ticks and runs must be positive")


@dataclass(frozen=True)
class Transition:
    tick: int
    state: State
    commanded: tuple[str, ...]
    action: str
    effect_index: Optional[int]  # None for a stall, 0 nominal, k alternative k
    next_state: State
    safe: bool


@dataclass
class RunTrace:
    run: int
    start: State
    transitions: list[Transition] = field(default_factory=list)
    goal_ticks: list[int] = field(default_factory=list)
    violations: int = 0
    idle: bool = False

    @property
    def first_goal_tick(self) -> Optional[int]:
        return self.goal_ticks[0] if self.goal_ticks else None


@dataclass
class TraceReport:
    params: SimParams
    runs: list[RunTrace]
    rng: str = RNG_ID

    @property
    def violations(self) -> int:
        return sum(r.violations for r in self.runs)

    @property
    def goal_achievements(self) -> int:
        return sum(len(r.goal_ticks) for r in self.runs)

    def statistics(self) -> dict[str, Any]:
        firsts = [r.first_goal_tick for r in self.runs if r.first_goal_tick is not None]
        return {
            "runs": len(self.runs),
            "ticks": sum(len(r.transitions) for r in self.runs),
            "safety_violations": self.violations,
            "goal_achievements": self.goal_achievements,
            "runs_reaching_goal": len(firsts),
            "mean_ticks_to_first_goal": float(mean(firsts)) if firsts else None,
            "idle_terminations": sum(r.idle for r in self.runs),
            "stalls": sum(t.effect_index is None for r in self.runs for t in r.transitions),
            "alternative_effects": sum(bool(t.effect_index) for r in self.runs for t in r.transitions),
        }

    def to_dict(self, spec: Specification) -> dict[str, Any]:
        names = spec.variable_names
        p = self.params

        def st(s: State) -> dict:
            return dict(zip(names, s.values))

        return {
            "params": {"seed": p.seed, "max_ticks": p.max_ticks, "p_nominal": str(p.p_nominal),
                       "p_stall": str(p.p_stall), "runs": p.runs,
                       "start": st(p.start) if p.start is not None else None},
            "rng": self.rng,
            "statistics": self.statistics(),
            "runs": [
                {
                    "run": r.run,
                    "start": st(r.start),
                    "first_goal_tick": r.first_goal_tick,
                    "goal_ticks": r.goal_ticks,
                    "violations": r.violations,
                    "idle": r.idle,
                    "trajectory": [
                        {"tick": t.tick, "state": st(t.state), "commanded": list(t.commanded),
                         "action": t.action, "effect_index": t.effect_index,
                         "next_state": st(t.next_state), "safe": t.safe}
                        for t in r.transitions
                    ],
                }
                for r in self.runs
            ],
        }

    def render(self) -> str:
        lines = [f"{k}: {v}" for k, v in self.statistics().items()]
        if len(self.runs) == 1:
            for t in self.runs[0].transitions:
                outcome = "stall" if t.effect_index is None else (
                    "nominal" if t.effect_index == 0 else f"alternative {t.effect_index}")
                flag = "" if t.safe else "  UNSAFE"
                lines.append(f"  tick {t.tick}: {t.state} {list(t.commanded)} -> {t.action} ({outcome}) "
                             f"-> {t.next_state}{flag}")
        return "\n".join(lines) + "\n"


def _pending_goal(state: State, spec: Specification):
    """Active goal of ``state`` unless it is absent or already satisfied."""
    goal = active_goal(state, spec.goals)
    return None if goal is None or goal.satisfied(state) else goal


def simulate(spec: Specification, policy: Policy, params: SimParams) -> TraceReport:
    states = enumerate_states(spec)
    table = policy.table
    missing = [s for s in states if s not in table]
    if missing:
        raise ValueError(f"policy is not total: {len(missing)} states lack an entry, e.g. {missing[0]}")
    rules = spec.state_rules
    p_stall, p_nominal = float(params.p_stall), float(params.p_nominal)

    runs = []
    for run in range(params.runs):
        rng = random.Random(f"{params.seed}/{run}")
        state = params.start if params.start is not None else rng.choice(states)
        trace = RunTrace(run, state)
        goal = _pending_goal(state, spec)
        for tick in range(1, params.max_ticks + 1):
            commanded = table[state]
            if not commanded:
                trace.idle = True
                break
            name = rng.choice(sorted(commanded))
            action = spec.action(name)
            if rng.random() < p_stall:
                index, nxt = None, state
            else:
                if not action.alternatives or rng.random() < p_nominal:
                    index = 0
                else:
                    index = 1 + rng.randrange(len(action.alternatives))
                nxt = apply_effects(state, action.effects[index])
            safe = is_state_safe(nxt, rules)
            # a stall produces no outcome, so it cannot violate safety
            trace.violations += index is not None and not safe
            trace.transitions.append(Transition(tick, state, tuple(commanded), name, index, nxt, safe))
            state = nxt
            if goal is not None and goal.satisfied(state):
                trace.goal_ticks.append(tick)
                goal = None
            if goal is None:
                goal = _pending_goal(state, spec)
        runs.append(trace)
    return TraceReport(params, runs)
