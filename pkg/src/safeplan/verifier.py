"""Brute-force checking of a policy against a specification.

The verifier relies on the model and transition semantics only; it never
calls the planner, so agreement between the two is meaningful. Checks:

V1  completeness: exactly one entry per state
V2  step feasibility of every nonempty entry
V3  every outcome of every entry action is safe
V4  unsafe states restore safety at minimal summed duration
V5  the nominal closed loop reaches each active goal
V6  unsafe states have a nonempty entry
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Optional

from .dsl import format_condition
from .model import Policy, Specification, State
from .policy import check_convergence
from .semantics import (
    apply_effects,
    check_step,
    enumerate_states,
    is_state_safe,
    preconditions_hold,
    step_duration,
    violated_rules,
)

DEFAULT_MAX_COUNTEREXAMPLES = 10

CHECKS = {
    "V1": "completeness",
    "V2": "step feasibility",
    "V3": "per-effect safety",
    "V4": "restoration optimality",
    "V5": "goal convergence",
    "V6": "unsafe-state action coverage",
}


@dataclass(frozen=True)
class Counterexample:
    state: State
    message: str
    details: dict = field(default_factory=dict, compare=False)

    def mentions(self, state: State) -> bool:
        return self.state == state or state in self.details.get("trajectory_states", ())


@dataclass
class CheckResult:
    check: str
    findings: int = 0
    counterexamples: list[Counterexample] = field(default_factory=list)

    @property
    def name(self) -> str:
        return CHECKS[self.check]

    @property
    def passed(self) -> bool:
        return self.findings == 0


@dataclass
class VerificationReport:
    results: dict[str, CheckResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def __getitem__(self, check: str) -> CheckResult:
        return self.results[check]

    def counterexamples(self) -> list[Counterexample]:
        return [c for r in self.results.values() for c in r.counterexamples]

    def summary(self) -> str:
        ok = sum(r.passed for r in self.results.values())
        return f"{ok}/{len(self.results)} checks passed"

    def render(self) -> str:
        lines = []
        for r in self.results.values():
            status = "PASS" if r.passed else f"FAIL ({r.findings} findings)"
            lines.append(f"{r.check} {r.name}: {status}")
            lines.extend(f"    {c.state}: {c.message}" for c in r.counterexamples)
        lines.append(self.summary())
        return "\n".join(lines) + "\n"

    def to_dict(self, spec: Specification) -> dict[str, Any]:
        names = spec.variable_names

        def ce(c: Counterexample) -> dict:
            extra = {k: v for k, v in c.details.items() if k != "trajectory_states"}
            return {"state": dict(zip(names, c.state.values)), "message": c.message, **extra}

        return {
            "passed": self.passed,
            "summary": self.summary(),
            "checks": {
                r.check: {"name": r.name, "passed": r.passed, "findings": r.findings,
                          "counterexamples": [ce(c) for c in r.counterexamples]}
                for r in self.results.values()
            },
        }


def min_restoration_cost(state: State, spec: Specification) -> Optional[int]:
    """Cheapest summed duration over every feasible nonempty step in an unsafe state.

    Plain subset enumeration over the actions whose preconditions hold;
    ``None`` when no step is feasible. Raises ``ValueError`` for safe states.
    """
    if is_state_safe(state, spec.state_rules):
        raise ValueError(f"{state} is safe; restoration cost is not defined")
    applicable = [a.name for a in spec.actions if preconditions_hold(a, state)]
    best = None
    for size in range(1, len(applicable) + 1):
        for subset in itertools.combinations(applicable, size):
            if check_step(subset, state, spec) is None:
                cost = step_duration(subset, spec)
                best = cost if best is None else min(best, cost)
    return best


def verify_policy(spec: Specification, policy: Policy,
                  max_counterexamples: int = DEFAULT_MAX_COUNTEREXAMPLES) -> VerificationReport:
    states = enumerate_states(spec)
    rules = spec.state_rules
    results = {check: CheckResult(check) for check in CHECKS}

    def found(check: str, state: State, message: str, **details):
        r = results[check]
        r.findings += 1
        if len(r.counterexamples) < max_counterexamples:
            r.counterexamples.append(Counterexample(state, message, details))

    # V1
    counts = Counter(e.state for e in policy.entries)
    for s in states:
        if counts[s] == 0:
            found("V1", s, "no policy entry")
        elif counts[s] > 1:
            found("V1", s, f"{counts[s]} policy entries")

    table = policy.table
    for s in states:
        if s not in table:
            continue
        actions = table[s]
        safe = is_state_safe(s, rules)
        known = [a for a in actions if a in spec.action_map]

        # V2
        if actions:
            reason = check_step(actions, s, spec)
            if reason is not None:
                found("V2", s, f"step {list(actions)} infeasible: {reason}", actions=list(actions), reason=reason)

        # V3
        for name in known:
            for idx, eff in enumerate(spec.action(name).effects):
                outcome = apply_effects(s, eff)
                broken = violated_rules(outcome, rules)
                if broken:
                    kind = "nominal" if idx == 0 else f"alternative {idx}"
                    text = "; ".join(
                        f"IF {format_condition(rules[i].antecedent)} THEN {format_condition(rules[i].consequent)}"
                        for i in broken)
                    found("V3", s, f"{name} {kind} effect ({eff}) leads to unsafe {outcome}, violating {text}",
                          action=name, effect_index=idx, effect=str(eff),
                          outcome=list(outcome.values), violated_rules=broken)

        if safe:
            continue
        # V6
        if not actions:
            found("V6", s, "unsafe state has no actions")
        # V4
        best = min_restoration_cost(s, spec)
        cost = step_duration(known, spec)
        if best is None:
            found("V4", s, "no feasible step can restore safety", cost=cost, minimum=None)
        elif len(known) != len(actions) or cost != best:
            found("V4", s, f"restoration costs {cost}, minimum is {best}", cost=cost, minimum=best)

    # V5
    for failure in check_convergence(spec, policy):
        found("V5", failure.start, failure.reason,
              repeated=list(failure.repeated.values) if failure.repeated else None,
              trajectory=[{"state": list(st.values), "actions": list(a)} for st, a in failure.trajectory],
              trajectory_states=tuple(st for st, _ in failure.trajectory))
    return VerificationReport(results)
