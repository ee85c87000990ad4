from __future__ import annotations

import pytest

from safeplan.model import (
    ActionDef, And, EffectSet, GoalRule, Literal, Or, PlannerConfig, Specification,
    VariableDecl, all_of, any_of, validate_specification,
)

from conftest import st


def tiny(**overrides) -> Specification:
    fields = dict(
        variables=(VariableDecl("S_Location", ("corridor", "charger")),
                   VariableDecl("S_Battery", ("low", "ok"))),
        resources=("MOTORS",),
        actions=(ActionDef("charge", EffectSet((("S_Battery", "ok"),)), 50, ("MOTORS",),
                           (Literal("S_Location", "charger"),)),),
        goals=(GoalRule(Literal("S_Battery", "low"), (Literal("S_Battery", "ok"),)),),
    )
    fields.update(overrides)
    return Specification(**fields)


def codes(spec):
    return [d.code for d in validate_specification(spec)]


def test_amr_spec_is_clean(amr):
    assert validate_specification(amr) == []


def test_undeclared_value_in_precondition():
    act = ActionDef("charge", EffectSet((("S_Battery", "ok"),)), 50, ("MOTORS",),
                    (Literal("S_Location", "lobby"),))
    assert codes(tiny(actions=(act,))) == ["UNDECLARED_VALUE"]


def test_duplicate_action_name():
    spec = tiny()
    assert codes(tiny(actions=spec.actions * 2)) == ["DUPLICATE_ACTION"]


@pytest.mark.parametrize("overrides, expected", [
    ({"resources": ("MOTORS", "MOTORS")}, ["DUPLICATE_RESOURCE"]),
    ({"config": PlannerConfig(0)}, ["BAD_PLAN_LENGTH"]),
    ({"goals": (GoalRule(Literal("S_Battery", "low"), ()),)}, ["EMPTY_GOAL_TARGET"]),
    ({"goals": (GoalRule(Literal("S_Battery", "low"), (Literal("S_Battery", "ok", True),)),)},
     ["NEGATED_GOAL_TARGET"]),
    ({"goals": (GoalRule(Literal("S_Speed", "low"), (Literal("S_Battery", "ok"),)),)},
     ["UNDECLARED_VARIABLE"]),
])
def test_invariant_violations(overrides, expected):
    assert codes(tiny(**overrides)) == expected


def test_missing_variables_reported_first():
    assert codes(tiny(variables=()))[0] == "NO_VARIABLES"


def test_action_level_violations_are_ordered_by_code():
    act = ActionDef("charge", EffectSet((("S_Battery", "ok"), ("S_Battery", "low"))), -1, ("WHEELS",))
    assert codes(tiny(actions=(act,))) == [
        "DUPLICATE_ASSIGNMENT", "NEGATIVE_DURATION", "UNDECLARED_RESOURCE"]


def test_validation_is_deterministic():
    act = ActionDef("x", EffectSet(()), -3, ("A", "B"), (Literal("Q", "q"),))
    spec = tiny(actions=(act, act), resources=("R", "R"))
    first = validate_specification(spec)
    assert first and first == validate_specification(spec)


def test_clean_spec_satisfies_type_invariants(amr):
    names = [v.name for v in amr.variables]
    assert len(names) == len(set(names))
    for v in amr.variables:
        assert v.domain and len(v.domain) == len(set(v.domain))
    for a in amr.actions:
        assert a.duration >= 0 and set(a.resources) <= set(amr.resources)
        for eff in a.effects:
            vars_ = [var for var, _ in eff.assignments]
            assert vars_ and len(vars_) == len(set(vars_))
    for g in amr.goals:
        assert g.target and not any(lit.negated for lit in g.target)


def test_state_construction(amr):
    s = st(amr, "corridor", "ok", "free", "off")
    assert s == amr.state({"S_Location": "corridor", "S_Battery": "ok", "S_Load": "free",
                           "S_Conveyor": "off"})
    assert s["S_Battery"] == "ok" and str(s) == "(corridor, ok, free, off)"
    assert s.replace({"S_Load": "loaded"}).values == ("corridor", "ok", "loaded", "off")
    with pytest.raises(ValueError):
        amr.state({"S_Location": "corridor"})
    with pytest.raises(ValueError):
        amr.state(("lobby", "ok", "free", "off"))


def test_condition_normal_form():
    a, b, c = (Literal("X", v) for v in "abc")
    assert all_of(a) is a
    assert all_of(And((a, b)), c) == And((a, b, c))
    assert any_of(a, Or((b, c))) == Or((a, b, c))
    with pytest.raises(ValueError):
        all_of()
