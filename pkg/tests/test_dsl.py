from __future__ import annotations

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as hs

from safeplan.dsl import SourceText, parse_specification, print_canonical
from safeplan.model import (
    ActionDef, EffectSet, GoalRule, Literal, Mode, PlannerConfig, ReactionRule,
    Specification, SpecificationError, StateRule, VariableDecl, all_of, any_of,
)


def diagnostics(text):
    with pytest.raises(SpecificationError) as info:
        parse_specification(text)
    return info.value.diagnostics


def test_amr_counts(amr):
    assert len(amr.variables) == 4
    assert [len(v.domain) for v in amr.variables] == [4, 2, 2, 2]
    assert amr.resources == ("MOTORS", "CONVEYOR")
    assert len(amr.actions) == 8
    assert amr.reaction_rules == ()
    assert len(amr.state_rules) == 1
    assert len(amr.goals) == 3
    assert amr.config.max_plan_length == 5


def test_stop_conveyor_block(amr):
    assert amr.action("stop_conveyor") == ActionDef(
        "stop_conveyor",
        nominal=EffectSet((("S_Conveyor", "off"),)),
        duration=1,
        resources=("CONVEYOR",),
        preconditions=(Literal("S_Conveyor", "on"),),
    )


def test_state_rule_parsed_as_disjunction(amr):
    rule = amr.state_rules[0]
    assert rule.antecedent == any_of(Literal("S_Location", "corridor"), Literal("S_Location", "charger"))
    assert rule.consequent == Literal("S_Conveyor", "off")


def test_unterminated_block_names_begin_line(amr_text):
    text = amr_text.replace("END ACTIONS\n", "")
    begin = amr_text.splitlines().index("BEGIN ACTIONS") + 1
    diags = diagnostics(text)
    assert diags[0].code == "UNTERMINATED_BLOCK"
    assert diags[0].location[0] == begin
    assert "ACTIONS" in diags[0].message and str(begin) in diags[0].message


def test_amr_round_trip(amr):
    printed = print_canonical(amr)
    assert parse_specification(printed) == amr
    assert print_canonical(parse_specification(printed)) == printed


def test_zero_duration_and_empty_lists_not_printed():
    text = print_canonical(Specification(
        variables=(VariableDecl("S_A", ("x", "y")),),
        actions=(ActionDef("go", EffectSet((("S_A", "y"),))),),
    ))
    assert "duration" not in text
    assert "controlled resources" not in text
    assert "preconditions" not in text
    assert "alternative effects" not in text
    assert "RULES" not in text


def test_default_duration_is_zero():
    spec = parse_specification(
        "BEGIN STATE VECTOR\nstate S_A can be x, y\nEND STATE VECTOR\n"
        "BEGIN RESOURCES\nEND RESOURCES\n"
        "BEGIN ACTIONS\naction go\nnominal effects: S_A is y\nEND ACTIONS\n"
        "BEGIN GOALS\nEND GOALS\nBEGIN CONFIG\nmax_plan_length: 2\nEND CONFIG\n")
    assert spec.action("go").duration == 0


def test_and_binds_tighter_than_or():
    spec = parse_specification(
        "BEGIN STATE VECTOR\nstate S_A can be x, y\nstate S_B can be x, y\nEND STATE VECTOR\n"
        "BEGIN RESOURCES\nEND RESOURCES\nBEGIN ACTIONS\nEND ACTIONS\n"
        "BEGIN STATE RULES\n"
        "rule: IF S_A is x OR S_B is x AND S_A is y THEN S_B is y\n"
        "rule: IF (S_A is x OR S_B is x) AND S_A is y THEN S_B is y\n"
        "END STATE RULES\n"
        "BEGIN GOALS\nEND GOALS\nBEGIN CONFIG\nmax_plan_length: 2\nEND CONFIG\n")
    a, b, c = Literal("S_A", "x"), Literal("S_B", "x"), Literal("S_A", "y")
    assert spec.state_rules[0].antecedent == any_of(a, all_of(b, c))
    assert spec.state_rules[1].antecedent == all_of(any_of(a, b), c)


def test_reaction_rules_span_lines():
    spec = parse_specification(
        "BEGIN STATE VECTOR\nstate S_A can be x, y\nEND STATE VECTOR\n"
        "BEGIN RESOURCES\nEND RESOURCES\n"
        "BEGIN ACTIONS\naction go\nnominal effects: S_A is y\naction stay\nnominal effects: S_A is x\nEND ACTIONS\n"
        "BEGIN REACTION RULES\n"
        "rule: IF S_A is x // comment\n"
        "  THEN executing go\n"
        "  AND NOT executing stay\n"
        "END REACTION RULES\n"
        "BEGIN GOALS\nEND GOALS\nBEGIN CONFIG\nmax_plan_length: 2\nEND CONFIG\n")
    assert spec.reaction_rules == (
        ReactionRule(Literal("S_A", "x"), ((Mode.REQUIRE, "go"), (Mode.FORBID, "stay"))),)


@pytest.mark.parametrize("mutate, code", [
    (lambda t: t.replace("max_plan_length: 5", "max_plan_length: five"), "BAD_INTEGER"),
    (lambda t: t.replace("duration: 50", "duration: 50\nduration: 2"), "DUPLICATE_ATTRIBUTE"),
    (lambda t: t.replace("goal type: priority\n", ""), "SYNTAX_ERROR"),
    (lambda t: t.replace("BEGIN CONFIG\nmax_plan_length: 5\nEND CONFIG\n", ""), "MISSING_SECTION"),
    (lambda t: t.replace("nominal effects: S_Battery is ok\n", ""), "MISSING_NOMINAL"),
    (lambda t: t.replace("state S_Load can be loaded, free", "state S_Load can be"), "SYNTAX_ERROR"),
    (lambda t: t.replace("duration: 3", "speed: 3", 1), "UNKNOWN_KEYWORD"),
])
def test_malformed_inputs(amr_text, mutate, code):
    assert code in [d.code for d in diagnostics(mutate(amr_text))]


def test_values_scoped_per_variable():
    spec = parse_specification(
        "BEGIN STATE VECTOR\nstate S_A can be on, off\nstate S_B can be on, off\nEND STATE VECTOR\n"
        "BEGIN RESOURCES\nEND RESOURCES\nBEGIN ACTIONS\nEND ACTIONS\n"
        "BEGIN GOALS\nEND GOALS\nBEGIN CONFIG\nmax_plan_length: 1\nEND CONFIG\n")
    assert [v.domain for v in spec.variables] == [("on", "off"), ("on", "off")]


# --- randomized specifications --------------------------------------------

NAMES = [f"S_{c}" for c in "ABC"]
VALUES = ["v0", "v1", "v2"]
ACTIONS = ["go", "stop", "turn", "wait"]
RESOURCES = ["R1", "R2"]


@hs.composite
def specifications(draw):
    nvars = draw(hs.integers(1, 3))
    variables = tuple(VariableDecl(NAMES[i], tuple(VALUES[:draw(hs.integers(1, 3))]))
                      for i in range(nvars))
    resources = tuple(RESOURCES[:draw(hs.integers(0, 2))])

    def literal(negated=True):
        v = draw(hs.sampled_from(variables))
        return Literal(v.name, draw(hs.sampled_from(v.domain)), negated and draw(hs.booleans()))

    def condition(depth=2):
        if depth == 0 or draw(hs.booleans()):
            return literal()
        kids = [condition(depth - 1) for _ in range(draw(hs.integers(2, 3)))]
        return (all_of if draw(hs.booleans()) else any_of)(*kids)

    def effect():
        chosen = draw(hs.lists(hs.sampled_from(variables), min_size=1, unique=True))
        return EffectSet(tuple((v.name, draw(hs.sampled_from(v.domain))) for v in chosen))

    names = ACTIONS[:draw(hs.integers(0, 4))]
    actions = tuple(
        ActionDef(name, effect(), draw(hs.integers(0, 60)),
                  tuple(draw(hs.lists(hs.sampled_from(resources), unique=True))) if resources else (),
                  tuple(literal() for _ in range(draw(hs.integers(0, 2)))),
                  tuple(effect() for _ in range(draw(hs.integers(0, 2)))))
        for name in names)
    reactions = tuple(
        ReactionRule(condition(), tuple((draw(hs.sampled_from(list(Mode))), draw(hs.sampled_from(names)))
                                        for _ in range(draw(hs.integers(1, 2)))))
        for _ in range(draw(hs.integers(0, 2)) if names else 0))
    rules = tuple(StateRule(condition(), condition()) for _ in range(draw(hs.integers(0, 2))))
    goals = tuple(GoalRule(condition(), tuple(literal(False) for _ in range(draw(hs.integers(1, 2)))))
                  for _ in range(draw(hs.integers(0, 3))))
    return Specification(variables, actions, resources, reactions, rules, goals,
                         PlannerConfig(draw(hs.integers(1, 9))))


@settings(max_examples=200, suppress_health_check=[HealthCheck.too_slow])
@given(specifications())
def test_round_trip_randomized(spec):
    printed = print_canonical(spec)
    assert parse_specification(printed) == spec


FRAGMENTS = [
    "BEGIN STATE VECTOR", "END STATE VECTOR", "BEGIN ACTIONS", "END ACTIONS", "BEGIN GOALS",
    "END GOALS", "BEGIN CONFIG", "END CONFIG", "BEGIN RESOURCES", "END RESOURCES",
    "BEGIN STATE RULES", "END STATE RULES", "state S_A can be x, y", "action go",
    "nominal effects: S_A is y", "duration: 4", "duration: -1", "rule: IF S_A is x THEN",
    "NOT S_A is y", "(S_A is x", "goal type: priority", "when S_A is x then goal: S_A is y",
    "max_plan_length: 3", "// c", "", "is", ",", ")", "resource R",
]


def _check_total(text):
    try:
        spec = parse_specification(SourceText(text, "fuzz"))
    except SpecificationError as exc:
        assert exc.diagnostics
        lines = text.splitlines()
        for d in exc.diagnostics:
            if d.location is None:
                assert not lines
                continue
            line, col = d.location
            assert 1 <= line <= max(len(lines), 1)
            assert 1 <= col <= max(len(lines[line - 1]) if lines else 0, 0) + 1
    else:
        assert isinstance(spec, Specification)


@settings(max_examples=300)
@given(hs.lists(hs.sampled_from(FRAGMENTS), max_size=25))
def test_parse_total_on_fragment_soup(lines):
    _check_total("\n".join(lines))


@settings(max_examples=300)
@given(hs.text(max_size=200))
def test_parse_total_on_arbitrary_text(text):
    _check_total(text)


@settings(max_examples=100)
@given(hs.data())
def test_parse_total_on_truncated_amr(amr_text, data):
    cut = data.draw(hs.integers(0, len(amr_text)))
    _check_total(amr_text[:cut])
