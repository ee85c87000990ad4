"""Reader and canonical writer for the ``.tmt`` behaviour specification language.

The format is line oriented and organised in ``BEGIN <SECTION>`` /
``END <SECTION>`` blocks. ``//`` starts a comment running to the end of the
line. Conditions use ``AND``/``OR`` with parentheses, ``AND`` binding tighter,
and ``NOT`` applying to single literals only.
"""
from __future__ import annotations

import re
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
    Or,
    And,
    PlannerConfig,
    ReactionRule,
    Specification,
    SpecificationError,
    StateRule,
    VariableDecl,
    all_of,
    any_of,
    error,
    validate_specification,
)

SECTIONS = (
    "STATE VECTOR",
    "RESOURCES",
    "ACTIONS",
    "REACTION RULES",
    "STATE RULES",
    "GOALS",
    "CONFIG",
)
OPTIONAL_SECTIONS = {"REACTION RULES", "STATE RULES"}
RESERVED = {"IF", "THEN", "AND", "OR", "NOT", "is", "executing", "when", "then"}

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(\d+)|([(),:])|(\S))")

_ACTION_KEYS = (
    ("duration", "duration:"),
    ("resources", "controlled resources:"),
    ("preconditions", "preconditions:"),
    ("nominal", "nominal effects:"),
    ("alternative", "alternative effects:"),
)


@dataclass
class SourceText:
    """Raw specification text plus its line index."""

    text: str
    name: str = "<string>"

    def __post_init__(self):
        self.lines = self.text.splitlines()


class _Syntax(Exception):
    def __init__(self, message: str, column: int, code: str = "SYNTAX_ERROR"):
        super().__init__(message)
        self.column = column
        self.code = code


@dataclass
class _Tok:
    text: str
    line: int
    col: int  # 1-based
    kind: str  # ident, int, punct, other


def _tokenize(text: str, line: int, offset: int = 0) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        kind = "ident" if m.group(1) else "int" if m.group(2) else "punct" if m.group(3) else "other"
        start = m.start(m.lastindex)
        toks.append(_Tok(m.group(m.lastindex), line, offset + start + 1, kind))
        pos = m.end()
    return toks


class _Cursor:
    """Recursive-descent helper over the tokens of one logical statement."""

    def __init__(self, toks: list[_Tok], end_col: int):
        self.toks = toks
        self.i = 0
        self.end_col = end_col

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def _col(self) -> int:
        tok = self.peek()
        return tok.col if tok else self.end_col

    def expect(self, text: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.text != text:
            found = repr(tok.text) if tok else "end of statement"
            raise _Syntax(f"expected {text!r}, found {found}", self._col())
        self.i += 1
        return tok

    def ident(self, what: str) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "ident" or tok.text in RESERVED:
            found = repr(tok.text) if tok else "end of statement"
            raise _Syntax(f"expected {what}, found {found}", self._col())
        self.i += 1
        return tok.text

    def done(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise _Syntax(f"unexpected {tok.text!r}", tok.col)

    # grammar -------------------------------------------------------------

    def literal(self) -> Literal:
        negated = False
        if self.at("NOT"):
            self.i += 1
            negated = True
        var = self.ident("variable name")
        self.expect("is")
        val = self.ident("value name")
        return Literal(var, val, negated)

    def assignment(self) -> Literal:
        if self.at("NOT"):
            raise _Syntax("NOT is not allowed here", self._col())
        return self.literal()

    def comma_list(self, item):
        items = [item()]
        while self.at(","):
            self.i += 1
            items.append(item())
        return items

    def condition(self) -> Condition:
        terms = [self._conjunction()]
        while self.at("OR"):
            self.i += 1
            terms.append(self._conjunction())
        return any_of(*terms)

    def _conjunction(self) -> Condition:
        factors = [self._atom()]
        while self.at("AND"):
            self.i += 1
            factors.append(self._atom())
        return all_of(*factors)

    def _atom(self) -> Condition:
        if self.at("("):
            self.i += 1
            inner = self.condition()
            self.expect(")")
            return inner
        return self.literal()


def _strip_comment(line: str) -> str:
    idx = line.find("//")
    return line if idx < 0 else line[:idx]


def _parse_int(raw: str, line: int, col: int, what: str) -> int:
    text = raw.strip()
    if not re.fullmatch(r"\d+", text):
        raise _Syntax(f"{what} must be a non-negative integer, found {text!r}", col, "BAD_INTEGER")
    return int(text)


class _Parser:
    def __init__(self, source: SourceText):
        self.source = source
        self.diags: list[Diagnostic] = []
        self.origins: dict = {}
        self.variables: list[VariableDecl] = []
        self.resources: list[str] = []
        self.actions: list[ActionDef] = []
        self.reaction_rules: list[ReactionRule] = []
        self.state_rules: list[StateRule] = []
        self.goals: list[GoalRule] = []
        self.max_plan_length: Optional[int] = None
        self.seen_sections: list[str] = []

    def report(self, code: str, message: str, line: int, col: int = 1) -> None:
        lines = self.source.lines
        if not lines:
            self.diags.append(error(code, message))
            return
        line = min(max(line, 1), len(lines))
        col = min(max(col, 1), max(len(lines[line - 1]), 1))
        self.diags.append(error(code, message, (line, col)))

    # block structure ---------------------------------------------------------

    def run(self) -> None:
        current: Optional[str] = None
        begin_line = 0
        body: list[tuple[int, str]] = []
        for lineno, raw in enumerate(self.source.lines, start=1):
            line = _strip_comment(raw)
            stripped = line.strip()
            if not stripped:
                continue
            col = len(line) - len(line.lstrip()) + 1
            words = stripped.split()
            if words[0] == "BEGIN":
                name = " ".join(words[1:])
                if current is not None:
                    self.report("UNTERMINATED_BLOCK",
                                f"block {current} opened at line {begin_line} is not terminated",
                                begin_line)
                    self.section(current, body)
                if name not in SECTIONS:
                    self.report("UNKNOWN_KEYWORD", f"unknown section {name!r}", lineno, col)
                    current = None
                    continue
                self.enter_section(name, lineno, col)
                current, begin_line, body = name, lineno, []
            elif words[0] == "END":
                name = " ".join(words[1:])
                if current is None:
                    self.report("SYNTAX_ERROR", f"END {name} without matching BEGIN", lineno, col)
                elif name != current:
                    self.report("SYNTAX_ERROR",
                                f"END {name} does not close block {current} opened at line {begin_line}",
                                lineno, col)
                else:
                    self.section(current, body)
                    current = None
            elif current is None:
                self.report("UNKNOWN_KEYWORD", f"unexpected {words[0]!r} outside of a block", lineno, col)
            else:
                body.append((lineno, line))
        if current is not None:
            self.report("UNTERMINATED_BLOCK",
                        f"block {current} opened at line {begin_line} is not terminated", begin_line)
            self.section(current, body)
        for name in SECTIONS:
            if name not in OPTIONAL_SECTIONS and name not in self.seen_sections:
                last = max(len(self.source.lines), 1)
                self.report("MISSING_SECTION", f"section {name} is missing", last)

    def enter_section(self, name: str, line: int, col: int) -> None:
        if name in self.seen_sections:
            self.report("DUPLICATE_SECTION", f"section {name} appears twice", line, col)
        elif self.seen_sections and SECTIONS.index(name) < SECTIONS.index(self.seen_sections[-1]):
            self.report("SECTION_ORDER", f"section {name} must precede {self.seen_sections[-1]}", line, col)
        self.seen_sections.append(name)

    def section(self, name: str, body: list[tuple[int, str]]) -> None:
        handler = {
            "STATE VECTOR": self.state_vector,
            "RESOURCES": self.resource_block,
            "ACTIONS": self.action_block,
            "REACTION RULES": self.reaction_block,
            "STATE RULES": self.state_rule_block,
            "GOALS": self.goal_block,
            "CONFIG": self.config_block,
        }[name]
        handler(body)

    def guarded(self, line: int, fn, *args):
        try:
            return fn(*args)
        except _Syntax as exc:
            self.report(exc.code, str(exc), line, exc.column)
            return None

    def cursor(self, line: int, text: str, start: int = 0) -> _Cursor:
        return _Cursor(_tokenize(text[start:], line, start), len(text) + 1)

    # sections ----------------------------------------------------------------

    def state_vector(self, body):
        for line, text in body:
            def parse():
                cur = self.cursor(line, text)
                cur.expect("state")
                name = cur.ident("variable name")
                cur.expect("can")
                cur.expect("be")
                values = cur.comma_list(lambda: cur.ident("value name"))
                cur.done()
                self.origins[("variable", len(self.variables))] = (line, 1)
                self.variables.append(VariableDecl(name, tuple(values)))
            self.guarded(line, parse)

    def resource_block(self, body):
        for line, text in body:
            def parse():
                cur = self.cursor(line, text)
                cur.expect("resource")
                name = cur.ident("resource name")
                cur.done()
                self.origins[("resource", len(self.resources))] = (line, 1)
                self.resources.append(name)
            self.guarded(line, parse)

    def action_block(self, body):
        current: Optional[dict] = None

        def flush():
            if current is None:
                return
            if current["nominal"] is None:
                self.report("MISSING_NOMINAL", f"action {current['name']} has no nominal effects",
                            current["line"])
                return
            self.origins[("action", len(self.actions))] = (current["line"], 1)
            self.actions.append(ActionDef(
                name=current["name"],
                nominal=current["nominal"],
                duration=current["duration"] if current["duration"] is not None else 0,
                resources=tuple(current["resources"] or ()),
                preconditions=tuple(current["preconditions"] or ()),
                alternatives=tuple(current["alternative"]),
            ))

        for line, text in body:
            stripped = text.strip()
            col = len(text) - len(text.lstrip()) + 1
            if stripped.split()[0] == "action":
                flush()
                cur = self.cursor(line, text)

                def header():
                    cur.expect("action")
                    name = cur.ident("action name")
                    cur.done()
                    return name

                name = self.guarded(line, header)
                current = None if name is None else {
                    "name": name, "line": line, "duration": None, "resources": None,
                    "preconditions": None, "nominal": None, "alternative": [],
                }
                continue
            key = next((k for k, prefix in _ACTION_KEYS if stripped.startswith(prefix)), None)
            if key is None:
                word = stripped.split(":")[0] if ":" in stripped else stripped.split()[0]
                self.report("UNKNOWN_KEYWORD", f"unknown action attribute {word!r}", line, col)
                continue
            if current is None:
                self.report("SYNTAX_ERROR", "action attribute outside of an action", line, col)
                continue
            prefix = dict(_ACTION_KEYS)[key]
            start = text.index(prefix) + len(prefix)
            if key != "alternative" and current[key] is not None:
                self.report("DUPLICATE_ATTRIBUTE", f"{prefix[:-1]} given twice for {current['name']}", line, col)
                continue
            if key == "duration":
                value = self.guarded(line, _parse_int, text[start:], line, start + 1, "duration")
                if value is not None:
                    current["duration"] = value
                continue
            cur = self.cursor(line, text, start)

            def items(cur=cur, key=key):
                if key == "resources":
                    out = cur.comma_list(lambda: cur.ident("resource name"))
                elif key == "preconditions":
                    out = cur.comma_list(cur.literal)
                else:
                    lits = cur.comma_list(cur.assignment)
                    out = EffectSet(tuple((lit.variable, lit.value) for lit in lits))
                cur.done()
                return out

            value = self.guarded(line, items)
            if value is None:
                continue
            if key == "alternative":
                current["alternative"].append(value)
            else:
                current[key] = value
        flush()

    def _rules(self, body) -> list[tuple[int, list[_Tok], int]]:
        """Group lines into ``rule:`` statements, joining continuation lines."""
        rules: list[tuple[int, list[_Tok], int]] = []
        for line, text in body:
            toks = _tokenize(text, line)
            if len(toks) >= 2 and toks[0].text == "rule" and toks[1].text == ":":
                rules.append((line, toks[2:], len(text) + 1))
            elif rules:
                start, prev, _ = rules[-1]
                rules[-1] = (start, prev + toks, len(text) + 1)
            else:
                self.report("UNKNOWN_KEYWORD", f"expected 'rule:', found {toks[0].text!r}", line, toks[0].col)
        return rules

    def _statement(self, start_line, toks, end_col, fn):
        cur = _Cursor(toks, end_col)
        try:
            return fn(cur)
        except _Syntax as exc:
            tok = cur.peek()
            line = tok.line if tok else (toks[-1].line if toks else start_line)
            self.report(exc.code, str(exc), line, exc.column)
            return None

    def reaction_block(self, body):
        def parse(cur: _Cursor):
            cur.expect("IF")
            cond = cur.condition()
            cur.expect("THEN")
            consequents = []
            while True:
                mode = Mode.REQUIRE
                if cur.at("NOT"):
                    cur.i += 1
                    mode = Mode.FORBID
                cur.expect("executing")
                consequents.append((mode, cur.ident("action name")))
                if not cur.at("AND"):
                    break
                cur.i += 1
            cur.done()
            return ReactionRule(cond, tuple(consequents))

        for line, toks, end in self._rules(body):
            rule = self._statement(line, toks, end, parse)
            if rule is not None:
                self.origins[("reaction_rule", len(self.reaction_rules))] = (line, 1)
                self.reaction_rules.append(rule)

    def state_rule_block(self, body):
        def parse(cur: _Cursor):
            cur.expect("IF")
            antecedent = cur.condition()
            cur.expect("THEN")
            consequent = cur.condition()
            cur.done()
            return StateRule(antecedent, consequent)

        for line, toks, end in self._rules(body):
            rule = self._statement(line, toks, end, parse)
            if rule is not None:
                self.origins[("state_rule", len(self.state_rules))] = (line, 1)
                self.state_rules.append(rule)

    def goal_block(self, body):
        typed = False
        for line, text in body:
            cur = self.cursor(line, text)
            first = cur.peek()
            if first.text == "goal":
                def goal_type():
                    cur.expect("goal")
                    cur.expect("type")
                    cur.expect(":")
                    kind = cur.peek()
                    if kind is None or kind.text != "priority":
                        found = kind.text if kind else "nothing"
                        raise _Syntax(f"unsupported goal type {found!r}, only 'priority' is accepted",
                                      cur._col(), "UNKNOWN_KEYWORD")
                    cur.i += 1
                    cur.done()
                    return True
                typed = bool(self.guarded(line, goal_type)) or typed
            elif first.text == "when":
                def goal():
                    cur.expect("when")
                    when = cur.condition()
                    cur.expect("then")
                    cur.expect("goal")
                    cur.expect(":")
                    target = cur.comma_list(cur.assignment)
                    cur.done()
                    return GoalRule(when, tuple(target))
                if not typed:
                    self.report("SYNTAX_ERROR", "goal listed before 'goal type: priority'", line, first.col)
                rule = self.guarded(line, goal)
                if rule is not None:
                    self.origins[("goal", len(self.goals))] = (line, 1)
                    self.goals.append(rule)
            else:
                self.report("UNKNOWN_KEYWORD", f"unexpected {first.text!r} in GOALS", line, first.col)

    def config_block(self, body):
        for line, text in body:
            stripped = text.strip()
            col = len(text) - len(text.lstrip()) + 1
            key, sep, rest = stripped.partition(":")
            if key.strip() != "max_plan_length" or not sep:
                self.report("UNKNOWN_KEYWORD", f"unknown setting {key.strip()!r}", line, col)
                continue
            value = self.guarded(line, _parse_int, rest, line, text.index(":") + 2, "max_plan_length")
            if value is not None:
                self.origins[("config", 0)] = (line, col)
                self.max_plan_length = value
        if self.max_plan_length is None:
            line = body[-1][0] if body else max(len(self.source.lines), 1)
            self.report("MISSING_SETTING", "CONFIG does not set max_plan_length", line)


def parse_specification(source: SourceText | str) -> Specification:
    """Parse specification text.

    Returns the :class:`Specification` or raises :class:`SpecificationError`
    carrying at least one diagnostic. Any other exception is a bug.
    """
    if isinstance(source, str):
        source = SourceText(source)
    parser = _Parser(source)
    parser.run()
    if parser.diags:
        raise SpecificationError(parser.diags)
    spec = Specification(
        variables=tuple(parser.variables),
        resources=tuple(parser.resources),
        actions=tuple(parser.actions),
        reaction_rules=tuple(parser.reaction_rules),
        state_rules=tuple(parser.state_rules),
        goals=tuple(parser.goals),
        config=PlannerConfig(parser.max_plan_length),
    )
    problems = validate_specification(spec, parser.origins)
    if problems:
        raise SpecificationError(problems)
    return spec


def load_specification(path) -> Specification:
    with open(path, encoding="utf-8") as fh:
        return parse_specification(SourceText(fh.read(), str(path)))


# ---------------------------------------------------------------------------
# Canonical printing
# ---------------------------------------------------------------------------


def format_condition(cond: Condition) -> str:
    if isinstance(cond, Literal):
        return str(cond)
    if isinstance(cond, And):
        return " AND ".join(
            f"({format_condition(c)})" if isinstance(c, (Or, And)) else format_condition(c)
            for c in cond.children
        )
    return " OR ".join(
        f"({format_condition(c)})" if isinstance(c, Or) else format_condition(c)
        for c in cond.children
    )


def print_canonical(spec: Specification) -> str:
    out: list[str] = []

    def block(name: str, lines: list[str]):
        if out:
            out.append("")
        out.extend([f"BEGIN {name}", *lines, f"END {name}"])

    block("STATE VECTOR", [f"state {v.name} can be {', '.join(v.domain)}" for v in spec.variables])
    block("RESOURCES", [f"resource {r}" for r in spec.resources])

    lines: list[str] = []
    for i, act in enumerate(spec.actions):
        if i:
            lines.append("")
        lines.append(f"action {act.name}")
        if act.duration:
            lines.append(f"duration: {act.duration}")
        if act.resources:
            lines.append(f"controlled resources: {', '.join(act.resources)}")
        if act.preconditions:
            lines.append(f"preconditions: {', '.join(map(str, act.preconditions))}")
        lines.append(f"nominal effects: {act.nominal}")
        lines.extend(f"alternative effects: {eff}" for eff in act.alternatives)
    block("ACTIONS", lines)

    if spec.reaction_rules:
        lines = []
        for rule in spec.reaction_rules:
            then = " AND ".join(
                ("NOT " if mode is Mode.FORBID else "") + f"executing {name}"
                for mode, name in rule.consequents
            )
            lines.append(f"rule: IF {format_condition(rule.condition)} THEN {then}")
        block("REACTION RULES", lines)
    if spec.state_rules:
        block("STATE RULES", [
            f"rule: IF {format_condition(r.antecedent)} THEN {format_condition(r.consequent)}"
            for r in spec.state_rules
        ])
    lines = ["goal type: priority"] if spec.goals else []
    lines.extend(
        f"when {format_condition(g.when)} then goal: {', '.join(map(str, g.target))}"
        for g in spec.goals
    )
    block("GOALS", lines)
    block("CONFIG", [f"max_plan_length: {spec.config.max_plan_length}"])
    return "\n".join(out) + "\n"
