"""Bundled example specifications and the generators behind the generated ones.

``amr.tmt`` and ``coin.tmt`` are hand written. The grid and factory files are
produced by the functions below; ``python -m safeplan.bundled`` rewrites them.

Effects assign constants, so a grid move is one action per source cell
(``move_right_r1c0`` moves right out of row 1, column 0).
"""
from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

from .dsl import load_specification
from .model import Specification

BUNDLED = ("amr", "grid3", "grid5", "coin", "factory")

_DIRECTIONS = {
    "up": (-1, 0),
    "down": (1, 0),
    "left": (0, -1),
    "right": (0, 1),
}


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("safeplan") / "specs" / f"{name}.tmt"))


def load_bundled(name: str) -> Specification:
    return load_specification(bundled_path(name))


def cell_action(direction: str, row: int, col: int) -> str:
    return f"move_{direction}_r{row}c{col}"


def grid_spec(size: int, destination: tuple[int, int], unsafe_border: bool = False,
              max_plan_length: int = 5) -> str:
    """A ``size`` x ``size`` navigation grid.

    Every move may drift to either cell beside its target (perpendicular to
    the move direction) when that cell exists. With ``unsafe_border`` the
    outer ring is declared unsafe.
    """
    rows = [f"r{i}" for i in range(size)]
    cols = [f"c{i}" for i in range(size)]
    lines = [
        "BEGIN STATE VECTOR",
        f"state S_Row can be {', '.join(rows)}",
        f"state S_Col can be {', '.join(cols)}",
        "END STATE VECTOR",
        "",
        "BEGIN RESOURCES",
        "resource MOTORS",
        "END RESOURCES",
        "",
        "BEGIN ACTIONS",
    ]
    inside = range(size)
    first = True
    for r in inside:
        for c in inside:
            for direction, (dr, dc) in _DIRECTIONS.items():
                tr, tc = r + dr, c + dc
                if tr not in inside or tc not in inside:
                    continue
                if not first:
                    lines.append("")
                first = False
                lines += [
                    f"action {cell_action(direction, r, c)}",
                    "duration: 1",
                    "controlled resources: MOTORS",
                    f"preconditions: S_Row is r{r}, S_Col is c{c}",
                    f"nominal effects: S_Row is r{tr}, S_Col is c{tc}",
                ]
                for sr, sc in ((tr + dc, tc + dr), (tr - dc, tc - dr)):
                    if sr in inside and sc in inside:
                        lines.append(f"alternative effects: S_Row is r{sr}, S_Col is c{sc}")
    lines.append("END ACTIONS")
    if unsafe_border:
        edge = f"S_Row is r0 OR S_Row is r{size - 1} OR S_Col is c0 OR S_Col is c{size - 1}"
        interior = f"NOT S_Row is r0 AND NOT S_Row is r{size - 1} AND NOT S_Col is c0 AND NOT S_Col is c{size - 1}"
        lines += ["", "BEGIN STATE RULES", "// the outer ring is unsafe",
                  f"rule: IF {edge}", f"  THEN {interior}", "END STATE RULES"]
    dr, dc = destination
    lines += [
        "",
        "BEGIN GOALS",
        "goal type: priority",
        f"when NOT S_Row is r{dr} OR NOT S_Col is c{dc} then goal: S_Row is r{dr}, S_Col is c{dc}",
        "END GOALS",
        "",
        "BEGIN CONFIG",
        f"max_plan_length: {max_plan_length}",
        "END CONFIG",
    ]
    return "\n".join(lines) + "\n"


def factory_spec() -> str:
    """Scaled-up transport robot: 2688 states, 18 actions.

    Seven locations, three battery levels, four delivery orders, and binary
    load, conveyor, beacon, camera and human-presence variables. Orders and
    human presence are set by the environment only.
    """
    stations = range(1, 6)
    locations = ["corridor", "charger"] + [f"workstation_{k}" for k in stations]
    orders = [f"to_workstation_{k}" for k in range(2, 6)]
    lines = [
        "// generated by safeplan.bundled.factory_spec",
        "BEGIN STATE VECTOR",
        f"state S_Location can be {', '.join(locations)}",
        "state S_Battery can be low, medium, ok",
        "state S_Load can be loaded, free",
        "state S_Conveyor can be on, off",
        f"state S_Order can be {', '.join(orders)}",
        "state S_Beacon can be on, off",
        "state S_Camera can be on, off",
        "state S_Human can be present, absent",
        "END STATE VECTOR",
        "",
        "BEGIN RESOURCES",
        "resource MOTORS",
        "resource CONVEYOR",
        "resource BEACON",
        "resource CAMERA",
        "END RESOURCES",
        "",
        "BEGIN ACTIONS",
    ]

    def action(name, duration, res, pre, nominal, *alternatives):
        lines.extend([
            f"action {name}",
            f"duration: {duration}",
            f"controlled resources: {res}",
            f"preconditions: {pre}",
            f"nominal effects: {nominal}",
            *(f"alternative effects: {alt}" for alt in alternatives),
            "",
        ])

    for k in stations:
        # odd-numbered stations may be occupied, leaving the robot in the corridor
        alts = ["S_Location is corridor"] if k % 2 else []
        action(f"move_to_workstation_{k}", 10, "MOTORS", "S_Location is corridor",
               f"S_Location is workstation_{k}", *alts)
    action("move_to_charger", 10, "MOTORS", "S_Location is corridor", "S_Location is charger")
    action("move_to_corridor", 2, "MOTORS", "NOT S_Location is corridor", "S_Location is corridor")
    action("receive_workpiece", 3, "MOTORS, CONVEYOR",
           "S_Location is workstation_1, S_Load is free, S_Camera is on",
           "S_Conveyor is on, S_Load is loaded",
           "S_Conveyor is on, S_Load is free", "S_Conveyor is off, S_Load is free")
    for k in range(2, 6):
        action(f"deliver_to_workstation_{k}", 3, "MOTORS, CONVEYOR",
               f"S_Location is workstation_{k}, S_Load is loaded, S_Order is to_workstation_{k}",
               "S_Conveyor is on, S_Load is free", "S_Conveyor is on, S_Load is loaded")
    action("stop_conveyor", 1, "CONVEYOR", "S_Conveyor is on", "S_Conveyor is off")
    action("charge", 50, "MOTORS", "S_Location is charger, NOT S_Battery is ok",
           "S_Battery is ok", "S_Battery is medium")
    action("beacon_on", 1, "BEACON", "S_Beacon is off", "S_Beacon is on")
    action("beacon_off", 1, "BEACON", "S_Beacon is on", "S_Beacon is off")
    action("camera_on", 1, "CAMERA", "S_Camera is off", "S_Camera is on")
    action("camera_off", 1, "CAMERA", "S_Camera is on", "S_Camera is off")
    lines.pop()
    lines += [
        "END ACTIONS",
        "",
        "BEGIN STATE RULES",
        "rule: IF S_Location is corridor OR S_Location is charger THEN S_Conveyor is off",
        "rule: IF S_Location is corridor THEN S_Beacon is on",
        "END STATE RULES",
        "",
        "BEGIN GOALS",
        "goal type: priority",
        "when S_Battery is low then goal: S_Battery is ok",
        "when S_Load is loaded then goal: S_Load is free",
        "when S_Human is present then goal: S_Location is charger",
        "when S_Load is free then goal: S_Load is loaded",
        "END GOALS",
        "",
        "BEGIN CONFIG",
        "max_plan_length: 6",
        "END CONFIG",
    ]
    return "\n".join(lines) + "\n"


GENERATED = {
    "grid3": lambda: grid_spec(3, (1, 2)),
    "grid5": lambda: grid_spec(5, (2, 3), unsafe_border=True, max_plan_length=8),
    "factory": factory_spec,
}


def main(argv=None) -> int:
    for name, make in GENERATED.items():
        bundled_path(name).write_text(make(), encoding="utf-8")
        print(f"wrote {bundled_path(name)}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
