"""JSON policy files.

Layout::

    {"meta": {"tool_version": "...", "spec_digest": "sha256:..."},
     "policy": [{"S_Location": "corridor", ..., "Actions": ["move_to_workstation_1"]}, ...]}

Variables appear in declaration order, entries in the order held by the
policy (canonical state order for generated policies) and action names sorted.
"""
from __future__ import annotations

import json

from .model import Policy, PolicyEntry, PolicyMeta, Specification

ACTIONS_KEY = "Actions"


class PolicyFormatError(ValueError):
    pass


def policy_to_dict(policy: Policy, spec: Specification) -> dict:
    names = spec.variable_names
    return {
        "meta": {"tool_version": policy.meta.tool_version, "spec_digest": policy.meta.spec_digest},
        "policy": [
            {**dict(zip(names, e.state.values)), ACTIONS_KEY: sorted(e.actions)}
            for e in policy.entries
        ],
    }


def dump_policy(policy: Policy, spec: Specification) -> str:
    return json.dumps(policy_to_dict(policy, spec), indent=2) + "\n"


def load_policy(text: str, spec: Specification) -> Policy:
    """Parse a policy document against ``spec``.

    Every entry must assign a declared value to every variable. Action names
    are not checked here; unknown actions are reported by the verifier.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolicyFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("policy"), list):
        raise PolicyFormatError("expected an object with a 'policy' list")
    meta = doc.get("meta") or {}
    if not isinstance(meta, dict):
        raise PolicyFormatError("'meta' must be an object")
    entries = []
    for i, item in enumerate(doc["policy"]):
        if not isinstance(item, dict):
            raise PolicyFormatError(f"entry {i} is not an object")
        actions = item.get(ACTIONS_KEY)
        if not isinstance(actions, list) or not all(isinstance(a, str) for a in actions):
            raise PolicyFormatError(f"entry {i}: '{ACTIONS_KEY}' must be a list of action names")
        assignment = {k: v for k, v in item.items() if k != ACTIONS_KEY}
        try:
            state = spec.state(assignment)
        except ValueError as exc:
            raise PolicyFormatError(f"entry {i}: {exc}") from None
        entries.append(PolicyEntry(state, tuple(sorted(actions))))
    return Policy(
        tuple(entries),
        PolicyMeta(str(meta.get("tool_version", "")), str(meta.get("spec_digest", ""))),
    )
