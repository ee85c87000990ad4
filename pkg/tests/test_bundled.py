from __future__ import annotations

import pytest

from safeplan.bundled import BUNDLED, GENERATED, bundled_path, load_bundled
from safeplan.model import validate_specification
from safeplan.semantics import enumerate_states


@pytest.mark.parametrize("name", sorted(GENERATED))
def test_generated_files_are_current(name):
    assert bundled_path(name).read_text(encoding="utf-8") == GENERATED[name]()


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_specs_are_valid(name):
    assert validate_specification(load_bundled(name)) == []


def test_factory_size():
    spec = load_bundled("factory")
    assert len(enumerate_states(spec)) == 2688
    assert len(spec.actions) == 18
