from __future__ import annotations

import pytest

from safeplan import build_policy
from safeplan.bundled import bundled_path, load_bundled


@pytest.fixture(scope="session")
def amr():
    return load_bundled("amr")


@pytest.fixture(scope="session")
def amr_text():
    return bundled_path("amr").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def amr_policy(amr):
    return build_policy(amr)


@pytest.fixture(scope="session")
def grid3():
    return load_bundled("grid3")


@pytest.fixture(scope="session")
def grid5():
    return load_bundled("grid5")


def st(spec, *values):
    return spec.state(tuple(values))
