from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from qhi.cyclotomic import RootContext, RootDetermination

settings.register_profile("qhi", max_examples=40, deadline=None)
settings.load_profile("qhi")


@pytest.fixture(params=[3, 5, 7], ids=lambda n: f"N{n}")
def N(request):
    return request.param


@pytest.fixture
def ctx(N):
    return RootContext(N)


@pytest.fixture
def det(N):
    return RootDetermination(N)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
