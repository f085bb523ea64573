from __future__ import annotations

from functools import lru_cache

import pytest
from hypothesis import settings

from annular_khr.cli import corpus_names, corpus_path
from annular_khr.diagram import TangleDiagram, load_atd

settings.register_profile("repo", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("repo")


@lru_cache(maxsize=None)
def load(name: str) -> TangleDiagram:
    return load_atd(corpus_path(name))


@pytest.fixture(scope="session")
def corpus() -> dict[str, TangleDiagram]:
    return {name: load(name) for name in corpus_names()}


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
