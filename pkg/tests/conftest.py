import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.core.loader import load_file, prepare_goal  # noqa: E402
from src.core.parser import parse_goal  # noqa: E402
from src.core.solver import SearchOptions, solve  # noqa: E402

PROGRAMS = os.path.join(ROOT, "programs")
FIXPOINT_PROGRAMS = os.path.join(PROGRAMS, "fixpoint")


def program_path(name: str) -> str:
    return os.path.join(PROGRAMS, name)


@pytest.fixture(autouse=True)
def sqclp_home(tmp_path, monkeypatch):
    """Keep settings, history and logs of every test inside its own directory."""
    home = tmp_path / "home"
    monkeypatch.setenv("SQCLP_HOME", str(home))
    return home


@pytest.fixture(scope="session")
def goodwork():
    return load_file(program_path("goodwork.sqclp"))


@pytest.fixture(scope="session")
def running():
    return load_file(program_path("running.sqclp"))


@pytest.fixture(scope="session")
def family():
    return load_file(program_path("family.sqclp"))


@pytest.fixture(scope="session")
def fuzzy():
    return load_file(program_path("fuzzy.sqclp"))


@pytest.fixture(scope="session")
def budget():
    return load_file(program_path("budget.sqclp"))


@pytest.fixture(scope="session")
def chain():
    return load_file(os.path.join(FIXPOINT_PROGRAMS, "chain.sqclp"))


@pytest.fixture(scope="session")
def fixpoint_programs():
    return {name: load_file(os.path.join(FIXPOINT_PROGRAMS, f"{name}.sqclp"))
            for name in ("chain", "costs", "nested", "similar", "weights")}


@pytest.fixture(scope="session")
def corpus(goodwork, running, family, fuzzy, budget, fixpoint_programs):
    """Every program under ``programs/`` by file name."""
    return {"goodwork": goodwork, "running": running, "family": family, "fuzzy": fuzzy,
            "budget": budget, **fixpoint_programs}


@pytest.fixture
def ask():
    """Run a goal written in source syntax and collect its solutions."""

    def run(program, text, **options):
        goal = prepare_goal(program, parse_goal(text))
        return list(solve(program, goal, SearchOptions(**options)))

    return run
