import itertools
import math
import os
from pathlib import Path

import numpy as np
import pytest

from beamaco.instance import TspInstance

DATA = Path(__file__).parent / "data"


class CountingGenerator:
    """Wraps a numpy Generator and counts every method call made on it."""

    def __init__(self, seed=0):
        self._rng = np.random.default_rng(seed)
        self.calls = 0

    def __getattr__(self, name):
        attr = getattr(self._rng, name)
        if callable(attr):
            def counted(*args, **kwargs):
                self.calls += 1
                return attr(*args, **kwargs)
            return counted
        return attr


def brute_force_optimum(inst: TspInstance) -> int:
    """Shortest closed tour by enumerating every order of the non-depot nodes."""
    pts = inst.points

    def d(a, b):
        return math.floor(math.sqrt((pts[a].x - pts[b].x) ** 2 + (pts[a].y - pts[b].y) ** 2) + 0.5)

    others = [i for i in range(inst.n) if i != inst.depot]
    best = None
    for perm in itertools.permutations(others):
        order = (inst.depot, *perm)
        length = sum(d(order[i], order[(i + 1) % len(order)]) for i in range(len(order)))
        if best is None or length < best:
            best = length
    return best


def find_tsplib(name: str) -> Path | None:
    """Locate a published TSPLIB file in $BEAMACO_TSPLIB_DIR or tests/data."""
    candidates = []
    if os.environ.get("BEAMACO_TSPLIB_DIR"):
        candidates.append(Path(os.environ["BEAMACO_TSPLIB_DIR"]) / f"{name}.tsp")
    candidates.append(DATA / f"{name}.tsp")
    for c in candidates:
        if c.is_file():
            return c
    return None


@pytest.fixture
def square() -> TspInstance:
    return TspInstance.from_coords("square", [(0, 0), (0, 10), (10, 10), (10, 0)])


@pytest.fixture
def berlin52_path() -> Path:
    return DATA / "berlin52.tsp"


# -- acceptance report ------------------------------------------------------------

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when != "call" and rep.passed:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "outcomes": {}})
    # a failing setup or teardown overrides a passing call
    if rep.when == "call" or not rep.passed:
        entry["outcomes"][item.name] = rep.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        outcomes = entry["outcomes"]
        if any(o == "failed" for o in outcomes.values()):
            verdict = "FAIL"
        elif all(o == "skipped" for o in outcomes.values()):
            verdict = "SKIP"
        elif any(o == "skipped" for o in outcomes.values()):
            verdict = "PART"
        else:
            verdict = "PASS"
        line = f"{verdict:4}  criterion {number:>2}: {entry['title']}"
        bad = [name for name, o in outcomes.items() if o != "passed"]
        if bad and verdict != "SKIP":
            line += f"  ({', '.join(f'{n} {outcomes[n]}' for n in bad)})"
        terminalreporter.write_line(line)
