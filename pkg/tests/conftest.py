import numpy as np
import pytest

from nrpmf.linkbudget import resolve
from nrpmf.pipeline import Analysis
from nrpmf.reference import RADII
from nrpmf.scenario import load_scenario, bundled_scenario_path

P_CS = (0.01, 0.05, 0.1)


@pytest.fixture(scope="session")
def bundled():
    return load_scenario(bundled_scenario_path())


@pytest.fixture(scope="session")
def anchored(bundled):
    """Analyses with the cell radius pinned to the tabulated radius, per p_C."""
    return {p: Analysis(bundled.replace(p_c=p, r_a_m=RADII[p])) for p in P_CS}


@pytest.fixture(scope="session")
def cell(bundled):
    # p_C = 0.1 scenario in the anchored mode: (scenario, link budget, geometry)
    s = bundled.replace(p_c=0.1, r_a_m=RADII[0.1])
    lb, _, g = resolve(s)
    return s, lb, g


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record one acceptance line; all lines are echoed in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def _report(line: str) -> None:
        lines.append(line)

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda t: int(t.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
