from pathlib import Path

import pytest

from chipletsim.config import parse_network

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
CONFIGS = ROOT / "configs"


@pytest.fixture(scope="session")
def fixture_net():
    cache = {}

    def load(name):
        if name not in cache:
            cache[name] = parse_network(FIXTURES / f"{name}.csv")
        return cache[name]

    return load


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
