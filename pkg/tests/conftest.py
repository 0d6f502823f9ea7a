import json
import math
from pathlib import Path

import pytest

from rydgate.params import load_config, loads_config

FIXTURES = Path(__file__).parent / "fixtures"
TWO_PI = 2 * math.pi


def mhz(x):
    return TWO_PI * 1e6 * x


def ghz(x):
    return TWO_PI * 1e9 * x


@pytest.fixture(scope="session")
def anchor():
    return json.loads((FIXTURES / "anchor_150s.json").read_text())


@pytest.fixture(scope="session")
def cfg_150():
    return load_config("rb150s_gate")


@pytest.fixture(scope="session")
def cfg_97d():
    return load_config("ramsey_97d")


@pytest.fixture
def minimal_text():
    return "level.n = 150\nlaser.rabi_mhz = 30\n"


@pytest.fixture
def minimal_cfg(minimal_text):
    return loads_config(minimal_text)


ACCEPTANCE = {}


def record_acceptance(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
