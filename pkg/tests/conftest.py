import numpy as np
import pytest

from rebar_gauge.scattering import BarModel, MediumModel
from rebar_gauge.synth import SynthScenario

ACCEPTANCE_LINES = []


@pytest.fixture
def case_scenario():
    return SynthScenario(bar=BarModel.from_diameter_mm(12.0), medium=MediumModel(3.0), depth=0.3)


@pytest.fixture
def rng():
    return np.random.default_rng(20241014)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
