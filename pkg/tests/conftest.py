import hypothesis
import numpy as np
import pytest

from noveltydecay import GrowthParams, NoveltyCurve, SimConfig

np.seterr(all="warn")

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

ACCEPTANCE_LINES = []


def _criterion_key(line):
    num = line[1:].split()[0]
    return int(num.rstrip("ab")), num


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_criterion_key):
            terminalreporter.write_line(line)


@pytest.fixture
def small_config():
    return SimConfig(
        n_stories=50,
        horizon=60,
        growth=GrowthParams(0.05, 0.0072),
        novelty=NoveltyCurve.stretched_exponential(0.4, 0.4, 60),
        master_seed=11,
    )
