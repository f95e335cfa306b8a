import math

import numpy as np
import pytest

from beamlearn.channel import Environment, PathComponent, PlanarArrayConfig, array_response, synthesize_channel
from beamlearn.harness.scenario import ScenarioConfig, build_environment

ACCEPTANCE_LINES = []


def aligned_single_path(bs=PlanarArrayConfig(8, 8), ue=PlanarArrayConfig(4, 4), tx_power=0.01, aoa=(1.0, 0.6), aod=(2.0, -0.3)):
    path = PathComponent(1.0 + 0j, aoa[0], aoa[1], aod[0], aod[1])
    channel = synthesize_channel(bs, ue, [path])
    return Environment(channel, array_response(bs, *aod), tx_power)


@pytest.fixture
def single_path_env():
    return aligned_single_path()


@pytest.fixture(scope="session")
def default_env():
    return build_environment(ScenarioConfig(seed=0)).reference


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
