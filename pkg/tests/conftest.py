import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dynbeam.model import ChannelSet, QosSpec, Topology
from dynbeam.verify import feasible_instances

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# lines reported by tests/test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_channels(rng, topo):
    shape = (topo.n_bs, topo.n_users, topo.n_tx)
    return ChannelSet((rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2))


@pytest.fixture(scope="session")
def topo():
    return Topology.uniform(2, 2, 4)


@pytest.fixture(scope="session")
def qos():
    return QosSpec.uniform(4, 10.0, 10.0)


@pytest.fixture(scope="session")
def instances(topo, qos):
    """Five seeded feasible channels of the reference scenario."""
    return feasible_instances(topo, qos, 5, seed=11)
