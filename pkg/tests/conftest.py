from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hgpnlets.css import steane_code
from hgpnlets.graphs import complete_graph, cycle_graph
from hgpnlets.hgp import hypergraph_product

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def c3():
    return hypergraph_product(cycle_graph(3))


@pytest.fixture(scope="session")
def k4():
    return hypergraph_product(complete_graph(4))


@pytest.fixture(scope="session")
def steane():
    return steane_code()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
