import pytest

from utils.library import (
    complete_graph,
    cycle,
    independent_set,
    linear_order,
    load_class,
    load_expansion,
    path,
)


@pytest.fixture(scope="session")
def graphs():
    return load_class("graphs")


@pytest.fixture(scope="session")
def linear_orders():
    return load_class("linear-orders")


@pytest.fixture(scope="session")
def c3c5free():
    return load_class("c3c5free")


@pytest.fixture(scope="session")
def k3i3free():
    return load_class("k3i3free")


@pytest.fixture(scope="session")
def sets():
    return load_class("sets")


@pytest.fixture(scope="session")
def ordered_graphs_expansion():
    return load_expansion("graphs-ordered")


@pytest.fixture(scope="session")
def sets_lo():
    return load_expansion("sets-lo")


@pytest.fixture(scope="session")
def sets_p():
    return load_expansion("sets-p")


@pytest.fixture
def k2():
    return complete_graph(2)


@pytest.fixture
def k3():
    return complete_graph(3)


@pytest.fixture
def c5():
    return cycle(5)


@pytest.fixture
def p3():
    return path(3)


@pytest.fixture
def i2():
    return independent_set(2)


@pytest.fixture(scope="session")
def lo_chain(linear_orders):
    from core.classes import chain_prefix
    return chain_prefix(linear_orders, [linear_order(n) for n in range(1, 7)])
