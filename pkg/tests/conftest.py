import random

import pytest

from depnet.network import DependencyNetwork


def net_from_edges(n, edges, names=None, packages=None, kinds=None):
    names = names or [f"n{i:03d}" for i in range(n)]
    return DependencyNetwork(names, edges, kinds=kinds, packages=packages)


@pytest.fixture
def rng():
    return random.Random(0xC1A55)
