import pytest

from branchforge.embeddings import QuotientSpec, build_level_data
from branchforge.perms import Permutation
from branchforge.treeauto import SpinePair, TreeCalculus, TreeShape


def trivial_quotient():
    return QuotientSpec(1, {})


def c2_quotient():
    return QuotientSpec(2, {"s": Permutation.from_cycles([[0, 1]], 2)})


@pytest.fixture(scope="session")
def level_n1():
    return build_level_data(trivial_quotient())


@pytest.fixture(scope="session")
def level_n2():
    return build_level_data(c2_quotient())


@pytest.fixture(scope="session")
def shape_n1(level_n1):
    return TreeShape([level_n1] * 6)


@pytest.fixture(scope="session")
def spine_n1(level_n1):
    alpha = (level_n1.y[0],) * 6
    beta = (level_n1.y_prime[0],) * 6
    return SpinePair(alpha, beta)


@pytest.fixture(scope="session")
def calc_n1(shape_n1, spine_n1):
    return TreeCalculus(shape_n1, spine_n1)


@pytest.fixture(scope="session")
def shape_c2(level_n2):
    return TreeShape([level_n2] * 5)


@pytest.fixture(scope="session")
def spine_c2(level_n2):
    alpha = (level_n2.y[0],) * 5
    beta = (level_n2.y_prime[0],) * 5
    return SpinePair(alpha, beta)


@pytest.fixture(scope="session")
def calc_c2(shape_c2, spine_c2):
    return TreeCalculus(shape_c2, spine_c2)
