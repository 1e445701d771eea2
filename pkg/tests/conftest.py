import numpy as np
import pytest

from unigen.algebra import bracket_closure
from unigen.completion import complete_basis
from unigen.groups import DEMOS, random_generic_pair, su2_basis
from unigen.synthesis import NetConfig, build_net

# Seed of the generic SU(2) pair used for net-based tests.
GENERIC_SU2_SEED = 7


def random_skew_hermitian(rng, n, scale=1.0):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    X = 0.5 * (Z - Z.conj().T)
    return scale * X / np.linalg.norm(X)


def random_unitary(rng, n):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def e():
    return su2_basis()


@pytest.fixture(scope="session")
def demo_bases():
    out = {}
    for name, make in DEMOS.items():
        gens = make()
        out[name] = complete_basis(gens, bracket_closure(gens))
    return out


@pytest.fixture(scope="session")
def generic_su2():
    gens = random_generic_pair("skew_hermitian", 2, np.random.default_rng(GENERIC_SU2_SEED))
    return complete_basis(gens, bracket_closure(gens))


@pytest.fixture(scope="session")
def generic_su2_net(generic_su2):
    return build_net(generic_su2, 0.4, NetConfig(seed=0))
