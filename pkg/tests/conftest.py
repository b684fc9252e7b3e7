import pytest

from exactchain import (Alphabet, make_constant_kernel, make_markov_kernel,
                        make_renewal_kernel)


@pytest.fixture(scope="session")
def binary():
    return Alphabet.of_size(2)


@pytest.fixture(scope="session")
def markov1(binary):
    """Order-1 kernel on {1,2} with P(2|1)=0.4, P(2|2)=0.6."""
    return make_markov_kernel(binary, 1, [[0.6, 0.4], [0.4, 0.6]])


@pytest.fixture(scope="session")
def constant():
    return make_constant_kernel([0.3, 0.7])


@pytest.fixture(scope="session")
def showcase():
    """Renewal kernel with a genuine discontinuity on the all-1 branch.

    r alternates 0.3/0.4 with distance parity, delta = 0.2, q = 0.8; the
    no-2 limit law (q) never matches the r-values, so conditioning on
    longer all-1 suffixes keeps oscillating.
    """
    return make_renewal_kernel({"kind": "periodic", "values": [0.3, 0.4]}, 0.2, 0.8)


@pytest.fixture(scope="session")
def iid_renewal():
    """Renewal kernel degenerating to i.i.d. after each marker (delta = 0)."""
    return make_renewal_kernel(0.4, 0.0, 0.4)
