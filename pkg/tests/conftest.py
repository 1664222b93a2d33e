import numpy as np
import pytest
from hypothesis import strategies as st

from genib import instance
from genib.prob import Alphabet, Channel, Distribution, Joint


@pytest.fixture
def example_joint():
    return instance.example_joint()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_joint(rng, nx, ny, numeric=True, floor=0.0):
    m = rng.dirichlet(np.ones(nx * ny)).reshape(nx, ny) + floor
    m /= m.sum()
    return Joint(Alphabet.of_size(nx), Alphabet.of_size(ny, numeric=numeric), m)


def random_channel(rng, n, m):
    u = rng.uniform(size=(n, m))
    return Channel.from_array(u / u.sum(axis=1, keepdims=True))


def simplex_vectors(n, min_value=1e-3):
    # min_value=0 allows boundary points; the all-zero draw is filtered out
    return (
        st.lists(st.floats(min_value=min_value, max_value=1.0, allow_nan=False), min_size=n, max_size=n)
        .filter(lambda v: sum(v) > 1e-6)
        .map(lambda v: np.asarray(v) / np.sum(v))
    )


@st.composite
def joints(draw, max_x=4, max_y=4, min_value=1e-3):
    nx = draw(st.integers(1, max_x))
    ny = draw(st.integers(1, max_y))
    flat = draw(simplex_vectors(nx * ny, min_value))
    return Joint(Alphabet.of_size(nx), Alphabet.of_size(ny, numeric=True), flat.reshape(nx, ny))


@st.composite
def prior_and_channel(draw, max_x=4, max_t=4):
    nx = draw(st.integers(1, max_x))
    nt = draw(st.integers(1, max_t))
    prior = Distribution.from_array(draw(simplex_vectors(nx)))
    rows = np.array([draw(simplex_vectors(nt)) for _ in range(nx)])
    return prior, Channel.from_array(rows)
