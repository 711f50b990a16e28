import numpy as np
import pytest

from ilsll.core import CallableProblem


@pytest.fixture
def and_problem():
    """f(x) = x1 * x2 on two bits: single pairwise interaction."""
    return CallableProblem(2, lambda b: float(b[0] and b[1]))


def linear_problem(weights):
    w = np.asarray(weights, dtype=float)
    return CallableProblem(len(w), lambda b: float(np.dot(w, b)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
