import numpy as np
import pytest

from localdual.problems import ProblemSpec, QuadraticClient

import _frozen as fz


def oracle_problem():
    """The literal 3-client instance used by the tools/ oracle scripts."""
    clients = tuple(
        QuadraticClient(np.array(A), np.array(b))
        for A, b in zip(fz.ORACLE_A, fz.ORACLE_B)
    )
    return ProblemSpec(M=3, n=2, clients=clients, mu=fz.ORACLE_MU, L=fz.ORACLE_L,
                       sigma=0.0, convexity_class="strongly_convex",
                       curvature_lb=fz.ORACLE_MU)


def one_round_problem(sigma=0.0):
    """The tiny scalar 2-client instance from tools/oracle_one_round.py."""
    clients = tuple(
        QuadraticClient(np.array([[a]]), np.array([b]))
        for a, b in zip(fz.ONE_ROUND_A, fz.ONE_ROUND_B)
    )
    return ProblemSpec(M=2, n=1, clients=clients, mu=fz.ONE_ROUND_MU,
                       L=fz.ONE_ROUND_L, sigma=sigma,
                       convexity_class="strongly_convex",
                       curvature_lb=fz.ONE_ROUND_MU)


@pytest.fixture
def oracle_p():
    return oracle_problem()


@pytest.fixture
def one_round_p():
    return one_round_problem()
