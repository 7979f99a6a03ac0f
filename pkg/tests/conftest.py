import random
from functools import lru_cache

import pytest

from tractor_symm.scalars import Q
from tractor_symm.poly import Poly, monomials_up_to_degree
from tractor_symm.tensor import Metric
from tractor_symm import ckt


@lru_cache(maxsize=None)
def solved_basis(n, p, r):
    metric = Metric.euclidean(n)
    return tuple(ckt.solve(metric, ckt.CKTLabel(p, r)))


@pytest.fixture(scope="session")
def met3():
    return Metric.euclidean(3)


@pytest.fixture(scope="session")
def ckvs3():
    return solved_basis(3, 1, 0)


@pytest.fixture(scope="session")
def named_ckvs(ckvs3):
    """Translation e1, e2 and the dilation field, picked out of the basis."""
    n = 3
    e1 = e2 = dil = None
    for phi in ckvs3:
        c = phi.comps
        if list(c.keys()) == [(0,)] and c[(0,)] == Poly.const(n, 1):
            e1 = phi
        if list(c.keys()) == [(1,)] and c[(1,)] == Poly.const(n, 1):
            e2 = phi
        if set(c.keys()) == {(0,), (1,), (2,)} and all(
                c[(a,)] == Poly.var(n, a) for a in range(n)):
            dil = phi
    assert e1 is not None and e2 is not None and dil is not None
    return e1, e2, dil


def random_poly(n, degree, rng, span=4):
    return Poly(n, {e: Q(rng.randint(-span, span))
                    for e in monomials_up_to_degree(n, degree)})


@pytest.fixture
def rng():
    return random.Random(7)
