import random

import pytest
from hypothesis import given, settings, strategies as st

from tractor_symm.scalars import Q
from tractor_symm.poly import Poly
from tractor_symm.tensor import (Metric, SymTensor, trace, trace_free,
                                 g_odot, decompose_traces,
                                 random_tracefree, young22_space)


def test_metric_trace():
    met = Metric.euclidean(3)
    g = SymTensor(met, 2)
    for a in range(3):
        g.add_to((a, a), Poly.const(3, met.g(a, a)))
    assert trace(g).get(()) == Poly.const(3, 3)


def test_unit_vector_trace():
    met = Metric.euclidean(3)
    e11 = SymTensor(met, 2, {(0, 0): 1})
    assert trace(e11).get(()) == Poly.const(3, 1)


def test_trace_free_e1e1():
    met = Metric.euclidean(3)
    e11 = SymTensor(met, 2, {(0, 0): 1})
    tf = trace_free(e11)
    want = SymTensor(met, 2, {(0, 0): Q(2, 3), (1, 1): Q(-1, 3),
                              (2, 2): Q(-1, 3)})
    assert tf == want
    assert trace(tf).is_zero()


def test_trace_free_indefinite():
    met = Metric(1, 2)
    e11 = SymTensor(met, 2, {(0, 0): 1})
    tf = trace_free(e11)
    assert trace(tf).is_zero()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 4))
def test_trace_decomposition_roundtrip(seed, rank):
    rng = random.Random(seed)
    met = Metric.euclidean(3)
    t = SymTensor(met, rank)
    from tractor_symm.tensor import multisets
    for m in multisets(3, rank):
        t.add_to(m, Poly.const(3, Q(rng.randint(-3, 3))))
    parts = decompose_traces(t)
    # each part is trace-free and the g-powers rebuild the tensor
    rebuilt = SymTensor.zero(met, rank)
    for q, u in enumerate(parts):
        assert u.rank < 2 or trace(u).is_zero()
        emb = u
        for _ in range(q):
            emb = g_odot(emb)
        rebuilt = rebuilt + emb
    assert rebuilt == t


def test_random_tracefree_is_tracefree():
    rng = random.Random(3)
    met = Metric.euclidean(3)
    t = random_tracefree(met, 3, 2, rng)
    assert trace(t).is_zero()
    assert not t.is_zero()


def test_young22_projection_properties():
    # on a 4-dim euclidean space: project a random 4-tensor and check
    # the result satisfies skewness, pair exchange, Bianchi, tracelessness
    dim = 4
    h = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
    sp = young22_space(dim, h)
    rng = random.Random(11)
    dense = {}
    for a in range(dim):
        for b in range(dim):
            for c in range(dim):
                for d in range(dim):
                    dense[(a, b, c, d)] = Q(rng.randint(-3, 3))

    vec = sp.coords_of_tensor(lambda a, b, c, d: dense[(a, b, c, d)])
    _, proj = sp.project_coords(vec)

    def comp(a, b, c, d):
        r = sp.coord_of(a, b, c, d)
        if r is None:
            return Q(0)
        k, s = r
        return s * proj[k]

    # Bianchi
    for (a, b, c, d) in ((0, 1, 2, 3), (0, 1, 2, 0), (1, 2, 3, 1)):
        assert comp(a, b, c, d) + comp(b, c, a, d) + comp(c, a, b, d) == 0
    # trace
    for b in range(dim):
        for d in range(dim):
            assert sum(comp(a, b, a, d) for a in range(dim)) == 0
    # projection is idempotent
    _, proj2 = sp.project_coords(proj)
    assert proj2 == proj
