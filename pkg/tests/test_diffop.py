import random

from hypothesis import given, settings, strategies as st

from tractor_symm.scalars import Q
from tractor_symm.poly import Poly, monomials_up_to_degree
from tractor_symm.tensor import Metric, SymTensor, random_tracefree
from tractor_symm.diffop import StdOp, OpType, normalize_raw, reconstruct


MET = Metric.euclidean(3)


def test_type_ordering():
    # ordered by (level, order)
    assert OpType(1, 1).sort_key() < OpType(0, 2).sort_key()
    assert OpType(3, 0).sort_key() < OpType(1, 2).sort_key()
    assert OpType(2, 1).order == 4 and OpType(2, 1).level == 3


def test_laplacian_on_monomials():
    lap = StdOp.laplacian_power(MET, 1)
    x1sq = Poly.monomial(3, (0, 2, 0))
    assert lap(x1sq) == Poly.const(3, 2)
    assert lap(Poly.monomial(3, (1, 1, 0))).is_zero()


def test_apply_matches_raw():
    rng = random.Random(2)
    phi = random_tracefree(MET, 2, 1, rng)
    op = StdOp.from_coeff(phi, 1)
    raw = op.to_raw()
    f = Poly(3, {e: Q(rng.randint(-3, 3))
                 for e in monomials_up_to_degree(3, 4)})
    direct = op(f)
    via_raw = Poly.zero(3)
    for alpha, c in raw.items():
        via_raw = via_raw + c * f.diff_multi(alpha)
    assert direct == via_raw


def test_normalize_roundtrip():
    rng = random.Random(4)
    phi = random_tracefree(MET, 2, 2, rng)
    op = StdOp.from_coeff(phi, 1) + StdOp.laplacian_power(MET, 2)
    assert normalize_raw(op.to_raw(), MET) == op


def test_compose_is_composition():
    rng = random.Random(9)
    a = StdOp.from_coeff(random_tracefree(MET, 1, 1, rng), 0)
    b = StdOp.from_coeff(random_tracefree(MET, 1, 2, rng), 1)
    ab = a.compose(b)
    for e in monomials_up_to_degree(3, 4):
        f = Poly.monomial(3, e)
        assert ab(f) == a(b(f))


def test_reconstruct():
    rng = random.Random(6)
    op = (StdOp.from_coeff(random_tracefree(MET, 2, 1, rng), 0)
          + StdOp.laplacian_power(MET, 1))
    got = reconstruct(op.apply, MET, op.max_order())
    assert got == op


def test_serialization_roundtrip():
    rng = random.Random(8)
    op = StdOp.from_coeff(random_tracefree(MET, 2, 2, rng), 1)
    assert StdOp.from_dict(op.to_dict()) == op


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_compose_associative_on_action(seed):
    rng = random.Random(seed)
    a = StdOp.from_coeff(random_tracefree(MET, 1, 1, rng), 0)
    sig = Poly(3, {e: Q(rng.randint(-2, 2))
                   for e in monomials_up_to_degree(3, 2)})
    b = StdOp.from_coeff(SymTensor(MET, 0, {(): sig}), 1)
    ab = a.compose(b)
    ba = b.compose(a)
    f = Poly(3, {e: Q(rng.randint(-2, 2))
                 for e in monomials_up_to_degree(3, 3)})
    assert ab(f) == a(b(f))
    assert ba(f) == b(a(f))
