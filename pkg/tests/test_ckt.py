import random

import pytest

from tractor_symm.scalars import Q
from tractor_symm.poly import Poly
from tractor_symm.tensor import Metric, SymTensor, trace
from tractor_symm.tractor import nabla, TractorField, SlotKind, contract, double_D
from tractor_symm import ckt
from tractor_symm.ckt import CKTLabel, weyl_dim, ckt_apply, grad_sym0

from conftest import solved_basis, random_poly


MET = Metric.euclidean(3)
N = 3


@pytest.mark.parametrize("label,dim", [
    ((0, 0), 1), ((1, 0), 10), ((2, 0), 35), ((0, 1), 14), ((1, 1), 81)])
def test_dimensions_n3(label, dim):
    assert weyl_dim(3, *label) == dim
    assert len(solved_basis(3, *label)) == dim


def test_killing_field_is_solution():
    # rotation generator x^1 e_2 - x^2 e_1 satisfies the p=1, r=0 equation
    phi = SymTensor(MET, 1, {(0,): Poly.var(N, 1),
                             (1,): Poly.var(N, 0).scale(-1)}, weight=2)
    assert ckt_apply(phi, 0).is_zero()


def test_nonsolution_detected():
    phi = SymTensor(MET, 1, {(0,): Poly.var(N, 0) * Poly.var(N, 0)},
                    weight=2)
    assert not ckt_apply(phi, 0).is_zero()


def test_solutions_satisfy_equation():
    for (p, r) in ((1, 0), (0, 1)):
        for phi in solved_basis(3, p, r):
            assert ckt_apply(phi, r).is_zero()


def test_grad_sym0_tracefree(rng):
    phi = SymTensor(MET, 0, {(): random_poly(N, 4, rng)})
    out = grad_sym0(phi, 2)
    assert trace(out).is_zero()


def test_split_is_parallel_and_projects_back():
    for (p, r) in ((1, 0), (0, 1)):
        label = CKTLabel(p, r)
        for phi in solved_basis(3, p, r)[:4]:
            I = ckt.split(phi, label)
            assert nabla(I).is_zero()
            assert ckt.extract(I, label) == phi


def test_lie_derivative_matches_transport(rng):
    # I_phi-contraction of the double-D is the Lie derivative on densities
    for w in (Q(2), Q(-1, 2)):
        for phi in solved_basis(3, 1, 0):
            I = ckt.split(phi, CKTLabel(1, 0))
            f = TractorField.density(MET, w, random_poly(N, 3, rng))
            assert contract(I, double_D(f)) == ckt.lie_derivative(
                phi, f, adj=I)


def test_lie_derivative_on_covectors(rng):
    for w in (Q(0), Q(2)):
        for phi in solved_basis(3, 1, 0):
            I = ckt.split(phi, CKTLabel(1, 0))
            fld = TractorField(MET, w, (SlotKind.VEC,))
            for a in range(N):
                fld.add_to((a,), random_poly(N, 2, rng))
            assert contract(I, double_D(fld)) == ckt.lie_derivative(
                phi, fld, adj=I)


def test_lie_derivative_rejects_tractor_slots():
    phi = solved_basis(3, 1, 0)[0]
    fld = TractorField(MET, Q(0), (SlotKind.STD,), {(0,): 1})
    with pytest.raises(ValueError):
        ckt.lie_derivative(phi, fld)


def test_dimension_n4():
    assert len(solved_basis(4, 1, 0)) == weyl_dim(4, 1, 0)
