"""Canonical symmetries of Laplacian powers and their classification.

A canonical symmetry is built from a parallel splitting tractor I by
applying r symmetrized-square double-D operators followed by p double-D
operators to a weighted density and contracting every slot with I.  The
module verifies the intertwining identity Delta^k S = S' Delta^k
exactly, checks the structural properties of the resulting standard
forms, and provides the classification machinery: the combinatorial
C-matrices, their regularity (with the full column/row reduction chain),
the constraint matrices extracted from symbolic composition, and the
greedy classification of an arbitrary symmetry into canonical pieces
plus a trivial tail.
"""

import random
import time
from math import factorial

from .scalars import Q, ZERO, ONE, binom
from .poly import Poly, monomials_up_to_degree
from .tensor import (Metric, SymTensor, multisets, orderings,
                     random_tracefree)
from .diffop import StdOp, OpType, reconstruct, compose_raw
from .tractor import (TractorField, nabla, laplacian, laplacian_power,
                      tractor_D, double_D, double_D2, fund_D, fund_D2,
                      x_mult, contract, permute_slots, hmat, pair_space)
from .linalg import ExactMatrix, det
from . import ckt
from .ckt import CKTLabel, CKTError, grad_sym0


class CanonicalSymmetry:
    """Operator f -> I . (double-D)^p (double-D^2)^r f on densities."""

    def __init__(self, I, label, weight, use_fund=False):
        self.I = I
        self.label = CKTLabel(*label)
        self.metric = I.metric
        self.weight = Q(weight)
        self.use_fund = use_fund
        self._std = None

    @property
    def order(self):
        return self.label.p + 2 * self.label.r

    def apply(self, f):
        p, r = self.label
        t = TractorField.density(self.metric, self.weight, f)
        sq = fund_D2 if self.use_fund else double_D2
        first = fund_D if self.use_fund else double_D
        for _ in range(r):
            t = sq(t)
        for _ in range(p):
            t = first(t)
        return contract(self.I, t).get(())

    __call__ = apply

    def std_op(self):
        if self._std is None:
            self._std = reconstruct(self.apply, self.metric, self.order)
        return self._std


def build_S(I, label, weight, use_fund=False, check_parallel=True):
    """Canonical symmetry from a parallel splitting tractor."""
    label = CKTLabel(*label)
    expected = ckt._shape_slots(label)
    if I.slots != expected:
        raise ValueError(f"splitting tractor has slots {I.slots}, "
                         f"label {label} needs {expected}")
    if check_parallel and not nabla(I).is_zero():
        raise ValueError("splitting tractor must be parallel")
    return CanonicalSymmetry(I, label, weight, use_fund=use_fund)


class SymmetryReport:
    """Outcome of an intertwining check Delta^k S = S' Delta^k."""

    def __init__(self, k, label, w_in, w_out, residual, S_std, Sp_std,
                 elapsed, trivial):
        self.k = k
        self.label = label
        self.w_in = w_in
        self.w_out = w_out
        self.residual = residual
        self.S_std = S_std
        self.Sp_std = Sp_std
        self.elapsed = elapsed
        self.trivial = trivial
        self.verdict = residual.is_zero()

    def to_dict(self):
        metric = self.residual.metric
        res = [{"p": t.p, "r": t.r} for t in self.residual.types()
               if not self.residual.terms[t].is_zero()]
        return {"n": metric.n, "signature": list(metric.signature),
                "k": self.k, "label": list(self.label),
                "verdict": "pass" if self.verdict else "fail",
                "trivial": self.trivial,
                "residual_terms": res,
                "elapsed": round(self.elapsed, 3)}


def verify_symmetry(phi, label, k):
    """Check Delta^k S_phi = S'_phi Delta^k exactly, in standard form."""
    label = CKTLabel(*label)
    metric = phi.metric
    n = metric.n
    w_in = Q(2 * k - n, 2)
    w_out = Q(-2 * k - n, 2)
    t0 = time.time()
    I = ckt.split(phi, label)
    S = build_S(I, label, w_in, check_parallel=False)
    Sp = build_S(I, label, w_out, check_parallel=False)
    S_std = S.std_op()
    Sp_std = Sp.std_op()
    lapk = StdOp.laplacian_power(metric, k)
    residual = lapk.compose(S_std) - Sp_std.compose(lapk)
    return SymmetryReport(k, label, w_in, w_out, residual, S_std, Sp_std,
                          time.time() - t0, trivial=(label.r >= k))


def leading_checks(report, phi):
    """Structural checks on the standard forms of S and S'.

    (i) the leading coefficient of both operators equals phi;
    (ii) every term has level at most p+r and the greatest term is phi;
    (iii) every term has order at most p+2r, with equality only at the
    leading type; (iv) no term carries more than r Laplacians.
    """
    p, r = report.label
    lead = OpType(p, r)
    out = {}
    out["leading_is_phi"] = (report.S_std.coeff(p, r) == phi
                             and report.Sp_std.coeff(p, r) == phi)
    checks = {"level_bound": True, "order_bound": True,
              "delta_power_bound": True}
    for op in (report.S_std, report.Sp_std):
        live = [t for t in op.types() if not op.terms[t].is_zero()]
        if not all(t.level <= p + r for t in live) or \
                op.greatest_term() != lead:
            checks["level_bound"] = False
        if not all(t.order <= p + 2 * r and
                   (t.order < p + 2 * r or t == lead) for t in live):
            checks["order_bound"] = False
        if not all(t.r <= r for t in live):
            checks["delta_power_bound"] = False
    out.update(checks)
    out["all"] = all(out.values())
    return out


def verify_commute_doubleD(metric, k, p=1, max_degree=4):
    """Coupled Delta^k commutes with a string of p double-D operators."""
    n = metric.n
    w = Q(2 * k - n, 2)
    for e in monomials_up_to_degree(n, max_degree):
        f = TractorField.density(metric, w, Poly.monomial(n, e))
        lhs = f
        for _ in range(p):
            lhs = double_D(lhs)
        lhs = laplacian_power(lhs, k).with_weight(w - 2 * k)
        rhs = laplacian_power(f, k).with_weight(w - 2 * k)
        for _ in range(p):
            rhs = double_D(rhs)
        if lhs != rhs:
            return False
    return True


def verify_fund_equals_double(phi, label, weight, max_degree=4):
    """The double-D and fundamental-derivative forms of S agree."""
    label = CKTLabel(*label)
    metric = phi.metric
    I = ckt.split(phi, label)
    S1 = build_S(I, label, weight, use_fund=False, check_parallel=False)
    S2 = build_S(I, label, weight, use_fund=True, check_parallel=False)
    for e in monomials_up_to_degree(metric.n, max_degree):
        m = Poly.monomial(metric.n, e)
        if S1(m) != S2(m):
            return False
    return True


def gjms_factorization_check(metric, k, max_degree=4):
    """(-1)^k X..X Delta^k = D..D on weight k - n/2 densities."""
    n = metric.n
    w = Q(2 * k - n, 2)
    for e in monomials_up_to_degree(n, max_degree):
        f = TractorField.density(metric, w, Poly.monomial(n, e))
        lhs = f
        for _ in range(k):
            lhs = laplacian(lhs).with_weight(lhs.weight - 2)
        for _ in range(k):
            lhs = x_mult(lhs)
        lhs = lhs.scale(Q(-1) ** k)
        rhs = f
        for _ in range(k):
            rhs = tractor_D(rhs)
        if lhs != rhs:
            return False
    return True


# ----------------------------------------------------------------------
# C-matrices and their regularity
# ----------------------------------------------------------------------

def c_scalar(s, k):
    """C^s(k) = 2^s binomial(k, s); zero outside 0 <= s <= k."""
    if s < 0 or s > k:
        return ZERO
    return Q(2) ** s * binom(k, s)


def c_matrix(k, d):
    """The (k-d) x (k-d) matrix with entries C^{k-d+s-t}(k)."""
    if not 0 <= d <= k - 1:
        raise ValueError("need 0 <= d <= k-1")
    m = k - d
    return ExactMatrix([[c_scalar(m + s - t, k) for t in range(m)]
                        for s in range(m)])


def regularity(k, d):
    """Exact invertibility of the C-matrix."""
    return c_matrix(k, d).det() != ZERO


def reduction_chain(k, d):
    """Column/row reduction of the binomial companion of the C-matrix.

    Performs the elementary-operation stages explicitly, asserting the
    closed forms of the three intermediate matrices and the final unit
    upper triangular shape, and audits the determinant through every
    stage.  Returns the four matrices and the determinant bookkeeping.
    """
    if not 0 <= d <= k - 1:
        raise ValueError("need 0 <= d <= k-1")
    kd = k - d
    # companion matrix: entries binom(k, kd+s-t), differing from the
    # C-matrix entries by the power 2^{kd+s-t}
    Ct = [[binom(k, kd + s - t) for t in range(kd)] for s in range(kd)]
    det_tilde = det(Ct)
    detC = c_matrix(k, d).det()
    assert detC == Q(2) ** (kd * kd) * det_tilde

    M = [row[:] for row in Ct]
    # stage 1: repeated right-to-left column additions
    for step in range(1, kd):
        for t in range(kd - step):
            for s in range(kd):
                M[s][t] += M[s][t + 1]
    D1 = [row[:] for row in M]
    for s in range(kd):
        for t in range(kd):
            assert D1[s][t] == binom(k + kd - t - 1, kd + s - t)

    # stage 2: column then row scalings
    mult = ONE
    for t in range(kd):
        c = Q(1, factorial(k + kd - t - 1))
        mult *= c
        for s in range(kd):
            M[s][t] *= c
    for s in range(kd):
        c = Q(factorial(k - s - 1))
        mult *= c
        for t in range(kd):
            M[s][t] *= c
    D2 = [row[:] for row in M]
    for s in range(kd):
        for t in range(kd):
            assert D2[s][t] == Q(1, factorial(kd + s - t))

    # stage 3: row then column scalings
    for s in range(kd):
        c = Q(factorial(kd + s))
        mult *= c
        for t in range(kd):
            M[s][t] *= c
    for t in range(kd):
        c = Q(1, factorial(t))
        mult *= c
        for s in range(kd):
            M[s][t] *= c
    D3 = [row[:] for row in M]
    for s in range(kd):
        for t in range(kd):
            assert D3[s][t] == binom(kd + s, kd + s - t)

    # stage 4: upward row subtractions
    for step in range(1, kd):
        for s in range(kd - 1, step - 1, -1):
            M[s] = [a - b for a, b in zip(M[s], M[s - 1])]
    D4 = [row[:] for row in M]
    for s in range(kd):
        assert D4[s][s] == ONE
        for t in range(s):
            assert D4[s][t] == ZERO
    # additions and subtractions preserve the determinant; scalings
    # multiply it by the recorded factor
    assert det_tilde * mult == det(D4) == ONE
    return {"D1": ExactMatrix(D1), "D2": ExactMatrix(D2),
            "D3": ExactMatrix(D3), "D4": ExactMatrix(D4),
            "det": detC, "det_companion": det_tilde,
            "power_of_two": kd * kd}


# ----------------------------------------------------------------------
# constraint matrix of the classification argument
# ----------------------------------------------------------------------

def _xi_poly(coeff, rdeg, metric):
    """Symbol of coeff . nabla^rank Delta^rdeg as a covector polynomial.

    Returned as a dict mapping exponent tuples of the covector variables
    to Poly coefficients in the base variables.
    """
    n = metric.n
    base = {}
    for m, ph in coeff.comps.items():
        eps = ONE
        e = [0] * n
        for a in m:
            eps *= metric.eps[a]
            e[a] += 1
        base[tuple(e)] = ph.scale(eps * len(orderings(m)))
    for _ in range(rdeg):
        nxt = {}
        for e, c in base.items():
            for i in range(n):
                e2 = list(e)
                e2[i] += 2
                e2 = tuple(e2)
                v = c.scale(metric.eps[i])
                cur = nxt.get(e2)
                nxt[e2] = v if cur is None else cur + v
        base = nxt
    return {e: c for e, c in base.items() if not c.is_zero()}


def _xi_laplacian(d, metric):
    n = metric.n
    out = {}
    for e, c in d.items():
        for i in range(n):
            if e[i] >= 2:
                e2 = list(e)
                e2[i] -= 2
                e2 = tuple(e2)
                v = c.scale(metric.eps[i] * e[i] * (e[i] - 1))
                cur = out.get(e2)
                out[e2] = v if cur is None else cur + v
    return {e: c for e, c in out.items() if not c.is_zero()}


def _xi_reduce(d, metric):
    """Reduce a covector polynomial modulo the quadric sum eps_i xi_i^2."""
    n = metric.n
    out = {}
    work = list(d.items())
    while work:
        e, c = work.pop()
        if e[0] >= 2:
            for i in range(1, n):
                e2 = list(e)
                e2[0] -= 2
                e2[i] += 2
                work.append((tuple(e2),
                             c.scale(-metric.eps[0] * metric.eps[i])))
        else:
            cur = out.get(e)
            s = c if cur is None else cur + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
    return out


def _xi_scale(d, c):
    return {e: p.scale(c) for e, p in d.items()}


def _xi_eq(d1, d2):
    keys = set(d1) | set(d2)
    z = None
    for e in keys:
        a = d1.get(e)
        b = d2.get(e)
        if a is None:
            if not b.is_zero():
                return False
        elif b is None:
            if not a.is_zero():
                return False
        elif a != b:
            return False
    return True


def extract_constraint_matrix(k, p, r, metric=None, seed=0):
    """Coefficient matrix of the leading-level symmetry constraints.

    Composes Delta^k with each single level-(p+r) term built on a random
    trace-free coefficient and reads off, for every target type of level
    p+r+k, the scalar relating the resulting coefficient to the
    trace-free symmetrized gradient of the input.  The matrix is
    asserted to equal the C-matrix with d = k-r-1.
    """
    if not 0 <= r < k:
        raise ValueError("need 0 <= r < k")
    if metric is None:
        metric = Metric.euclidean(3)
    n = metric.n
    rng = random.Random(seed)
    rawL = StdOp.laplacian_power(metric, k).to_raw()
    mat = [[None] * (r + 1) for _ in range(r + 1)]
    for q2 in range(r + 1):
        rank = p + q2
        rdeg = r - q2
        phi = random_tracefree(metric, rank, 2 * r + 2, rng)
        raw = compose_raw(rawL, StdOp.from_coeff(phi, rdeg).to_raw())
        for q in range(r + 1):
            R = k - q - 1
            s = r + q - q2 + 1
            o = p + r + 2 * k - q - 1
            part = {a: c for a, c in raw.items() if sum(a) == o}
            for _ in range(R):
                part = _xi_laplacian(part, metric)
            lhs = _xi_reduce(part, metric)
            oracle = grad_sym0(phi, s)
            if oracle.is_zero():
                raise CKTError("degenerate sample; re-run with a new seed")
            probe = _xi_poly(oracle, R, metric)
            for _ in range(R):
                probe = _xi_laplacian(probe, metric)
            probe = _xi_reduce(probe, metric)
            # lhs must be an exact scalar multiple of the probe
            a = ZERO
            for e, c in probe.items():
                for mono, cc in c.terms.items():
                    a = lhs.get(e, Poly.zero(n)).coeff(mono) / cc
                    break
                break
            if not _xi_eq(lhs, _xi_scale(probe, a)):
                raise CKTError("constraint coefficient is not scalar")
            assert a == c_scalar(r + q - q2 + 1, k)
            mat[q][q2] = a
    out = ExactMatrix(mat)
    assert out == c_matrix(k, k - r - 1)
    return out


# ----------------------------------------------------------------------
# classification
# ----------------------------------------------------------------------

class ClassificationError(Exception):
    """Raised when the input operator is not a symmetry."""


def classify(op, k):
    """Decompose a symmetry of Delta^k into canonical pieces.

    Terms with at least k Laplacians are moved to a trivial right-factor
    tail first.  The remainder is consumed greedily: the greatest term's
    coefficient must solve its defining equation (otherwise the operator
    is rejected), and subtracting the matching canonical symmetry
    strictly lowers the greatest term.

    Returns (pieces, tail) where pieces is a list of (label, phi) and
    tail is a StdOp T such that op = sum of canonical symmetries + T
    composed with Delta^k.
    """
    metric = op.metric
    n = metric.n
    w = Q(2 * k - n, 2)
    tail = StdOp.zero(metric)
    pieces = []
    residual = op
    while not residual.is_zero():
        t = residual.greatest_term()
        phi = residual.coeff(*t)
        if t.r >= k:
            # phi nabla^p Delta^r = (phi nabla^p Delta^{r-k}) Delta^k
            g = StdOp.from_coeff(phi, t.r - k)
            tail = tail + g
            residual = residual - StdOp.from_coeff(phi, t.r)
            continue
        label = CKTLabel(t.p, t.r)
        viol = ckt.ckt_apply(phi, t.r)
        if not viol.is_zero():
            raise ClassificationError(
                f"greatest term {t!r} violates its defining equation; "
                "not a symmetry")
        I = ckt.split(phi, label)
        S = build_S(I, label, w, check_parallel=False)
        residual = residual - S.std_op()
        nt = residual.greatest_term()
        assert nt is None or nt.sort_key() < t.sort_key()
        pieces.append((label, phi))
    return pieces, tail
