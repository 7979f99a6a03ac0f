"""Symmetric tensors, trace decompositions and the (2,2) Young projector.

Tensors live over a flat diagonal metric of signature (s, s').  Symmetric
tensors are stored on sorted index multisets.  The trace-free projection
is computed by solving the linear system for the decomposition

    S = S0 + g . U1 + g^2 . U2 + ...   (all pieces trace-free)

exactly; the solving matrix is cached per (signature, rank).

The (2,2) trace-free projector works for an arbitrary symmetric metric
matrix (it is reused for the tractor metric h): four-index tensors are
compressed to coordinates on Sym^2(Lambda^2), the admissible subspace is
cut out by the first-Bianchi and trace constraints, and projection is
orthogonal with respect to the metric-induced pairing.
"""

from functools import lru_cache
from itertools import combinations_with_replacement, permutations

from .scalars import Q, ZERO, ONE
from . import linalg
from .poly import Poly


class Metric:
    """Flat diagonal metric of signature (s, s'): s pluses then s' minuses."""

    def __init__(self, s, sp):
        assert s >= 0 and sp >= 0 and s + sp >= 1
        self.s = s
        self.sp = sp
        self.n = s + sp
        self.eps = tuple([ONE] * s + [-ONE] * sp)

    @classmethod
    def euclidean(cls, n):
        return cls(n, 0)

    @property
    def signature(self):
        return (self.s, self.sp)

    def g(self, a, b):
        return self.eps[a] if a == b else ZERO

    def ginv(self, a, b):
        return self.g(a, b)  # diagonal +-1 is its own inverse

    def key(self):
        return (self.s, self.sp)

    def __eq__(self, other):
        return isinstance(other, Metric) and self.key() == other.key()

    def __repr__(self):
        return f"Metric(signature=({self.s},{self.sp}))"


def multisets(n, p):
    """Sorted index multisets of size p over range(n)."""
    return list(combinations_with_replacement(range(n), p))


def orderings(m):
    """Distinct orderings of a multiset tuple."""
    return sorted(set(permutations(m)))


class SymTensor:
    """Totally symmetric tensor with polynomial components.

    Components are indexed by sorted multisets of base indices (lower
    indices).  ``weight`` records the conformal weight of the section it
    represents; it is bookkeeping only and does not affect the algebra.
    """

    def __init__(self, metric, rank, comps=None, weight=0):
        self.metric = metric
        self.rank = rank
        self.weight = Q(weight)
        self.comps = {}
        if comps:
            for m, p in comps.items():
                m = tuple(sorted(m))
                if isinstance(p, Poly):
                    if not p.is_zero():
                        self.comps[m] = p
                else:
                    p = Poly.const(metric.n, p)
                    if not p.is_zero():
                        self.comps[m] = p

    @classmethod
    def zero(cls, metric, rank, weight=0):
        return cls(metric, rank, weight=weight)

    def get(self, idx):
        key = tuple(sorted(idx))
        return self.comps.get(key, Poly.zero(self.metric.n))

    def set(self, idx, p):
        key = tuple(sorted(idx))
        if isinstance(p, Poly) and not p.is_zero():
            self.comps[key] = p
        else:
            self.comps.pop(key, None)

    def add_to(self, idx, p):
        key = tuple(sorted(idx))
        cur = self.comps.get(key)
        s = p if cur is None else cur + p
        if s.is_zero():
            self.comps.pop(key, None)
        else:
            self.comps[key] = s

    def is_zero(self):
        return all(p.is_zero() for p in self.comps.values())

    def __add__(self, other):
        assert self.rank == other.rank
        out = SymTensor(self.metric, self.rank, weight=self.weight)
        out.comps = dict(self.comps)
        for m, p in other.comps.items():
            out.add_to(m, p)
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        out = SymTensor(self.metric, self.rank, weight=self.weight)
        for m, p in self.comps.items():
            q = p.scale(c)
            if not q.is_zero():
                out.comps[m] = q
        return out

    def map_components(self, f):
        out = SymTensor(self.metric, self.rank, weight=self.weight)
        for m, p in self.comps.items():
            q = f(p)
            if not q.is_zero():
                out.comps[m] = q
        return out

    def __eq__(self, other):
        if not isinstance(other, SymTensor):
            return NotImplemented
        if self.rank != other.rank:
            return False
        keys = set(self.comps) | set(other.comps)
        return all(self.get(k) == other.get(k) for k in keys)

    def max_degree(self):
        return max((p.degree() for p in self.comps.values()), default=-1)

    def __repr__(self):
        body = ", ".join(f"{m}: {p}" for m, p in sorted(self.comps.items()))
        return f"SymTensor(rank={self.rank}, {{{body}}})"


def sym_part(dense, rank, metric, weight=0):
    """Symmetrize a dense tensor (dict full-index-tuple -> Poly)."""
    out = SymTensor(metric, rank, weight=weight)
    if rank == 0:
        for _, p in dense.items():
            out.add_to((), p)
        return out
    buckets = {}
    for idx, p in dense.items():
        buckets.setdefault(tuple(sorted(idx)), []).append((idx, p))
    for m, items in buckets.items():
        ords = orderings(m)
        vals = {o: Poly.zero(metric.n) for o in ords}
        for idx, p in items:
            vals[idx] = vals[idx] + p
        total = Poly.zero(metric.n)
        for o in ords:
            total = total + vals[o]
        out.add_to(m, total.scale(Q(1, len(ords))))
    return out


def trace(t, metric=None):
    """Contract two symmetric slots with the inverse metric."""
    metric = metric or t.metric
    assert t.rank >= 2
    out = SymTensor(metric, t.rank - 2, weight=t.weight)
    for m in multisets(metric.n, t.rank - 2):
        total = Poly.zero(metric.n)
        for a in range(metric.n):
            total = total + t.get(m + (a, a)).scale(metric.eps[a])
        if not total.is_zero():
            out.comps[m] = total
    return out


def g_odot(t, metric=None):
    """Symmetrized product g . t (rank goes up by two)."""
    metric = metric or t.metric
    out = SymTensor(metric, t.rank + 2, weight=t.weight)
    for m in multisets(metric.n, t.rank + 2):
        ords = orderings(m)
        total = Poly.zero(metric.n)
        for o in ords:
            if o[0] == o[1]:
                total = total + t.get(o[2:]).scale(metric.eps[o[0]])
        if not total.is_zero():
            out.comps[m] = total.scale(Q(1, len(ords)))
    return out


def _g_power_embed_matrix(metric, p, q):
    """Matrix of U -> g^q . U from rank p-2q multisets to rank p multisets."""
    n = metric.n
    rows_idx = multisets(n, p)
    cols_idx = multisets(n, p - 2 * q)
    col_pos = {m: j for j, m in enumerate(cols_idx)}
    mat = [[ZERO] * len(cols_idx) for _ in rows_idx]
    for i, m in enumerate(rows_idx):
        ords = orderings(m)
        w = Q(1, len(ords))
        for o in ords:
            coeff = ONE
            ok = True
            for t in range(q):
                a, b = o[2 * t], o[2 * t + 1]
                if a != b:
                    ok = False
                    break
                coeff *= metric.eps[a]
            if ok:
                j = col_pos[tuple(sorted(o[2 * q:]))]
                mat[i][j] += coeff * w
    return mat


def _trace_matrix(metric, p):
    """Matrix of the trace map on rank-p symmetric tensors."""
    n = metric.n
    rows_idx = multisets(n, p - 2)
    cols_idx = multisets(n, p)
    col_pos = {m: j for j, m in enumerate(cols_idx)}
    mat = [[ZERO] * len(cols_idx) for _ in rows_idx]
    for i, m in enumerate(rows_idx):
        for a in range(n):
            mat[i][col_pos[tuple(sorted(m + (a, a)))]] += metric.eps[a]
    return mat


@lru_cache(maxsize=None)
def _trace_decomp_solver(sig, p):
    """Cached linear maps for the trace decomposition at rank p.

    Returns (ranks, blocks) where blocks[q] is the matrix taking the
    component vector of a rank-p symmetric tensor to the component vector
    of the trace-free piece U_q of rank p - 2q.
    """
    metric = Metric(*sig)
    n = metric.n
    qmax = p // 2
    col_ranks = [p - 2 * q for q in range(qmax + 1)]
    col_sizes = [len(multisets(n, r)) for r in col_ranks]
    offsets = [0]
    for s in col_sizes:
        offsets.append(offsets[-1] + s)
    nunk = offsets[-1]
    nval = len(multisets(n, p))
    rows = []
    # value equations: sum_q g^q . U_q = S
    embeds = [_g_power_embed_matrix(metric, p, q) for q in range(qmax + 1)]
    for i in range(nval):
        row = [ZERO] * nunk
        for q in range(qmax + 1):
            for j in range(col_sizes[q]):
                row[offsets[q] + j] = embeds[q][i][j]
        rows.append(row)
    rhs = [[ONE if j == i else ZERO for j in range(nval)] for i in range(nval)]
    # trace conditions on each U_q
    for q in range(qmax + 1):
        r = col_ranks[q]
        if r < 2:
            continue
        tm = _trace_matrix(metric, r)
        for trow in tm:
            row = [ZERO] * nunk
            for j, v in enumerate(trow):
                row[offsets[q] + j] = v
            rows.append(row)
            rhs.append([ZERO] * nval)
    sol = linalg.solve(rows, rhs)  # nunk x nval
    if linalg.rank(rows) != nunk:
        raise linalg.LinAlgError("trace decomposition is not unique")
    blocks = []
    for q in range(qmax + 1):
        blocks.append(sol[offsets[q]:offsets[q + 1]])
    return col_ranks, blocks


def decompose_traces(t):
    """Full decomposition S = S0 + g.U1 + g^2.U2 + ...; returns [S0, U1, ...]."""
    metric = t.metric
    p = t.rank
    if p < 2:
        return [t]
    ranks, blocks = _trace_decomp_solver(metric.key(), p)
    src = multisets(metric.n, p)
    vec = [t.get(m) for m in src]
    out = []
    for q, r in enumerate(ranks):
        tgt = multisets(metric.n, r)
        u = SymTensor(metric, r, weight=t.weight)
        for i, m in enumerate(tgt):
            acc = Poly.zero(metric.n)
            for j, pj in enumerate(vec):
                c = blocks[q][i][j]
                if c and not pj.is_zero():
                    acc = acc + pj.scale(c)
            if not acc.is_zero():
                u.comps[m] = acc
        out.append(u)
    return out


def trace_free(t):
    """Trace-free part of a symmetric tensor."""
    return decompose_traces(t)[0]


def random_tracefree(metric, rank, degree, rng, weight=0):
    """Random trace-free symmetric tensor with polynomial entries."""
    t = SymTensor(metric, rank, weight=weight)
    from .poly import monomials_up_to_degree
    for m in multisets(metric.n, rank):
        terms = {e: Q(rng.randint(-9, 9))
                 for e in monomials_up_to_degree(metric.n, degree)}
        t.comps[m] = Poly(metric.n, terms)
    return trace_free(t)


# ----------------------------------------------------------------------
# (2,2) trace-free Young projection
# ----------------------------------------------------------------------

class PairSpace:
    """Index bookkeeping for two-form pairs over a dimension-N space."""

    def __init__(self, dim):
        self.dim = dim
        self.pairs = [(a, b) for a in range(dim) for b in range(a + 1, dim)]
        self.index = {p: i for i, p in enumerate(self.pairs)}

    def npairs(self):
        return len(self.pairs)

    def sign_index(self, a, b):
        """(pair index, sign) for an arbitrary ordered pair; None if a == b."""
        if a == b:
            return None
        if a < b:
            return self.index[(a, b)], 1
        return self.index[(b, a)], -1


class Young22:
    """Projector onto the trace-free (2,2) component of 4-index tensors.

    ``hmat`` is the (symmetric, invertible) metric matrix used both for
    the trace conditions and for the orthogonal projection.  Instances
    are cached via :func:`young22_space`.
    """

    def __init__(self, dim, hmat):
        self.dim = dim
        self.h = [[Q(x) for x in row] for row in hmat]
        self.ps = PairSpace(dim)
        P = self.ps.npairs()
        # coordinates on Sym^2(Lambda^2): unordered pairs of pair indices
        self.coords = [(i, j) for i in range(P) for j in range(i, P)]
        self.coord_index = {c: k for k, c in enumerate(self.coords)}
        self._build_kernel()
        self._build_gram()

    # coordinate c represents the value G_{[AB][CD]} with pair indices i<=j
    def coord_of(self, a, b, c, d):
        """(coord index, sign) of G_{abcd}; None if it vanishes by skewness."""
        s1 = self.ps.sign_index(a, b)
        s2 = self.ps.sign_index(c, d)
        if s1 is None or s2 is None:
            return None
        (i, sa), (j, sb) = s1, s2
        if i > j:
            i, j = j, i
        return self.coord_index[(i, j)], sa * sb

    def _build_kernel(self):
        dim, nc = self.dim, len(self.coords)
        rows = []

        def add_row(entries):
            row = {}
            for (a, b, c, d), coeff in entries:
                r = self.coord_of(a, b, c, d)
                if r is not None:
                    k, s = r
                    row[k] = row.get(k, ZERO) + coeff * s
            row = {k: v for k, v in row.items() if v}
            if row:
                rows.append([row.get(k, ZERO) for k in range(nc)])

        # first Bianchi: cyclic sum over the first three slots
        for (a, b, c) in combinations_with_replacement(range(dim), 3):
            if len({a, b, c}) < 3:
                continue
            for d in range(dim):
                add_row([((a, b, c, d), ONE), ((b, c, a, d), ONE),
                         ((c, a, b, d), ONE)])
        # h-trace over slots 0 and 2
        for b in range(dim):
            for d in range(b, dim):
                entries = []
                for a in range(dim):
                    for c in range(dim):
                        hv = self.h[a][c]
                        if hv:
                            entries.append(((a, b, c, d), hv))
                add_row(entries)
        self.kernel_basis = linalg.kernel(rows, nc) if rows else [
            [ONE if j == i else ZERO for j in range(nc)] for i in range(nc)]

    def _pair_metric(self):
        """W[p][q] = full-index Lambda^2 pairing of unit pair coordinates."""
        ps, h = self.ps, self.h
        P = ps.npairs()
        W = [[ZERO] * P for _ in range(P)]
        for i, (a, b) in enumerate(ps.pairs):
            for j, (c, d) in enumerate(ps.pairs):
                W[i][j] = 2 * (h[a][c] * h[b][d] - h[a][d] * h[b][c])
        return W

    def _coord_weights(self):
        """Full-contraction pairing matrix on Sym^2(Lambda^2) coordinates.

        Coordinate (i,j) with i<j stands for both ordered pair-pairs
        (i,j) and (j,i), hence the multiplicity factors.
        """
        if not hasattr(self, "_cw"):
            W = self._pair_metric()
            nc = len(self.coords)
            cw = [[ZERO] * nc for _ in range(nc)]
            for k, (i, j) in enumerate(self.coords):
                mk = 2 if i != j else 1
                for l, (i2, j2) in enumerate(self.coords):
                    ml = 2 if i2 != j2 else 1
                    s = W[i][i2] * W[j][j2] + W[i][j2] * W[j][i2]
                    if s:
                        cw[k][l] = Q(mk * ml, 2) * s
            self._cw = cw
        return self._cw

    def _build_gram(self):
        cw = self._coord_weights()

        def inner(u, v):
            total = ZERO
            for k, uk in enumerate(u):
                if not uk:
                    continue
                rowk = cw[k]
                for l, vl in enumerate(v):
                    if vl and rowk[l]:
                        total += uk * vl * rowk[l]
            return total

        B = self.kernel_basis
        self.gram = [[inner(u, v) for v in B] for u in B]

    def coords_of_tensor(self, get):
        """Sym^2(Lambda^2) coordinate vector of a dense 4-tensor.

        ``get(a,b,c,d)`` returns the tensor entry (any value supporting
        the ring operations).  Projects out the pair-skew and
        pair-exchange-symmetric part.
        """
        vec = []
        quarter = Q(1, 4)
        half = Q(1, 2)
        for (i, j) in self.coords:
            a, b = self.ps.pairs[i]
            c, d = self.ps.pairs[j]
            f1 = (get(a, b, c, d) - get(b, a, c, d)
                  - get(a, b, d, c) + get(b, a, d, c)) * quarter
            f2 = (get(c, d, a, b) - get(d, c, a, b)
                  - get(c, d, b, a) + get(d, c, b, a)) * quarter
            vec.append((f1 + f2) * half)
        return vec

    def pairing_with_basis(self, vec):
        """Inner products <B_i, vec> for each admissible basis vector."""
        cw = self._coord_weights()
        out = []
        for u in self.kernel_basis:
            total = None
            for k, uk in enumerate(u):
                if not uk:
                    continue
                rowk = cw[k]
                for l, v in enumerate(vec):
                    if not rowk[l]:
                        continue
                    if isinstance(v, Poly):
                        if v.is_zero():
                            continue
                        term = v.scale(uk * rowk[l])
                    else:
                        if not v:
                            continue
                        term = uk * rowk[l] * v
                    total = term if total is None else total + term
            out.append(total)
        return out

    def project_coords(self, vec, nvars=None):
        """Orthogonal projection of a coordinate vector onto the (2,2)0 space.

        Components may be Poly (pass nvars) or plain scalars.  Returns
        coefficients in the admissible basis together with the projected
        coordinate vector.
        """
        m = self.pairing_with_basis(vec)
        if nvars is not None:
            zero = Poly.zero(nvars)
            m = [zero if x is None else x for x in m]
            coeffs = _solve_polys(self.gram, m, nvars)
            proj = [Poly.zero(nvars) for _ in self.coords]
            for ci, bvec in zip(coeffs, self.kernel_basis):
                if ci.is_zero():
                    continue
                for k, bk in enumerate(bvec):
                    if bk:
                        proj[k] = proj[k] + ci.scale(bk)
        else:
            m = [ZERO if x is None else Q(x) for x in m]
            coeffs = linalg.solve(self.gram, m)
            proj = [ZERO] * len(self.coords)
            for ci, bvec in zip(coeffs, self.kernel_basis):
                if ci:
                    for k, bk in enumerate(bvec):
                        if bk:
                            proj[k] += ci * bk
        return coeffs, proj


def _solve_polys(A, rhs_polys, nvars):
    """Solve A x = b where b has Poly entries, column by monomial."""
    monos = sorted({e for p in rhs_polys for e in p.terms})
    if not monos:
        return [Poly.zero(nvars) for _ in range(len(A[0]) if A else 0)]
    B = [[p.terms.get(e, ZERO) for e in monos] for p in rhs_polys]
    X = linalg.solve(A, B)
    out = []
    for row in X:
        out.append(Poly(nvars, {e: c for e, c in zip(monos, row) if c}))
    return out


_young_cache = {}


def young22_space(dim, hmat):
    key = (dim, tuple(tuple(str(Q(x)) for x in row) for row in hmat))
    if key not in _young_cache:
        _young_cache[key] = Young22(dim, hmat)
    return _young_cache[key]


def young22_tracefree(dense, metric):
    """Trace-free (2,2) Young projection of a 4-index base tensor.

    ``dense`` maps full index tuples (a,b,c,d) to Poly components.
    Returns the projected dense dict (complete, including zeros dropped).
    """
    n = metric.n
    hmat = [[metric.g(a, b) for b in range(n)] for a in range(n)]
    sp = young22_space(n, hmat)
    zero = Poly.zero(n)

    def get(a, b, c, d):
        return dense.get((a, b, c, d), zero)

    vec = sp.coords_of_tensor(get)
    _, proj = sp.project_coords(vec, nvars=n)
    out = {}
    for idx in ((a, b, c, d) for a in range(n) for b in range(n)
                for c in range(n) for d in range(n)):
        r = sp.coord_of(*idx)
        if r is None:
            continue
        k, s = r
        p = proj[k].scale(s)
        if not p.is_zero():
            out[idx] = p
    return out
