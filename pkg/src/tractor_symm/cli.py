"""Command-line interface: verification sweeps, bases, matrices, reports.

Exit codes: 0 all verdicts pass, 1 usage error, 2 verification failure,
3 resource cap exceeded.  JSON output is deterministic for a fixed
configuration (including the seed) and carries a schema version tag.
"""

import argparse
import json
import random
import sys

from .scalars import Q, qstr
from .poly import Poly
from .tensor import Metric, SymTensor, random_tracefree
from .diffop import StdOp
from . import ckt, canon, algebra
from .ckt import CKTLabel

SCHEMA = "tractor-symm/1"

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_RESOURCE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        sys.exit(EXIT_USAGE)


def _metric(args):
    if args.signature:
        try:
            s, sp = (int(x) for x in args.signature.split(","))
        except ValueError:
            raise SystemExit(EXIT_USAGE)
        if args.n is not None and s + sp != args.n:
            sys.stderr.write("error: signature does not sum to n\n")
            sys.exit(EXIT_USAGE)
        return Metric(s, sp)
    n = args.n if args.n is not None else 3
    return Metric.euclidean(n)


def _config(args, metric):
    cfg = {"n": metric.n, "signature": list(metric.signature)}
    for f in ("k", "p", "r", "d", "t", "max_degree", "seed", "index"):
        v = getattr(args, f, None)
        if v is not None:
            cfg[f.replace("_", "-")] = v
    return cfg


def _emit(args, command, config, result, verdict=None):
    if args.format == "json":
        doc = {"schema": SCHEMA, "command": command, "config": config,
               "result": result}
        if verdict is not None:
            doc["verdict"] = "pass" if verdict else "fail"
        print(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    else:
        _emit_text(command, config, result, verdict)
    if verdict is False:
        sys.exit(EXIT_VERIFY)


def _emit_text(command, config, result, verdict):
    cfgs = " ".join("%s=%s" % (k, v) for k, v in sorted(config.items()))
    print("%s  [%s]" % (command, cfgs))
    _print_value(result, indent="  ")
    if verdict is not None:
        print("verdict: %s" % ("pass" if verdict else "FAIL"))


def _print_value(v, indent=""):
    if isinstance(v, dict):
        for k in sorted(v):
            val = v[k]
            if isinstance(val, (dict, list)):
                print("%s%s:" % (indent, k))
                _print_value(val, indent + "  ")
            else:
                print("%s%s: %s" % (indent, k, val))
    elif isinstance(v, list):
        if v and all(isinstance(r, list) for r in v):
            for row in v:
                print(indent + "  ".join(str(x) for x in row))
        else:
            for x in v:
                _print_value(x, indent)
    else:
        print("%s%s" % (indent, v))


def _sym_to_dict(t):
    return [[list(m), [[list(e), qstr(c)] for e, c in
                       sorted(t.comps[m].terms.items())]]
            for m in sorted(t.comps)]


def _tractor_to_dict(t):
    return {"weight": qstr(t.weight),
            "slots": [s for s in t.slots],
            "comps": [[list(i), [[list(e), qstr(c)] for e, c in
                                 sorted(p.terms.items())]]
                      for i, p in sorted(t.comps.items())]}


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_ckt(args):
    metric = _metric(args)
    label = CKTLabel(args.p, args.r)
    basis = ckt.solve(metric, label)
    dim = ckt.weyl_dim(metric.n, args.p, args.r)
    ok = len(basis) == dim
    if args.action == "dim":
        _emit(args, "ckt dim", _config(args, metric),
              {"dim": dim, "solved": len(basis)}, ok)
    else:
        _emit(args, "ckt basis", _config(args, metric),
              {"dim": dim, "basis": [_sym_to_dict(b) for b in basis]}, ok)


def cmd_split(args):
    metric = _metric(args)
    label = CKTLabel(args.p, args.r)
    basis = ckt.solve(metric, label)
    idxs = range(len(basis)) if args.all_basis else [args.index or 0]
    out = []
    ok = True
    for i in idxs:
        I = ckt.split(basis[i], label)
        from .tractor import nabla
        parallel = nabla(I).is_zero()
        back = ckt.extract(I, label) == basis[i]
        ok = ok and parallel and back
        out.append({"index": i, "parallel": parallel,
                    "projects_back": back,
                    "tractor": _tractor_to_dict(I)})
    _emit(args, "split", _config(args, metric), out, ok)


def cmd_symmetry(args):
    metric = _metric(args)
    k = args.k or 1
    if args.action == "build":
        label = CKTLabel(args.p, args.r)
        basis = ckt.solve(metric, label)
        i = args.index or 0
        I = ckt.split(basis[i], label)
        w = Q(2 * k - metric.n, 2)
        S = canon.build_S(I, (args.p, args.r), w)
        _emit(args, "symmetry build", _config(args, metric),
              {"weight": qstr(w), "operator": S.std_op().to_dict()})
        return
    if args.action == "sweep":
        labels = [(1, 0)] + ([(0, 1)] if k >= 2 else [])
    else:
        labels = [(args.p, args.r)]
    results = []
    allok = True
    for (p, r) in labels:
        if r >= k:
            sys.stderr.write("error: r < k required for symmetry runs\n")
            sys.exit(EXIT_USAGE)
        basis = ckt.solve(metric, CKTLabel(p, r))
        idxs = (range(len(basis)) if (args.all_basis or
                                      args.action == "sweep")
                else [args.index or 0])
        for i in idxs:
            rep = canon.verify_symmetry(basis[i], (p, r), k)
            entry = {"label": [p, r], "index": i,
                     "verdict": "pass" if rep.verdict else "fail",
                     "trivial": rep.trivial}
            if not rep.verdict:
                entry["residual"] = rep.residual.to_dict()
                allok = False
            results.append(entry)
    _emit(args, "symmetry " + args.action, _config(args, metric),
          results, allok)


def cmd_compose(args):
    metric = _metric(args)
    k = args.k or 1
    label = CKTLabel(args.p, args.r)
    basis = ckt.solve(metric, label)
    i = args.index or 0
    rep = canon.verify_symmetry(basis[i], (args.p, args.r), k)
    _emit(args, "compose", _config(args, metric),
          {"lhs": StdOp.laplacian_power(metric, k).compose(
              rep.S_std).to_dict(),
           "rhs_factor": rep.Sp_std.to_dict(),
           "intertwines": rep.verdict}, rep.verdict)


def cmd_decompose(args):
    metric = _metric(args)
    rng = random.Random(args.seed or 0)
    basis = ckt.solve(metric, CKTLabel(1, 0))
    i = rng.randrange(len(basis))
    j = rng.randrange(len(basis))
    I = algebra.GElement.from_ckv(basis[i])
    J = algebra.GElement.from_ckv(basis[j])
    dec = algebra.decompose(I, J)
    rep = algebra.verify_dec2can(basis[i], basis[j], Q(0),
                                 max_degree=args.max_degree or 3)
    _emit(args, "decompose", _config(args, metric),
          {"pair": [i, j], "killing": qstr(dec.killing_part),
           "residual_terms": len(dec.residual.comps),
           "dec2can": rep}, rep["all"])


def cmd_cmatrix(args):
    k = args.k or 1
    if args.action == "det":
        ds = range(k) if args.d is None else [args.d]
        rows = []
        ok = True
        for d in ds:
            dv = canon.c_matrix(k, d).det()
            ok = ok and dv != 0
            rows.append({"d": d, "det": qstr(dv)})
        _emit(args, "cmatrix det", {"k": k}, rows, ok)
    else:
        ds = range(k) if args.d is None else [args.d]
        out = []
        for d in ds:
            ch = canon.reduction_chain(k, d)
            out.append({"d": d, "det": qstr(ch["det"]),
                        "det-companion": qstr(ch["det_companion"]),
                        "power-of-two": ch["power_of_two"]})
        _emit(args, "cmatrix chain", {"k": k}, out, True)


def cmd_classify(args):
    metric = _metric(args)
    k = args.k or 1
    rng = random.Random(args.seed or 0)
    w = Q(2 * k - metric.n, 2)
    op = StdOp.zero(metric)
    gens = []
    labels = [(1, 0)] + ([(0, 1)] if k >= 2 else [])
    for lab in labels:
        basis = ckt.solve(metric, CKTLabel(*lab))
        phi = basis[rng.randrange(len(basis))]
        I = ckt.split(phi, CKTLabel(*lab))
        op = op + canon.build_S(I, lab, w, check_parallel=False).std_op()
        gens.append((lab, phi))
    coeff = random_tracefree(metric, 1, 1, rng)
    tail = StdOp.from_coeff(coeff, 0)
    op = op + tail.compose(StdOp.laplacian_power(metric, k))
    try:
        pieces, rem_tail = canon.classify(op, k)
    except canon.ClassificationError as e:
        _emit(args, "classify", _config(args, metric),
              {"error": str(e)}, False)
        return
    ok = rem_tail == tail and len(pieces) == len(gens) and all(
        any(tuple(l) == tuple(lab) and p == phi for l, p in pieces)
        for lab, phi in gens)
    _emit(args, "classify", _config(args, metric),
          {"pieces": [{"label": list(l)} for l, _ in pieces],
           "tail_recovered": rem_tail == tail,
           "round_trip": ok}, ok)


def cmd_algebra(args):
    metric = _metric(args)
    n = metric.n
    k = args.k or 1
    if args.action == "graded":
        t = args.t if args.t is not None else 1
        gd = algebra.graded_dim(k, t, n)
        res = {"graded-dim": gd}
        ok = True
        if t <= 2:
            bd = algebra.brute_dim_oracle(k, t, n)
            res["oracle-dim"] = bd
            ok = gd == bd
        _emit(args, "algebra graded", _config(args, metric), res, ok)
        return
    basis = ckt.solve(metric, CKTLabel(1, 0))
    rng = random.Random(args.seed or 0)
    if args.action == "dec2can":
        pairs = ([(i, j) for i in range(len(basis))
                  for j in range(len(basis))] if args.all_basis else
                 [(rng.randrange(len(basis)), rng.randrange(len(basis)))
                  for _ in range(3)])
        allok = True
        out = []
        for (i, j) in pairs:
            rep = algebra.verify_dec2can(basis[i], basis[j], Q(0),
                                         max_degree=args.max_degree or 3)
            allok = allok and rep["all"]
            out.append({"pair": [i, j], "all": rep["all"]})
        _emit(args, "algebra dec2can", _config(args, metric), out, allok)
    elif args.action == "ideal":
        i = rng.randrange(len(basis))
        j = rng.randrange(len(basis))
        ok = algebra.ideal_relation_check(basis[i], basis[j], k,
                                          max_degree=args.max_degree or 3)
        _emit(args, "algebra ideal", _config(args, metric),
              {"pair": [i, j],
               "coefficient": qstr(algebra.ideal_coefficient(n, k)),
               "holds": ok}, ok)
    elif args.action == "extra":
        try:
            ok = algebra.lemma_extra_check(
                k, metric, max_degree=args.max_degree or 3)
        except MemoryError:
            sys.exit(EXIT_RESOURCE)
        _emit(args, "algebra extra", _config(args, metric),
              {"holds": ok}, ok)


def cmd_report(args):
    metric = _metric(args)
    n = metric.n
    k = args.k or 1
    checks = {}
    dims = {}
    for (p, r) in ((0, 0), (1, 0), (0, 1)):
        basis = ckt.solve(metric, CKTLabel(p, r))
        dims["(%d,%d)" % (p, r)] = len(basis)
        checks["dim(%d,%d)" % (p, r)] = (
            len(basis) == ckt.weyl_dim(n, p, r))
    basis = ckt.solve(metric, CKTLabel(1, 0))
    rep = canon.verify_symmetry(basis[0], (1, 0), k)
    checks["symmetry"] = rep.verdict
    checks["gjms"] = canon.gjms_factorization_check(metric, min(k, 2),
                                                    max_degree=3)
    checks["regularity"] = all(canon.regularity(k, d) for d in range(k))
    checks["ideal"] = algebra.ideal_relation_check(basis[0], basis[1], k,
                                                   max_degree=3)
    ok = all(checks.values())
    _emit(args, "report", _config(args, metric),
          {"dims": dims, "checks": checks}, ok)


# ----------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--n", type=int)
    p.add_argument("--signature", type=str,
                   help="S,S' split of the metric signature")
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--d", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--index", type=int)
    p.add_argument("--max-degree", type=int, dest="max_degree")
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--all-basis", action="store_true", dest="all_basis")


def build_parser():
    parser = _Parser(prog="tractor-symm",
                     description="Exact verification of higher symmetries "
                                 "of Laplacian powers via tractor calculus")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, actions=None):
        sp = sub.add_parser(name)
        if actions:
            sp.add_argument("action", choices=actions)
        _add_common(sp)
        sp.set_defaults(func=func)
        return sp

    add("ckt", cmd_ckt, ("dim", "basis"))
    add("split", cmd_split)
    add("symmetry", cmd_symmetry, ("build", "verify", "sweep"))
    add("compose", cmd_compose)
    add("decompose", cmd_decompose)
    add("cmatrix", cmd_cmatrix, ("det", "chain"))
    add("classify", cmd_classify)
    add("algebra", cmd_algebra, ("dec2can", "ideal", "extra", "graded"))
    add("report", cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ValueError as e:
        sys.stderr.write("error: %s\n" % e)
        return EXIT_RESOURCE
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
