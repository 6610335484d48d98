"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a verification fails (the
report is still written), 2 for usage and input errors.  Reports are JSON
with sorted keys and no timestamps, so re-running a command with the same
arguments and seed reproduces the file byte for byte (``--timing`` adds
wall-clock time and breaks that on purpose).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import carriers as C
from .core import DomainError, PropertyResult, VerificationReport, gyr_consistency_check, is_degenerate_group, verify_axioms
from .prenorm import DEFAULT_GRID, DEFAULT_NMAX, DEFAULT_SUP_SAMPLES, ChainInvalid, DyadicFamily, metric_check, prenorm_check, prenorm_table
from .search import SEARCH_BUDGET, search_small
from .sets import DEFAULT_DEPTH, ExactSet, ball_chain, disjointness_check, finite_chain, geometric_chain, harmonic_chain, validate_chain
from .subgyro import CapExhausted, Contained, IllDefined, PartitionFailure, generated, is_L_subgyrogroup, is_subgyrogroup, left_cosets, nss_probe, quotient
from .tablefile import TableParseError, format_text, read_table, write_table

OUT_ENV = "GYROKIT_OUT_DIR"


class UsageError(Exception):
    pass


class Failed(Exception):
    """A verification failed; carries the document to write."""

    def __init__(self, doc):
        self.doc = doc


# --- argument helpers ----------------------------------------------------------

def _parse_element(s: str, disk: bool):
    try:
        if disk:
            return complex(s.strip().replace("i", "j"))
        return int(s)
    except ValueError:
        raise UsageError(f"bad element {s!r}") from None


def _parse_set(s: str, disk: bool = False) -> list:
    s = s.strip().strip("{}")
    if not s:
        return []
    return [_parse_element(p, disk) for p in s.split(",")]


def _factor(spec: str, args):
    if spec == "mobius":
        return C.mobius_make(args.tol, args.guard)
    if spec == "klein":
        return C.group_adapter(C.KLEIN_FOUR, name="Klein four")
    if spec.startswith("cyclic:"):
        return C.group_adapter(int(spec.split(":", 1)[1]))
    return _load_table(spec, validate=True)


def _load_table(path, validate=True):
    table, meta = read_table(path)
    return C.FiniteGyrogroupTable(table, name=meta.get("name") or Path(path).stem, validate=validate)


def build_carrier(args, validate=True):
    picked = [args.mobius, args.table is not None, args.cyclic is not None, args.klein]
    if sum(picked) != 1:
        raise UsageError("choose exactly one of --mobius, --table, --cyclic, --klein")
    if args.mobius:
        c = C.mobius_make(args.tol, args.guard)
    elif args.table is not None:
        c = _load_table(args.table, validate=validate)
    elif args.cyclic is not None:
        if args.cyclic < 1:
            raise UsageError("--cyclic needs a positive order")
        c = C.group_adapter(args.cyclic)
    else:
        c = C.group_adapter(C.KLEIN_FOUR, name="Klein four")
    if args.times:
        c = C.product(c, _factor(args.times, args))
        if c.finite:
            c = c.to_table()
    return c


def _need_finite(c):
    if not isinstance(c, C.FiniteGyrogroupTable):
        raise UsageError("this command needs a finite carrier (--table, --cyclic or --klein)")


def _build_chain(c, args, radii_opt="radii", sets_opt="sets", depth=None):
    radii, sets = getattr(args, radii_opt, None), getattr(args, sets_opt, None)
    if isinstance(c, C.MobiusDisk):
        if sets:
            raise UsageError(f"--{sets_opt} is for finite carriers; use --{radii_opt} on the disk")
        kw = {"depth": depth or DEFAULT_DEPTH, "seed": args.seed}
        spec = radii or "geometric"
        if spec == "geometric":
            return geometric_chain(c, args.r0, args.ratio, **kw)
        if spec == "harmonic":
            return harmonic_chain(c, **kw)
        vals = [float(v) for v in spec.split(",")]
        if any(v <= 0 for v in vals):
            raise UsageError("radii must be positive")
        return ball_chain(c, lambda n: vals[min(n, len(vals) - 1)], label=f"radii {spec}", **kw)
    if not sets:
        raise UsageError(f"finite carriers need --{sets_opt} 'U0;U1;...'")
    return finite_chain(c, [_parse_set(p) for p in sets.split(";")], label=sets)


# --- documents -------------------------------------------------------------------

def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, np.generic):
        return _clean(x.item())
    if isinstance(x, complex):
        return [_clean(x.real), _clean(x.imag)]
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _document(args, argv, carrier, report: VerificationReport | None, result: dict, extra=None):
    doc = {
        "command": list(argv),
        "seed": args.seed,
        "carrier": carrier.describe() if carrier is not None else None,
        "result": result,
    }
    if report is not None:
        rd = report.to_dict()
        doc["report"] = {k: rd[k] for k in ("title", "mode", "budget", "budget_consumed")}
        doc["properties"] = rd["properties"]
        doc["status"] = "pass" if report.passed else "fail"
    else:
        doc["status"] = "pass"
    doc.update(extra or {})
    return _clean(doc)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# --- subcommands -------------------------------------------------------------------

def cmd_verify(args, argv):
    c = build_carrier(args, validate=False)
    rep = verify_axioms(c, budget=args.samples, seed=args.seed, cap=args.cap)
    cons = gyr_consistency_check(c, budget=args.samples, seed=args.seed,
                                 tol=args.consistency_tol)
    rep.extend(cons)
    result = {}
    if rep.passed:
        deg, wit = is_degenerate_group(c, budget=args.samples, seed=args.seed)
        result = {"degenerate_group": deg, "witness": wit}
    return _document(args, argv, c, rep, result), []


def cmd_gyr_table(args, argv):
    c = build_carrier(args)
    if isinstance(c, C.MobiusDisk):
        if not args.at:
            raise UsageError("on the disk give --at a,b")
        a, b = _parse_set(args.at, disk=True)
        f = complex(c.gyr_factor(a, b))
        return _document(args, argv, c, None, {"a": a, "b": b, "factor": f, "modulus": abs(f)}), []
    _need_finite(c)
    g = c.gyr_table
    n = c.order
    nontrivial = [[a, b] for a in range(n) for b in range(n) if not np.array_equal(g[a, b], np.arange(n))]
    result = {"gyr": g.tolist(), "nontrivial_pairs": nontrivial}
    return _document(args, argv, c, None, result), []


def _handle_arg(c, args):
    disk = isinstance(c, C.MobiusDisk)
    if args.sub is not None:
        return _parse_set(args.sub, disk)
    raise UsageError("give --sub with the subset")


def cmd_subgyro(args, argv):
    c = build_carrier(args)
    disk = isinstance(c, C.MobiusDisk)
    rep = VerificationReport("subgyrogroup", "exhaustive" if c.finite else "sampled", seed=args.seed)
    if args.gen is not None:
        H = generated(c, _parse_set(args.gen, disk), cap=args.cap)
        result = {"members": list(H.members) if c.finite else len(H.members), "partial": H.partial,
                  "steps": H.steps, "is_subgyrogroup": H.is_subgyrogroup}
        if H.partial:
            result["note"] = "closure stopped at the cap; the set is partial"
            if args.strict:
                return _document(args, argv, c, rep, result, {"status": "fail"}), []
        if H.is_subgyrogroup == "yes":
            ok, wit = is_L_subgyrogroup(c, H, budget=args.samples, seed=args.seed)
            result["is_L_subgyrogroup"] = H.is_L_subgyrogroup
            result["L_witness"] = wit
        return _document(args, argv, c, rep, result), []
    S = _handle_arg(c, args)
    if not S:
        raise UsageError("subset must be nonempty")
    ok, wit = is_subgyrogroup(c, S)
    rep.add(PropertyResult("subgyrogroup", "pass" if ok else "fail", len(S) ** 2,
                           counterexample=None if ok else list(wit)))
    result = {"members": S}
    if ok:
        isL, lw = is_L_subgyrogroup(c, S, budget=args.samples, seed=args.seed)
        result["is_L_subgyrogroup"] = {True: "yes", False: "no", None: "sampled"}[isL]
        result["L_witness"] = lw
    return _document(args, argv, c, rep, result), []


def cmd_cosets(args, argv):
    c = build_carrier(args)
    _need_finite(c)
    dec = left_cosets(c, _handle_arg(c, args))
    return _document(args, argv, c, None, dec.to_dict()), []


def cmd_quotient(args, argv):
    c = build_carrier(args)
    _need_finite(c)
    q, rep = quotient(c, _handle_arg(c, args), seed=args.seed)
    meta = {"name": f"quotient by {{{args.sub}}}", "provenance": "gyrokit quotient"}
    result = {"order": q.order, "table": q.table.tolist(), "degenerate_group": isinstance(q, C.GroupTable)}
    return _document(args, argv, c, rep, result), [("tbl", lambda p: write_table(p, q.table, meta),
                                                   format_text(q.table, meta))]


def cmd_setcheck(args, argv):
    c = build_carrier(args)
    _need_finite(c)
    rep = VerificationReport("disjointness equivalence", "exhaustive", seed=args.seed, budget=args.samples)
    if args.all:
        n = c.order
        if n <= 4:
            masks = ((np.arange(2 ** n)[:, None] >> np.arange(n)) & 1).astype(bool)
            triples = ((a, b, d) for a in masks for b in masks for d in masks)
            mode = "exhaustive"
        else:
            rng = np.random.default_rng(args.seed)
            draws = rng.random((args.samples, 3, n)) < 0.5
            triples = ((t[0], t[1], t[2]) for t in draws)
            mode = "sampled"
        rep.mode = mode
        checks, cex = 0, None
        for a, b, d in triples:
            A, B, D = (ExactSet(c, mask=m) for m in (a, b, d))
            lhs, rhs, verdict = disjointness_check(A, B, D)
            checks += 1
            if verdict != "pass":
                cex = [list(A.members), list(B.members), list(D.members)]
                break
        rep.add(PropertyResult("disjointness_equivalence", "pass" if cex is None else "fail", checks,
                               counterexample=cex, residual=None if cex is None else 1.0))
        return _document(args, argv, c, rep, {"triples": checks}), []
    if args.A is None or args.B is None or args.C is None:
        raise UsageError("give --A, --B and --C, or --all")
    A, B, D = (ExactSet(c, _parse_set(s)) for s in (args.A, args.B, args.C))
    lhs, rhs, verdict = disjointness_check(A, B, D)
    rep.add(PropertyResult("disjointness_equivalence", verdict, 1,
                           counterexample=None if verdict == "pass" else [args.A, args.B, args.C],
                           residual=None if verdict == "pass" else 1.0))
    return _document(args, argv, c, rep, {"lhs_empty": lhs, "rhs_empty": rhs, "verdict": verdict}), []


def cmd_chain(args, argv):
    c = build_carrier(args)
    depth = args.depth
    chain = _build_chain(c, args, depth=depth)
    base = F = None
    if args.check in ("base-at-H", "invariant-set"):
        base = _build_chain(c, args, "base_radii", "base_sets", depth=depth)
    if args.check == "invariant-set":
        if args.F is None:
            raise UsageError("invariant-set mode needs --F")
        F = ExactSet(c, _parse_set(args.F)) if c.finite else None
        if F is None:
            raise UsageError("invariant-set mode is only available on finite carriers")
    rep = validate_chain(chain, args.check, base=base, F=F, budget=args.samples, seed=args.seed, depth=depth)
    result = {"label": chain.label, "mode": args.check}
    if chain.radii is not None:
        result["radii"] = chain.radii[: (depth or DEFAULT_DEPTH) + 1]
    return _document(args, argv, c, rep, result), []


def _prenorm_setup(args, argv):
    c = build_carrier(args)
    depth = args.depth if args.depth is not None else DEFAULT_NMAX
    chain = _build_chain(c, args, depth=max(depth, 1) + 1)
    try:
        fam = DyadicFamily(chain, depth)
    except ChainInvalid as e:
        raise Failed(_document(args, argv, c, e.report, {"error": str(e)})) from None
    tab = prenorm_table(fam, args.grid, args.sup_samples, args.seed)
    return c, chain, fam, tab


def _grid_csv(tab) -> str:
    lines = ["x,y,N"]
    for p, v in zip(tab.points, tab.N):
        lines.append(f"{p.real:.12g},{p.imag:.12g},{v:.12g}")
    return "\n".join(lines) + "\n"


def cmd_prenorm(args, argv):
    c, chain, fam, tab = _prenorm_setup(args, argv)
    rep = prenorm_check(chain, fam.depth, budget=args.samples, seed=args.seed, table=tab)
    result = {"family": fam.to_dict(), "table": tab.to_dict()}
    if tab.exact:
        text = _dump(_clean({"f": tab.f, "N": tab.N}))
        return _document(args, argv, c, rep, result), [("json", lambda p: Path(p).write_text(text), text)]
    csv = _grid_csv(tab)
    return _document(args, argv, c, rep, result), [("csv", lambda p: Path(p).write_text(csv), None)]


def cmd_metric(args, argv):
    c, chain, fam, tab = _prenorm_setup(args, argv)
    P = chain.kernel_set()
    rep = metric_check(c, P, tab, budget=args.samples, seed=args.seed)
    result = {"P": list(P.members) if c.finite else [[0.0, 0.0]]}
    if tab.exact:
        from .prenorm import _rho_matrix

        result["rho"] = _rho_matrix(c, tab, np.arange(c.order))
    return _document(args, argv, c, rep, result), []


def cmd_probe(args, argv):
    c = build_carrier(args)
    disk = isinstance(c, C.MobiusDisk)
    if args.x is None:
        raise UsageError("give --x")
    x = _parse_element(args.x, disk)
    if disk:
        if args.radius is None:
            raise UsageError("on the disk give --radius")
        U = args.radius
    else:
        if args.U is None:
            raise UsageError("on finite carriers give --U")
        U = _parse_set(args.U)
    try:
        out = nss_probe(c, U, x, cap=args.cap)
    except ValueError as e:
        raise UsageError(str(e)) from None
    except CapExhausted as e:
        result = {"outcome": "inconclusive", "note": str(e), "moduli": e.partial.steps if e.partial else []}
        extra = {"status": "fail"} if args.strict else {}
        return _document(args, argv, c, None, result, extra), []
    if isinstance(out, Contained):
        result = {"outcome": "contained", "subgyrogroup": list(out.subgyrogroup.members), "steps": out.steps}
    else:
        result = {"outcome": "escape", "step": out.step, "element": out.element, "moduli": out.moduli}
    return _document(args, argv, c, None, result), []


def cmd_search(args, argv):
    if args.n is None:
        raise UsageError("give --n")
    try:
        res = search_small(args.n, budget=args.budget, partial_ok=True)
    except ValueError as e:
        raise UsageError(str(e)) from None
    tables = [t.table.tolist() for t in res.tables]
    result = {"order": args.n, "count": len(tables), "nodes": res.nodes, "complete": res.complete,
              "tables": tables, "degenerate": [isinstance(t, C.GroupTable) for t in res.tables]}
    extra = {"budget_exhausted": not res.complete}
    if not res.complete and args.strict:
        extra["status"] = "fail"

    def write(p):
        p = Path(p)
        p.mkdir(parents=True, exist_ok=True)
        for k, t in enumerate(res.tables):
            write_table(p / f"n{args.n}_{k}.tbl", t.table,
                        {"name": f"order {args.n} #{k}", "provenance": "gyrokit search"})

    return _document(args, argv, None, None, result, extra), [("dir", write, None)]


COMMANDS = {
    "verify": cmd_verify, "gyr-table": cmd_gyr_table, "subgyro": cmd_subgyro, "cosets": cmd_cosets,
    "quotient": cmd_quotient, "setcheck": cmd_setcheck, "chain": cmd_chain, "prenorm": cmd_prenorm,
    "metric": cmd_metric, "probe": cmd_probe, "search": cmd_search,
}

# which commands write a primary artifact other than the JSON report
ARTIFACT = {"quotient", "prenorm", "search"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("carrier")
    g.add_argument("--mobius", action="store_true", help="the Möbius unit disk")
    g.add_argument("--table", metavar="PATH", help="Cayley table file (text or JSON)")
    g.add_argument("--cyclic", type=int, metavar="N", help="cyclic group Z_N")
    g.add_argument("--klein", action="store_true", help="Klein four-group")
    g.add_argument("--times", metavar="SPEC", help="product with mobius | klein | cyclic:N | table path")
    g.add_argument("--tol", type=float, default=1e-9, help="disk equality tolerance")
    g.add_argument("--guard", type=float, default=0.95, help="disk sampling radius")
    o = common.add_argument_group("run")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--samples", type=int, default=10_000, help="sample budget for randomized checks")
    o.add_argument("--budget", type=int, default=SEARCH_BUDGET, help="search node budget")
    o.add_argument("--depth", type=int, default=None)
    o.add_argument("--cap", type=int, default=32)
    o.add_argument("--out", metavar="PATH", help="primary output (report, table, CSV or directory)")
    o.add_argument("--report", metavar="PATH", help="JSON report path for commands with other artifacts")
    o.add_argument("--strict", action="store_true", help="treat exhausted budgets and caps as failures")
    o.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    o.add_argument("--json", action="store_true", help="print the JSON report instead of a summary")

    p = argparse.ArgumentParser(prog="gyrokit", description="Gyrogroup verification toolkit.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("verify", parents=[common], help="check the gyrogroup axioms")
    s.add_argument("--consistency-tol", type=float, default=1e-12)
    s = sub.add_parser("gyr-table", parents=[common], help="all gyrations of a finite carrier")
    s.add_argument("--at", help="disk pair a,b")
    for name in ("subgyro", "cosets", "quotient"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--sub", help="comma-separated subset, e.g. 0,2")
        if name == "subgyro":
            s.add_argument("--gen", help="generate from these seeds instead")
    s = sub.add_parser("setcheck", parents=[common], help="disjointness equivalence on subsets")
    for k in ("A", "B", "C"):
        s.add_argument(f"--{k}")
    s.add_argument("--all", action="store_true", help="all subset triples (random ones above order 4)")
    for name in ("chain", "prenorm", "metric"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--radii", help="geometric | harmonic | r0,r1,...")
        s.add_argument("--r0", type=float, default=1 / 3)
        s.add_argument("--ratio", type=float, default=1 / 3)
        s.add_argument("--sets", help="finite chain 'U0;U1;...', last set repeats")
        if name == "chain":
            s.add_argument("--check", choices=["prenorm", "base-at-H", "invariant-set"], default="prenorm")
            s.add_argument("--base-radii")
            s.add_argument("--base-sets")
            s.add_argument("--F")
        else:
            s.add_argument("--grid", type=int, default=DEFAULT_GRID)
            s.add_argument("--sup-samples", type=int, default=DEFAULT_SUP_SAMPLES)
    s = sub.add_parser("probe", parents=[common], help="NSS escape probe")
    s.add_argument("--x")
    s.add_argument("--radius", type=float)
    s.add_argument("--U")
    s = sub.add_parser("search", parents=[common], help="enumerate small gyrogroup tables")
    s.add_argument("--n", type=int)
    return p


def _output_paths(args, ext):
    """(report path, artifact path) from --out/--report and the env default."""
    cmd = args.command
    default_dir = os.environ.get(OUT_ENV)
    if cmd in ARTIFACT:
        art = args.out or (str(Path(default_dir) / (cmd if ext == "dir" else f"{cmd}.{ext}")) if default_dir else None)
        rep = args.report or (str(Path(default_dir) / f"{cmd}.json") if default_dir else None)
    else:
        art = None
        rep = args.out or args.report or (str(Path(default_dir) / f"{cmd}.json") if default_dir else None)
    return rep, art


def _summary(doc) -> str:
    lines = [f"{doc['command'][0]}: {doc['status'].upper()}"]
    for e in doc.get("properties", []):
        line = f"  {e['status'].upper():7s} {e['name']} ({e['checks']} checks)"
        if e["status"] == "fail":
            line += f" counterexample={e['counterexample']} residual={e['residual']}"
        lines.append(line)
    res = doc.get("result") or {}
    for k in ("verdict", "outcome", "step", "moduli", "blocks", "degenerate_group", "count", "complete"):
        if k in res:
            lines.append(f"  {k}: {res[k]}")
    if doc.get("budget_exhausted"):
        lines.append("  budget exhausted: results are partial")
    return "\n".join(lines)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    t0 = time.perf_counter()
    artifacts = []
    try:
        doc, artifacts = COMMANDS[args.command](args, argv)
    except Failed as e:
        doc = e.doc
    except (UsageError, TableParseError, C.MalformedTable, C.NotAGroup, DomainError) as e:
        print(f"gyrokit: error: {e}", file=sys.stderr)
        return 2
    except C.NotAGyrogroup as e:
        rep = e.report
        doc = {"command": argv, "seed": args.seed, "carrier": None, "status": "fail",
               "result": {"error": f"not a gyrogroup: {e.property} fails at {e.counterexample}"}}
        if rep is not None:
            doc["properties"] = rep.to_dict()["properties"]
        doc = _clean(doc)
    except (PartitionFailure, IllDefined) as e:
        doc = _clean({"command": argv, "seed": args.seed, "carrier": None, "status": "fail",
                      "result": {"error": str(e), "witness": e.witness}})
    except (ValueError, TypeError) as e:
        print(f"gyrokit: error: {e}", file=sys.stderr)
        return 2
    if args.timing:
        doc["timing"] = {"seconds": round(time.perf_counter() - t0, 6)}
    ext = artifacts[0][0] if artifacts else "json"
    rep_path, art_path = _output_paths(args, ext)
    try:
        if rep_path:
            Path(rep_path).parent.mkdir(parents=True, exist_ok=True)
            Path(rep_path).write_text(_dump(doc))
        if art_path and artifacts and doc["status"] == "pass":
            Path(art_path).parent.mkdir(parents=True, exist_ok=True)
            artifacts[0][1](art_path)
    except OSError as e:
        print(f"gyrokit: error: cannot write output: {e}", file=sys.stderr)
        return 2
    if args.json:
        sys.stdout.write(_dump(doc))
    else:
        print(_summary(doc))
        if artifacts and not art_path and artifacts[0][2] is not None and doc["status"] == "pass":
            sys.stdout.write(artifacts[0][2])
    return 0 if doc["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
