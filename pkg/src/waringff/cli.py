"""Command-line front end.

Commands: compute, verify, decompose, classify, scan, families.
Exit codes for compute: 0 resolved, 2 unresolved, 3 nonexistent,
1 invalid arguments.  All big integers travel as decimal strings in JSON
output; timing and version metadata live in an isolated header so the
result section is byte-identical across runs.
"""

import argparse
import csv
import json
import sys
import time
from datetime import datetime, timezone

from . import __version__, arith, classify, reduction, suites
from .ff import DEFAULT_FIELD_BUDGET, BudgetExceededError, build_field
from .gpgraph import (
    DEFAULT_BFS_BUDGET,
    cartesian_decomposition,
    gp_graph,
    waring_bfs,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNRESOLVED = 2
EXIT_NONEXISTENT = 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _emit(payload: dict, as_json: bool, elapsed_ms: int, lines=None):
    if as_json:
        doc = {
            "meta": {
                "version": __version__,
                "generated_utc": datetime.now(timezone.utc).isoformat(),
                "elapsed_ms": elapsed_ms,
            },
            "result": payload,
        }
        print(json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1))
    else:
        for line in lines or []:
            print(line)


# ---------------------------------------------------------------------------
# result cache (JSON lines, append only, one record per key)
# ---------------------------------------------------------------------------


def cache_record(p, m, k, value, method, certificate):
    return {
        "key": {"p": str(p), "m": str(m), "k": str(k)},
        "value": None if value is None else str(value),
        "method": method,
        "certificate": certificate,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def cache_load(path):
    records = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except FileNotFoundError:
        return records
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                key = (int(rec["key"]["p"]), int(rec["key"]["m"]), int(rec["key"]["k"]))
            except (ValueError, KeyError, TypeError):
                print(f"warning: skipping corrupt cache line {lineno} in {path}", file=sys.stderr)
                continue
            records[key] = rec
    return records


def cache_append(path, record):
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------


def _require_prime(p):
    if not arith.is_probable_prime(p):
        raise CliError(f"p = {p} is not prime")


def cmd_compute(args) -> int:
    _require_prime(args.p)
    if args.m < 1 or args.k < 1:
        raise CliError("m and k must be >= 1")
    t0 = time.perf_counter()
    p, m = args.p, args.m
    q = p**m
    k = arith.normalize_k(args.k, q)
    budget = args.budget or DEFAULT_BFS_BUDGET

    cached = None
    if args.cache:
        cached = cache_load(args.cache).get((p, m, k))

    status, value, method, cert = "unresolved", None, None, None
    if not arith.waring_exists(k, p, m):
        status = "nonexistent"
    elif cached is not None:
        status = "resolved"
        value = None if cached["value"] is None else int(cached["value"])
        method = cached["method"]
        cert = cached.get("certificate")
    else:
        if args.method in ("auto",):
            kv = classify.known_value(k, p, m)
            if kv is not None:
                value, method = kv.value, "Catalog"
                cert = reduction.certificate_to_json(
                    reduction.Certificate(
                        p, m, k, (), reduction.CertificateBase(k, p, m, reduction._source_for_family(kv.family)), kv.value
                    )
                )
        if args.method in ("auto", "reduce") and value is None:
            c = reduction.reduce(k, p, m, budget=budget)
            if c.resolved:
                value, method, cert = c.value, "Reduction", reduction.certificate_to_json(c)
        if args.method in ("auto", "bfs") and value is None and q <= budget:
            res = waring_bfs(gp_graph(build_field(p, m, budget=max(budget, DEFAULT_FIELD_BUDGET)), k), budget=budget)
            value, method = res.value, "BFS"
            if value is None:
                status = "nonexistent"  # unreachable when waring_exists passed
        if args.method == "bfs" and q > budget:
            raise CliError(f"q = {q} exceeds the BFS budget {budget}")
        if value is not None:
            status = "resolved"
        if args.cache and value is not None:
            cache_append(args.cache, cache_record(p, m, k, value, method, cert))

    elapsed_ms = int((time.perf_counter() - t0) * 1000)
    payload = {
        "p": str(p),
        "m": str(m),
        "k": str(k),
        "k_input": str(args.k),
        "q": str(q),
        "status": status,
        "value": None if value is None else str(value),
        "method": method,
        "certificate": cert,
        "cached": cached is not None,
    }
    lines = [f"g({k}, {p}^{m}) " + (
        "does not exist" if status == "nonexistent"
        else f"= {value}   [{method}{', cached' if cached else ''}]" if status == "resolved"
        else f"unresolved (residual base beyond budget {budget})"
    )]
    if cert and status == "resolved" and not args.json:
        for s in cert["steps"]:
            lines.append(f"  step {s['rule']}: a={s['a']} b={s['b']} c={s['c']} u={s['u']}  ({s['citation']})")
        lines.append(f"  base: g({cert['base']['k']}, {cert['base']['p']}^{cert['base']['a']}) via {cert['base']['source']}")
    _emit(payload, args.json, elapsed_ms, lines)
    if status == "nonexistent":
        return EXIT_NONEXISTENT
    if status != "resolved":
        return EXIT_UNRESOLVED
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    if args.suite not in suites.SUITES:
        raise CliError(f"unknown suite {args.suite!r}; choose from {sorted(suites.SUITES)}")
    t0 = time.perf_counter()
    rep = suites.SUITES[args.suite](args.max_q, args.threads)
    extra = []
    if args.suite == "reduction":
        iff = suites.suite_bprime_iff(13, args.max_q or (1 << 18))
        rep.checked += iff.checked
        rep.failures.extend(iff.failures)
        extra.append(f"b-prime iff agreement: {iff.checked} combinations")
    elapsed_ms = int((time.perf_counter() - t0) * 1000)
    lines = [f"suite {rep.name}: {rep.checked} checks, {len(rep.failures)} failures ({elapsed_ms} ms)"]
    lines += extra
    for f in rep.failures[:50]:
        lines.append(f"  FAIL {f}")
    for n in rep.notes:
        if isinstance(n, dict) and "claimed" in n:
            lines.append(f"  disputed entry: {n}")
    _emit(rep.to_json(), args.json, elapsed_ms, lines)
    return EXIT_OK if rep.passed else 1


# ---------------------------------------------------------------------------
# decompose / classify
# ---------------------------------------------------------------------------


def cmd_decompose(args) -> int:
    _require_prime(args.p)
    t0 = time.perf_counter()
    p, m = args.p, args.m
    q = p**m
    k = arith.normalize_k(args.k, q)
    if not arith.waring_exists(k, p, m):
        _emit({"status": "nonexistent"}, args.json, 0, [f"g({k}, {p}^{m}) does not exist (graph disconnected)"])
        return EXIT_NONEXISTENT
    g = gp_graph(build_field(p, m, budget=max(args.budget or DEFAULT_FIELD_BUDGET, DEFAULT_FIELD_BUDGET)), k)
    w = cartesian_decomposition(g)
    elapsed_ms = int((time.perf_counter() - t0) * 1000)
    if w is None:
        _emit({"decomposable": False, "p": str(p), "m": str(m), "k": str(k)}, args.json, elapsed_ms,
              [f"Γ({k}, {p}^{m}) is not Cartesian decomposable"])
        return EXIT_OK
    box = "⃗□" if w.directed else "□"
    factor = f"K_{p**w.a}" if w.u == 1 else f"Γ({w.u}, {p}^{w.a})"
    lines = [
        f"Γ({k}, {p}^{m}) ≅ {box}^{w.b} {factor}   [a={w.a} b={w.b} c={w.c} u={w.u}, "
        f"{'directed' if w.directed else 'undirected'} product]",
        "verified: coset partition, additive direct sum, factor isomorphism",
    ]
    payload = {
        "decomposable": True,
        "p": str(p),
        "m": str(m),
        "k": str(k),
        "a": str(w.a),
        "b": str(w.b),
        "c": str(w.c),
        "u": str(w.u),
        "directed": w.directed,
        "cosets": [[str(x) for x in cs] for cs in w.cosets],
        "span_bases": [[str(x) for x in bs] for bs in w.subgroup_bases],
    }
    _emit(payload, args.json, elapsed_ms, lines)
    return EXIT_OK


def cmd_classify(args) -> int:
    _require_prime(args.p)
    t0 = time.perf_counter()
    p, m = args.p, args.m
    q = p**m
    k = arith.normalize_k(args.k, q)
    exists = arith.waring_exists(k, p, m)
    if k == 1:
        payload = {"k": str(k), "kind": "trivial", "is_new": False, "exists": True, "value": "1"}
        lines = [f"({k}, {p}^{m}): trivial, g = 1"]
    else:
        cls = classify.classify_pair(k, p, m)
        kv = classify.known_value(k, p, m) if exists else None
        payload = {
            "k": str(k),
            "k_input": str(args.k),
            "kind": cls.kind,
            "witness": None if cls.witness is None else str(cls.witness),
            "is_new": cls.is_new,
            "exists": exists,
            "value": None if kv is None else str(kv.value),
            "citation": None if kv is None else kv.citation,
        }
        lines = [
            f"({k}, {p}^{m}): {cls.kind}"
            + (f" (witness divisor {cls.witness})" if cls.witness is not None else "")
            + (", new beyond the small range" if cls.is_new else "")
            + ("" if exists else ", Waring number does not exist")
            + (f", known value {kv.value} {kv.citation}" if kv else "")
        ]
    _emit(payload, args.json, int((time.perf_counter() - t0) * 1000), lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# scan / families
# ---------------------------------------------------------------------------

_CSV_COLUMNS = ["p", "m", "k", "value", "method", "citation", "bfs_checked", "elapsed_ms"]


def cmd_scan(args) -> int:
    ranges = {}
    for name in ("p_max", "a_max", "b_max", "t_max", "l_max", "h_max", "q_max"):
        v = getattr(args, name)
        if v is not None:
            ranges[name] = v
    try:
        rows = classify.family_scan(args.family, ranges)
    except classify.UnknownFamilyError:
        raise CliError(f"unknown family {args.family!r}; choose from {classify.scannable_families()}")
    budget = args.budget or DEFAULT_BFS_BUDGET
    out_rows = []
    for row in rows:
        q = row.p**row.m
        t0 = time.perf_counter()
        checked = False
        if args.check and q <= budget and not row.disputed:
            from .gpgraph import waring_number_bfs

            bfs = waring_number_bfs(row.p, row.m, arith.normalize_k(row.k, q), budget=budget)
            if bfs != row.value:
                raise CliError(f"catalog row {row} contradicts BFS value {bfs}", code=1)
            checked = True
        out_rows.append(
            {
                "p": str(row.p),
                "m": str(row.m),
                "k": str(row.k),
                "value": str(row.value),
                "method": "Catalog",
                "citation": row.citation,
                "bfs_checked": checked,
                "elapsed_ms": int((time.perf_counter() - t0) * 1000),
            }
        )
    fmt = args.format or ("json" if args.out and args.out.endswith(".json") else "csv")
    try:
        if args.out:
            fh = open(args.out, "w", encoding="utf-8", newline="")
        else:
            fh = sys.stdout
        if fmt == "json":
            json.dump({"family": args.family, "rows": out_rows}, fh, sort_keys=True, indent=1)
            fh.write("\n")
        else:
            w = csv.DictWriter(fh, fieldnames=_CSV_COLUMNS)
            w.writeheader()
            for r in out_rows:
                w.writerow(r)
        if args.out:
            fh.close()
            print(f"wrote {len(out_rows)} rows to {args.out}")
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}")
    return EXIT_OK


def cmd_families(args) -> int:
    payload = [
        {
            "id": fam.id,
            "citation": fam.citation,
            "description": fam.description,
            "disputed": fam.disputed,
            "scannable": fam.id in classify.scannable_families(),
        }
        for fam in classify.FAMILIES.values()
    ]
    if args.json:
        _emit({"families": payload}, True, 0)
    else:
        for f in payload:
            flag = " [disputed]" if f["disputed"] else ""
            print(f"{f['id']:<14} {f['citation']:<16}{flag} {f['description']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--budget", type=int, default=None, help="BFS vertex budget (default 2^20)")
    common.add_argument("--cache", default=None, help="JSONL result cache path")
    common.add_argument("--threads", type=int, default=1, help="worker processes for scans")

    ap = argparse.ArgumentParser(prog="waringff", description="Waring numbers over finite fields, exactly.")
    sub = ap.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("compute", parents=[common], help="compute g(k, q) with a certificate")
    pc.add_argument("--p", type=int, required=True)
    pc.add_argument("--m", type=int, required=True)
    pc.add_argument("--k", type=int, required=True)
    pc.add_argument("--method", choices=["auto", "bfs", "reduce"], default="auto")
    pc.set_defaults(func=cmd_compute)

    pv = sub.add_parser("verify", parents=[common], help="run a verification suite")
    pv.add_argument("suite", choices=sorted(suites.SUITES))
    pv.add_argument("--max-q", type=int, default=None, dest="max_q")
    pv.set_defaults(func=cmd_verify)

    pd = sub.add_parser("decompose", parents=[common], help="Cartesian decomposition witness")
    pd.add_argument("--p", type=int, required=True)
    pd.add_argument("--m", type=int, required=True)
    pd.add_argument("--k", type=int, required=True)
    pd.set_defaults(func=cmd_decompose)

    pk = sub.add_parser("classify", parents=[common], help="classify a pair (k, p^m)")
    pk.add_argument("--p", type=int, required=True)
    pk.add_argument("--m", type=int, required=True)
    pk.add_argument("--k", type=int, required=True)
    pk.set_defaults(func=cmd_classify)

    ps = sub.add_parser("scan", parents=[common], help="materialize a value family")
    ps.add_argument("--family", required=True)
    ps.add_argument("--out", default=None)
    ps.add_argument("--format", choices=["csv", "json"], default=None)
    ps.add_argument("--check", action=argparse.BooleanOptionalAction, default=True,
                    help="BFS-verify rows within budget (default on)")
    for name in ("p_max", "a_max", "b_max", "t_max", "l_max", "h_max", "q_max"):
        ps.add_argument(f"--{name.replace('_', '-')}", type=int, default=None, dest=name)
    ps.set_defaults(func=cmd_scan)

    pf = sub.add_parser("families", parents=[common], help="list catalog families")
    pf.set_defaults(func=cmd_families)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
