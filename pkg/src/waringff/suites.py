"""Verification suites: exhaustive scans of the library's invariants.

Each suite returns a SuiteReport with a machine-readable failure list;
they are the engines behind the CLI `verify` command and the acceptance
tests.  Scans that dominate runtime (reduction, semiprimitive, catalog,
existence) can fan out over worker processes.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import arith, classify, reduction
from .arith import is_primitive_divisor
from .ff import build_field
from .gpgraph import arc_sets_equal, cartesian_decomposition, gp_graph, waring_number_bfs


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "checked": self.checked,
            "passed": self.passed,
            "failures": self.failures,
            "notes": self.notes,
        }


def _primes_up_to(n):
    return [p for p in range(2, n + 1) if arith.is_probable_prime(p)]


def _prime_powers_up_to(n):
    out = []
    for p in _primes_up_to(n):
        q, m = p, 1
        while q <= n:
            out.append((p, m, q))
            q *= p
            m += 1
    return sorted(out, key=lambda t: t[2])


# ---------------------------------------------------------------------------
# psi arithmetic
# ---------------------------------------------------------------------------


def _psi_sweep(x, n, length):
    """[psi_1(x) mod n, ..., psi_length(x) mod n] incrementally."""
    out = []
    acc = 0
    for _ in range(length):
        acc = (acc * x + 1) % n
        out.append(acc)
    return out


def suite_psi(ranges: dict[int, int] | None = None) -> SuiteReport:
    """Geometric-sum divisibility facts, exhaustively over small prime powers.

    For every unit x mod r^t whose order is a power r^h of r:
      (a) psi_{r^h}(x) == r^h (mod r^t) when 2h <= t,
      (c) psi_{e r^h + l}(x) == e psi_{r^h}(x) + psi_l(x) (mod r^t),
      (pp) r^t never divides psi_s(x) for 1 <= s < r^t,
    and for every unit x and all small (a, b):
      (d) psi_{ab}(x) == psi_b(x^a) psi_a(x) (mod r^t).
    Also the iff of  r^t | psi_{r^t}(x)  <=>  ord(x) is a power of r.
    """
    rep = SuiteReport("psi")
    t0 = time.perf_counter()
    ranges = ranges or {3: 4, 5: 4, 7: 3}
    for r, tmax in sorted(ranges.items()):
        for t in range(1, tmax + 1):
            rt = r**t
            for x in range(1, rt):
                if x % r == 0:
                    continue
                o = arith.mult_order(x, rt)
                # (d) for every unit
                for aa in range(1, 13):
                    xa = pow(x, aa, rt)
                    for bb in range(1, 13):
                        rep.checked += 1
                        if not arith.psi_factor_identity_check(aa, bb, x, rt):
                            rep.failures.append({"check": "d", "r": r, "t": t, "x": x, "a": aa, "b": bb})
                # lemma iff: r^t | psi_{r^t}(x)  <=>  ord is an r-power
                rep.checked += 1
                ord_is_rpow = o == 1 or (len(fo := arith.factorize(o)) == 1 and fo[0][0] == r)
                if (arith.psi_mod(rt, x, rt) == 0) != ord_is_rpow:
                    rep.failures.append({"check": "lemma-iff", "r": r, "t": t, "x": x, "ord": o})
                if not ord_is_rpow:
                    continue
                h = 0 if o == 1 else arith.valuation(r, o)
                rh = r**h
                sweep = _psi_sweep(x, rt, max(rt - 1, (2 * r + 1) * rh + rh))
                # (pp): no psi_s vanishes below r^t
                for s in range(1, rt):
                    rep.checked += 1
                    if sweep[s - 1] == 0:
                        rep.failures.append({"check": "pp", "r": r, "t": t, "x": x, "s": s})
                # (a)
                if 2 * h <= t:
                    rep.checked += 1
                    if sweep[rh - 1] != rh % rt:
                        rep.failures.append({"check": "a", "r": r, "t": t, "x": x, "h": h})
                # (c) over e up to 2r and every l < r^h
                psi_rh = sweep[rh - 1]
                for e in range(1, 2 * r + 1):
                    for ell in range(1, rh):
                        rep.checked += 1
                        lhs = sweep[e * rh + ell - 1]
                        if lhs != (e * psi_rh + sweep[ell - 1]) % rt:
                            rep.failures.append({"check": "c", "r": r, "t": t, "x": x, "e": e, "l": ell})
    rep.elapsed = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# existence <=> BFS coverage
# ---------------------------------------------------------------------------


def _existence_task(args):
    p, m, q = args
    failures = []
    checked = 0
    for k in arith.divisors(q - 1):
        checked += 1
        predicted = arith.waring_exists(k, p, m)
        actual = waring_number_bfs(p, m, k, budget=max(q, 1 << 20)) is not None
        if predicted != actual:
            failures.append({"p": p, "m": m, "k": k, "criterion": predicted, "bfs": actual})
    return checked, failures


def suite_existence(max_q: int = 5000, threads: int = 1) -> SuiteReport:
    """The existence criterion agrees with BFS full reachability for every
    k | q - 1, q <= max_q."""
    rep = SuiteReport("existence")
    t0 = time.perf_counter()
    tasks = _prime_powers_up_to(max_q)
    for checked, failures in _run_tasks(_existence_task, tasks, threads):
        rep.checked += checked
        rep.failures.extend(failures)
    rep.elapsed = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# reduction-oracle equivalence (and the decomposable-pair harvest)
# ---------------------------------------------------------------------------


def reduction_instances(max_q: int):
    """All (p, a, b, c) with b >= 2, p^(ab) <= max_q and the main reduction
    conditions satisfied; yields (p, m, a, b, c, u, k)."""
    for p in _primes_up_to(math.isqrt(max_q)):
        m = 2
        while p**m <= max_q:
            q = p**m
            for b in arith.divisors(m):
                if b < 2:
                    continue
                a = m // b
                pa1 = p**a - 1
                for c in arith.divisors(pa1):
                    if not is_primitive_divisor(c, p, a):
                        continue
                    if not reduction.check_main_conditions(p, a, b, c):
                        continue
                    u = pa1 // c
                    k = (q - 1) // (b * c)
                    yield (p, m, a, b, c, u, k)
            m += 1


def _reduction_task(args):
    p, max_q = args
    failures = []
    checked = 0
    pairs = set()
    m = 2
    while p**m <= max_q:
        q = p**m
        for b in arith.divisors(m):
            if b < 2:
                continue
            a = m // b
            pa1 = p**a - 1
            for c in arith.divisors(pa1):
                if not is_primitive_divisor(c, p, a):
                    continue
                if not reduction.check_main_conditions(p, a, b, c):
                    continue
                u = pa1 // c
                k = (q - 1) // (b * c)
                checked += 1
                budget = max(q, 1 << 20)
                g_small = waring_number_bfs(p, a, u, budget=budget)
                g_big = waring_number_bfs(p, m, k, budget=budget)
                pairs.add((p, m, k))
                if g_small is None or g_big is None or g_big != b * g_small:
                    failures.append(
                        {"p": p, "a": a, "b": b, "c": c, "u": u, "k": k, "g_small": g_small, "g_big": g_big}
                    )
        m += 1
    return checked, failures, sorted(pairs)


def suite_reduction(max_q: int = 1 << 18, threads: int = 1) -> SuiteReport:
    """b * g(u, p^a) == g(k, p^(ab)) for every admissible (p, a, b, c) with
    p^(ab) <= max_q, zero tolerance.  The report's notes carry the distinct
    decomposable pairs encountered (consumed by the decomposition suite)."""
    rep = SuiteReport("reduction")
    t0 = time.perf_counter()
    tasks = [(p, max_q) for p in _primes_up_to(math.isqrt(max_q))]
    all_pairs = set()
    for checked, failures, pairs in _run_tasks(_reduction_task, tasks, threads):
        rep.checked += checked
        rep.failures.extend(failures)
        all_pairs.update(tuple(t) for t in pairs)
    rep.notes.append({"decomposable_pairs": sorted(all_pairs)})
    rep.elapsed = time.perf_counter() - t0
    return rep


def suite_bprime_iff(p_max: int = 13, max_q: int = 1 << 18) -> SuiteReport:
    """check_b_prime agrees with check_main_conditions in both directions
    over all prime b != p, p <= p_max, p^(ab) <= max_q, c † p^a - 1."""
    rep = SuiteReport("bprime-iff")
    t0 = time.perf_counter()
    for p in _primes_up_to(p_max):
        a = 1
        while p ** (2 * a) <= max_q:
            pa1 = p**a - 1
            prim_cs = [c for c in arith.divisors(pa1) if is_primitive_divisor(c, p, a)]
            for b in _primes_up_to(max_q):
                if b == p or p ** (a * b) > max_q:
                    continue
                for c in prim_cs:
                    rep.checked += 1
                    if reduction.check_b_prime(p, a, b, c) != reduction.check_main_conditions(p, a, b, c):
                        rep.failures.append({"p": p, "a": a, "b": b, "c": c})
            a += 1
    rep.elapsed = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# decomposition witnesses
# ---------------------------------------------------------------------------


def _decomposition_task(args):
    (p, m, k), arc_check_below = args
    failures = []
    notes = []
    g = gp_graph(build_field(p, m), k)
    try:
        w = cartesian_decomposition(g)
    except Exception as exc:  # verification failure inside the witness builder
        return 1, [{"p": p, "m": m, "k": k, "error": repr(exc)}], notes
    if w is None:
        return 1, [{"p": p, "m": m, "k": k, "error": "expected a witness, got none"}], notes
    if p**m <= arc_check_below:
        if not arc_sets_equal(g, w):
            failures.append({"p": p, "m": m, "k": k, "error": "exhaustive arc-set equality failed"})
        else:
            notes.append({"arc_checked": [p, m, k]})
    return 1, failures, notes


def suite_decomposition(max_q: int = 1 << 18, threads: int = 1, arc_check_below: int = 400,
                        pairs=None) -> SuiteReport:
    """Every decomposable pair in the reduction scan yields a verified
    witness; pairs with q below arc_check_below additionally get the literal
    quadratic arc-set comparison."""
    rep = SuiteReport("decomposition")
    t0 = time.perf_counter()
    if pairs is None:
        pairs = sorted({(p, m, k) for (p, m, a, b, c, u, k) in reduction_instances(max_q)})
    tasks = [(t, arc_check_below) for t in pairs]
    for checked, failures, notes in _run_tasks(_decomposition_task, tasks, threads):
        rep.checked += checked
        rep.failures.extend(failures)
        rep.notes.extend(notes)
    rep.elapsed = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# semiprimitive / exceptional soundness
# ---------------------------------------------------------------------------


def _semiprimitive_task(args):
    p, m, q = args
    failures = []
    checked = 0
    for k in arith.divisors(q - 1):
        if k < 2:
            continue
        cls = classify.classify_pair(k, p, m)
        if cls.kind not in (classify.SEMIPRIMITIVE, classify.EXCEPTIONAL):
            continue
        checked += 1
        v = waring_number_bfs(p, m, k, budget=max(q, 1 << 20))
        if v != 2:
            failures.append({"p": p, "m": m, "k": k, "kind": cls.kind, "bfs": v})
    return checked, failures


def suite_semiprimitive(max_q: int = 1 << 16, threads: int = 1) -> SuiteReport:
    """Every pair classified semiprimitive or exceptional with q <= max_q has
    BFS value exactly 2."""
    rep = SuiteReport("semiprimitive")
    t0 = time.perf_counter()
    tasks = [t for t in _prime_powers_up_to(max_q) if t[1] >= 2]  # m = 1 admits no such pair
    for checked, failures in _run_tasks(_semiprimitive_task, tasks, threads):
        rep.checked += checked
        rep.failures.extend(failures)
    rep.elapsed = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# closed-form cross-checks
# ---------------------------------------------------------------------------


def suite_kononen(max_q: int = 1 << 18) -> SuiteReport:
    """Both closed forms agree with BFS on every instance with q <= max_q."""
    rep = SuiteReport("kononen")
    t0 = time.perf_counter()
    e_max = max_q.bit_length()
    for r in _primes_up_to(e_max + 1):
        t = 1
        while arith.euler_phi(r**t) <= e_max:
            if r != 2 or t == 2:
                e = arith.euler_phi(r**t)
                for p in _primes_up_to(int(max_q ** (1.0 / e)) + 1):
                    if p == r or p**e > max_q:
                        continue
                    for op, name in ((reduction.kononen1, "kononen1"), (reduction.kononen2, "kononen2")):
                        if name == "kononen2" and (p == 2 or r == 2):
                            continue
                        try:
                            k, q, value = op(p, r, t)
                        except reduction.NotPrimitiveRootError:
                            continue
                        rep.checked += 1
                        bfs = waring_number_bfs(p, e, k, budget=max(q, 1 << 20))
                        if bfs != value:
                            rep.failures.append({"form": name, "p": p, "r": r, "t": t, "k": k, "q": q,
                                                 "formula": value, "bfs": bfs})
                        else:
                            rep.notes.append({"form": name, "k": k, "q": q, "value": value})
            t += 1
    rep.elapsed = time.perf_counter() - t0
    return rep


def suite_catalog(max_q: int = 1 << 18, threads: int = 1) -> SuiteReport:
    """Every non-disputed catalog row with q <= max_q equals BFS; disputed
    rows are reported with their oracle truth instead."""
    rep = SuiteReport("catalog")
    t0 = time.perf_counter()
    ranges = {"p_max": 100, "a_max": 4, "b_max": 11, "t_max": 3, "l_max": 4, "h_max": 512, "q_max": max_q}
    tasks = []
    for fam in classify.scannable_families():
        for row in classify.family_scan(fam, ranges):
            if row.p**row.m <= max_q:
                tasks.append((fam, row))
    for fam, row in tasks:
        q = row.p**row.m
        kn = arith.normalize_k(row.k, q)
        bfs = waring_number_bfs(row.p, row.m, kn, budget=max(q, 1 << 20))
        if row.disputed:
            rep.notes.append(
                {"family": fam, "k": row.k, "p": row.p, "m": row.m, "claimed": row.value, "bfs": bfs}
            )
            continue
        rep.checked += 1
        if bfs != row.value:
            rep.failures.append({"family": fam, "k": row.k, "p": row.p, "m": row.m, "value": row.value, "bfs": bfs})
    rep.elapsed = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# worker-pool plumbing
# ---------------------------------------------------------------------------


def _run_tasks(fn, tasks, threads):
    if threads <= 1:
        for t in tasks:
            yield fn(t)
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(fn, tasks)


SUITES = {
    "reduction": lambda max_q, threads: suite_reduction(max_q or (1 << 18), threads),
    "psi": lambda max_q, threads: suite_psi(),
    "decomposition": lambda max_q, threads: suite_decomposition(max_q or (1 << 18), threads),
    "existence": lambda max_q, threads: suite_existence(max_q or 5000, threads),
    "semiprimitive": lambda max_q, threads: suite_semiprimitive(max_q or (1 << 16), threads),
    "kononen": lambda max_q, threads: suite_kononen(max_q or (1 << 18)),
    "catalog": lambda max_q, threads: suite_catalog(max_q or (1 << 18), threads),
}
