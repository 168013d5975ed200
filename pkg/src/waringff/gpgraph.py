"""Generalized Paley graphs as implicit Cayley graphs, and exact Waring
numbers by BFS.

The graph of a pair (k, q) has vertex set F_q and an arc u -> v exactly
when v - u is a k-th power of a nonzero element.  Adjacency is never
materialized: BFS expands frontiers by adding each residue to every
frontier vertex.  Distances from 0 equal every vertex's eccentricity
because translations x -> x + t are arc-preserving automorphisms, so the
diameter is the eccentricity of 0; that claim is not taken on faith, the
test suite spot-checks it from random start vertices.

BFS follows arcs forward only (x is reachable from 0 in s steps iff x is
a sum of s k-th powers); directed graphs are never symmetrized.
"""

import functools
import time
from dataclasses import dataclass

import numpy as np

from . import arith, ff
from .ff import BudgetExceededError, FieldTable, ResidueSet, build_field, power_residues

DEFAULT_BFS_BUDGET = 1 << 20

# frontier*degree below this: plain python sets beat numpy call overhead
_TINY_WORK = 64
# degree at which per-level FFT convolution over (Z_p)^m beats explicit
# neighbor generation
_DENSE_DEGREE = 48
_DENSE_MIN_Q = 1024


class WitnessVerificationFailedError(RuntimeError):
    """Internal consistency failure while building a decomposition witness.

    This signals an implementation bug, never an expected condition.
    """


@dataclass(frozen=True)
class GPGraph:
    field: FieldTable
    k: int
    residues: ResidueSet
    n: int

    def __repr__(self):
        return f"GPGraph(k={self.k}, q={self.field.q})"


def gp_graph(field: FieldTable, k: int) -> GPGraph:
    """Build the graph for (k, q), normalizing k by gcd(k, q-1) up front."""
    kn = arith.normalize_k(k, field.q)
    res = power_residues(field, kn)
    return GPGraph(field, kn, res, res.n)


@dataclass
class WaringResult:
    value: int | None  # None means the Waring number does not exist
    method: str
    elapsed: float

    @property
    def exists(self) -> bool:
        return self.value is not None


# ---------------------------------------------------------------------------
# structural predicates
# ---------------------------------------------------------------------------


def is_undirected(g: GPGraph) -> bool:
    """q even, or k | (q-1)/2; equivalent to R_k == -R_k."""
    q = g.field.q
    if q % 2 == 0:
        return True
    return ((q - 1) // 2) % g.k == 0


def is_connected(g: GPGraph) -> bool:
    """n = (q-1)/k is a primitive divisor of q - 1.

    Treated as an exact criterion and cross-checked against BFS
    reachability by the verification suites.
    """
    return arith.is_primitive_divisor(g.n, g.field.p, g.field.m)


# ---------------------------------------------------------------------------
# BFS
# ---------------------------------------------------------------------------


def _bfs_levels_python(F, gens, visited, frontier, add_scalar):
    """One frontier expansion in pure python; returns the new frontier list."""
    nxt = []
    for x in frontier:
        for r in gens:
            y = add_scalar(x, r)
            if not visited[y]:
                visited[y] = True
                nxt.append(y)
    return nxt


def _expand_sparse(F: FieldTable, gens: np.ndarray, frontier: np.ndarray, q: int):
    """All neighbors of the frontier as a bool mask (may include visited)."""
    mask = np.zeros(q, dtype=bool)
    p, m = F.p, F.m
    if p == 2:
        for chunk in np.array_split(frontier, max(1, frontier.size * gens.size // (1 << 21))):
            mask[(chunk[:, None] ^ gens[None, :]).ravel()] = True
        return mask
    ppows = np.array([p**i for i in range(m)], dtype=np.int64)
    gd = ((gens[None, :].astype(np.int64) // ppows[:, None]) % p).astype(np.int32)  # m x n
    for chunk in np.array_split(frontier, max(1, frontier.size * gens.size // (1 << 20))):
        c = chunk.astype(np.int64)
        acc = np.zeros((c.size, gens.size), dtype=np.int64)
        for i in range(m):
            s = (c[:, None] // ppows[i]) % p + gd[i][None, :]
            s -= p * (s >= p)
            acc += s * ppows[i]
        mask[acc.ravel()] = True
    return mask


def _strategy_for(q: int, n: int, frontier_size: int) -> str:
    if n >= _DENSE_DEGREE and q >= _DENSE_MIN_Q:
        return "dense"
    if frontier_size * n <= _TINY_WORK:
        return "python"
    return "sparse"


def _bfs(g: GPGraph, start: int = 0, strategy: str | None = None):
    """BFS over forward arcs; returns (eccentricity-of-start, reached count).

    strategy: None = per-level auto; "python" | "sparse" | "dense" to force
    one path (the suites assert all three agree).
    """
    F = g.field
    q = F.q
    gens = g.residues.members.astype(np.int32)
    gens_list = [int(r) for r in gens]
    visited = np.zeros(q, dtype=bool)
    visited[start] = True
    frontier = np.array([start], dtype=np.int32)
    reached = 1
    depth = 0

    fft_R = None
    shape = (F.p,) * F.m
    add_scalar = (lambda x, r: x ^ r) if F.p == 2 else F.add

    while frontier.size:
        strat = strategy or _strategy_for(q, g.n, int(frontier.size))
        if strat == "python":
            nxt_list = _bfs_levels_python(F, gens_list, visited, [int(x) for x in frontier], add_scalar)
            if not nxt_list:
                break
            reached += len(nxt_list)
            depth += 1
            frontier = np.array(nxt_list, dtype=np.int32)
            continue
        if strat == "dense":
            if fft_R is None:
                ind = np.zeros(q)
                ind[gens] = 1.0
                fft_R = np.fft.rfftn(ind.reshape(shape))
            find = np.zeros(q)
            find[frontier] = 1.0
            conv = np.fft.irfftn(np.fft.rfftn(find.reshape(shape)) * fft_R, s=shape).ravel()
            new = (conv > 0.5) & ~visited
        else:
            new = _expand_sparse(F, gens, frontier, q) & ~visited
        cnt = int(new.sum())
        if cnt == 0:
            break
        visited |= new
        reached += cnt
        depth += 1
        frontier = np.nonzero(new)[0].astype(np.int32)
    return depth, reached


def waring_bfs(g: GPGraph, budget: int = DEFAULT_BFS_BUDGET, strategy: str | None = None) -> WaringResult:
    """Exact g(k, q) as the BFS depth from 0, or NonExistent if the graph
    does not cover F_q."""
    q = g.field.q
    if q > budget:
        raise BudgetExceededError(f"q={q} exceeds BFS budget {budget}")
    t0 = time.perf_counter()
    depth, reached = _bfs(g, 0, strategy)
    elapsed = time.perf_counter() - t0
    return WaringResult(depth if reached == q else None, "BFS", elapsed)


@functools.lru_cache(maxsize=None)
def _waring_value_cached(p: int, m: int, k: int) -> int | None:
    g = gp_graph(build_field(p, m), k)
    return waring_bfs(g, budget=1 << 62).value


def waring_number_bfs(p: int, m: int, k: int, budget: int = DEFAULT_BFS_BUDGET) -> int | None:
    """Memoized g(gcd(k, q-1), q) by BFS; None when it does not exist."""
    q = p**m
    if q > budget:
        raise BudgetExceededError(f"q={q} exceeds BFS budget {budget}")
    return _waring_value_cached(p, m, arith.normalize_k(k, q))


# ---------------------------------------------------------------------------
# Cartesian decomposition witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecompositionWitness:
    """Verified data exhibiting Γ(k, p^(ab)) as a b-fold Cartesian power of
    Γ(u, p^a) (directed product when p and bc are odd).

    cosets[i-1] holds S_i = C * omega^(k*i) for i = 1..b, so the last coset
    is the multiplicative subgroup C of order c itself.  subgroup_bases[i-1]
    is an F_p-basis of the additive span of S_i; the spans intersect
    trivially pairwise and jointly span F_q.
    """

    a: int
    b: int
    c: int
    u: int
    cosets: tuple[tuple[int, ...], ...]
    subgroup_bases: tuple[tuple[int, ...], ...]
    directed: bool


def _rank_mod_p(rows, p, m):
    """Rank of the digit-vector rows over F_p (Gaussian elimination)."""
    mat = [list(r) for r in rows]
    rank = 0
    for col in range(m):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], p - 2, p)
        mat[rank] = [(x * inv) % p for x in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                f = mat[i][col]
                mat[i] = [(x - f * y) % p for x, y in zip(mat[i], mat[rank])]
        rank += 1
    return rank


def _additive_span(F: FieldTable, elems):
    """(basis, span-set) of the F_p-additive span of the given encodings."""
    basis = []
    span = {0}
    for s in elems:
        if s in span:
            continue
        basis.append(s)
        add = F.add
        new = set()
        for x in span:
            y = x
            for _ in range(F.p - 1):
                y = add(y, s)
                new.add(y)
        # close over the new basis vector's multiples added to everything
        span |= new
        # rebuild fully to be safe against non-closure
        changed = True
        while changed:
            changed = False
            for_add = list(span)
            for x in for_add:
                y = add(x, s)
                if y not in span:
                    span.add(y)
                    changed = True
    return basis, span


def decomposition_parameters(g: GPGraph) -> list[tuple[int, int, int, int]]:
    """All (a, b, c, u) with n = b*c, b | m, b > 1, c > 1 a primitive divisor
    of p^a - 1 (a = m/b), sorted by ascending p^a then ascending b."""
    F = g.field
    p, m, n = F.p, F.m, g.n
    out = []
    for b in arith.divisors(m):
        if b == 1 or n % b != 0:
            continue
        a = m // b
        c = n // b
        if c > 1 and arith.is_primitive_divisor(c, p, a):
            out.append((a, b, c, (p**a - 1) // c))
    out.sort(key=lambda t: (p ** t[0], t[1]))
    return out


def cartesian_decomposition(g: GPGraph) -> DecompositionWitness | None:
    """Witness for the first admissible (a, b, c), or None.

    The returned witness is verified before being handed back: coset
    structure, additive direct sum, and the factor isomorphism onto the
    standard Γ(u, p^a).  Any internal check failing raises
    WitnessVerificationFailedError.
    """
    if not is_connected(g):
        raise ValueError(f"{g} is not connected")
    params = decomposition_parameters(g)
    if not params:
        return None
    a, b, c, u = params[0]
    F = g.field
    q, k = F.q, g.k

    t = (q - 1) // c  # C = R_t, the subgroup of order c
    cosets = []
    for i in range(1, b + 1):
        coset = tuple(sorted(int(F.exp[(t * j + k * i) % (q - 1)]) for j in range(c)))
        cosets.append(coset)

    # S_b must be C itself
    C = tuple(sorted(int(F.exp[(t * j) % (q - 1)]) for j in range(c)))
    if cosets[-1] != C:
        raise WitnessVerificationFailedError("last coset differs from the order-c subgroup")

    # disjoint union of the cosets must be exactly R_k
    merged = sorted(x for cs in cosets for x in cs)
    if len(set(merged)) != len(merged) or merged != [int(x) for x in g.residues.members]:
        raise WitnessVerificationFailedError("cosets do not partition the residue set")

    bases = []
    spans = []
    pa = F.p**a
    for coset in cosets:
        basis, span = _additive_span(F, coset)
        if len(span) != pa or len(basis) != a:
            raise WitnessVerificationFailedError("additive span has wrong size")
        bases.append(tuple(basis))
        spans.append(span)

    # joint direct sum <=> the m stacked basis digit-vectors have full rank
    rows = [F.digits(v) for basis in bases for v in basis]
    if _rank_mod_p(rows, F.p, F.m) != F.m:
        raise WitnessVerificationFailedError("spans do not form a direct sum")

    # the last span must be the subfield of size p^a, and the factor graph
    # on it must be isomorphic to Γ(u, p^a)
    _verify_factor_iso(F, a, c, u, spans[-1], set(cosets[-1]))

    directed = (F.p % 2 == 1) and ((b * c) % 2 == 1)
    if directed == is_undirected(g):
        raise WitnessVerificationFailedError("directedness flag contradicts the graph")
    return DecompositionWitness(a, b, c, u, tuple(cosets), tuple(bases), directed)


def _subfield_iso(F: FieldTable, a: int):
    """Map the size-p^a subfield of F onto the standard F_{p^a}.

    Returns (base_field, psi) with psi a dict over the subfield encodings.
    The subfield generator h = omega^((q-1)/(p^a-1)) is sent to the
    smallest root of its minimal polynomial in the base field, which makes
    the map a field isomorphism and keeps it deterministic.
    """
    q = F.q
    pa = F.p**a
    tprime = (q - 1) // (pa - 1)
    h = int(F.exp[tprime])
    Fb = build_field(F.p, a)

    # minimal polynomial of h over F_p via the Frobenius orbit
    orbit = []
    x = h
    for _ in range(a):
        orbit.append(x)
        x = F.pow(x, F.p)
    if x != h or len(set(orbit)) != a:
        raise WitnessVerificationFailedError("subfield generator has wrong degree")
    poly = [1]  # coefficients in F_q encodings, little-endian
    for r in orbit:
        nr = F.neg(r)
        nxt = [0] * (len(poly) + 1)
        for i, cf in enumerate(poly):
            nxt[i + 1] = F.add(nxt[i + 1], cf)
            nxt[i] = F.add(nxt[i], F.mul(cf, nr))
        poly = nxt
    if any(cf >= F.p for cf in poly):  # must collapse into the prime field
        raise WitnessVerificationFailedError("minimal polynomial not over F_p")

    rho = None
    for y in range(1, pa):
        acc = 0
        for cf in reversed(poly):
            acc = Fb.add(Fb.mul(acc, y), cf % Fb.p)
        if acc == 0:
            rho = y
            break
    if rho is None:
        raise WitnessVerificationFailedError("minimal polynomial has no root in base field")

    lr = int(Fb.log[rho])
    psi = {0: 0}
    for j in range(pa - 1):
        psi[int(F.exp[(tprime * j) % (q - 1)])] = int(Fb.exp[(j * lr) % (pa - 1)])
    return Fb, psi


def _verify_factor_iso(F, a, c, u, span_b, coset_b):
    subfield = {0} | {int(F.exp[((F.q - 1) // (F.p**a - 1)) * j % (F.q - 1)]) for j in range(F.p**a - 1)}
    if span_b != subfield:
        raise WitnessVerificationFailedError("span of C is not the subfield")
    Fb, psi = _subfield_iso(F, a)
    ru = {int(x) for x in power_residues(Fb, u).members}
    if {psi[x] for x in coset_b} != ru:
        raise WitnessVerificationFailedError("factor connection set does not map onto R_u")
    # additivity spot check (the minimal-polynomial construction already
    # forces a field isomorphism; this catches table corruption)
    elems = sorted(span_b)
    step = max(1, len(elems) // 16)
    for x in elems[::step]:
        for y in elems[::step]:
            if psi[F.add(x, y)] != Fb.add(psi[x], psi[y]):
                raise WitnessVerificationFailedError("subfield map is not additive")


def diameter_additivity_check(witness: DecompositionWitness, g: GPGraph,
                              budget: int = DEFAULT_BFS_BUDGET) -> bool:
    """g(k, p^m) == b * g(u, p^a) for the witnessed decomposition."""
    F = g.field
    whole = waring_bfs(g, budget=budget).value
    factor = waring_number_bfs(F.p, witness.a, witness.u, budget=budget)
    return whole is not None and factor is not None and whole == witness.b * factor


# ---------------------------------------------------------------------------
# exhaustive arc-set comparison (the independent oracle used by the tests)
# ---------------------------------------------------------------------------


def _solve_coordinates(F: FieldTable, witness: DecompositionWitness):
    """Per-vertex decomposition x = sum_i x_i with x_i in span_i.

    Returns a list mapping every encoding to its tuple of components.
    Solved by inverting the stacked basis matrix over F_p once.
    """
    p, m = F.p, F.m
    basis_vectors = [v for basis in witness.subgroup_bases for v in basis]
    # columns = basis vectors as digit vectors; solve M * coeffs = digits(x)
    M = [[F.digits(v)[row] for v in basis_vectors] for row in range(m)]
    # invert M mod p (augmented Gaussian elimination)
    aug = [list(M[i]) + [1 if i == j else 0 for j in range(m)] for i in range(m)]
    for col in range(m):
        piv = next(i for i in range(col, m) if aug[i][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], p - 2, p)
        aug[col] = [(x * inv) % p for x in aug[col]]
        for i in range(m):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[col])]
    Minv = [row[m:] for row in aug]

    sizes = [len(b) for b in witness.subgroup_bases]
    comps_per_vertex = []
    for x in range(F.q):
        d = F.digits(x)
        coeffs = [sum(Minv[i][j] * d[j] for j in range(m)) % p for i in range(m)]
        comps = []
        off = 0
        for bi, basis in enumerate(witness.subgroup_bases):
            xi = 0
            for cf, v in zip(coeffs[off : off + sizes[bi]], basis):
                for _ in range(cf):
                    xi = F.add(xi, v)
            comps.append(xi)
            off += sizes[bi]
        comps_per_vertex.append(tuple(comps))
    return comps_per_vertex


def arc_sets_equal(g: GPGraph, witness: DecompositionWitness) -> bool:
    """Literal arc-set equality between Γ(k, q) and the b-fold (directed)
    Cartesian product of Γ(u, p^a), enumerated over all q*n arcs.

    Quadratic in q; intended for desk-size graphs.
    """
    F = g.field
    q = F.q
    comps = _solve_coordinates(F, witness)
    coset_sets = [set(cs) for cs in witness.cosets]

    def product_arc(x, y):
        cx, cy = comps[x], comps[y]
        hits = [i for i in range(witness.b) if cx[i] != cy[i]]
        if len(hits) != 1:
            return False
        i = hits[0]
        diff = F.add(cy[i], F.neg(cx[i]))
        return diff in coset_sets[i]

    graph_arcs = set()
    for x in range(q):
        for r in g.residues.members:
            graph_arcs.add((x, F.add(x, int(r))))
    product_arcs = set()
    for x in range(q):
        for y in range(q):
            if x != y and product_arc(x, y):
                product_arcs.add((x, y))
    return graph_arcs == product_arcs
