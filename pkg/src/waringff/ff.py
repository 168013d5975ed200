"""Materialized finite fields F_{p^m} with O(1) multiplication.

Elements are encoded as integers in [0, q) by packing the coefficient
vector of the residue polynomial in base p (constant term = least
significant digit, 0 encodes the zero element).  Construction is fully
deterministic: the modulus is the monic irreducible polynomial whose
coefficient vector reads as the smallest base-p integer, and the
primitive element is the generator with the smallest encoding.  That
determinism is what makes certificates, caches and golden tests
reproducible across runs.
"""

import functools

import numpy as np

from . import arith

DEFAULT_FIELD_BUDGET = 1 << 22  # caps exp+log at ~32 MB of int32


class FieldError(ValueError):
    pass


class InvalidPrimeError(FieldError):
    pass


class BudgetExceededError(FieldError):
    pass


class NotNormalizedError(FieldError):
    pass


# ---------------------------------------------------------------------------
# dense polynomial arithmetic over F_p (little-endian coefficient lists)
# ---------------------------------------------------------------------------


def _ptrim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    # mod is monic
    dm = len(mod) - 1
    for d in range(len(out) - 1, dm - 1, -1):
        t = out[d]
        if t:
            out[d] = 0
            for j in range(dm):
                out[d - dm + j] = (out[d - dm + j] - t * mod[j]) % p
    return _ptrim(out)


def _ppowmod(a, e, mod, p):
    result = [1]
    base = list(a)
    while e:
        if e & 1:
            result = _pmulmod(result, base, mod, p)
        base = _pmulmod(base, base, mod, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        # a mod b with b made monic
        inv = pow(b[-1], p - 2, p)
        bm = [(c * inv) % p for c in b]
        r = list(a)
        while len(r) >= len(bm) and r:
            t = r[-1]
            if t:
                for j in range(len(bm)):
                    r[len(r) - len(bm) + j] = (r[len(r) - len(bm) + j] - t * bm[j]) % p
            r.pop()
            _ptrim(r)
        a, b = b, r
    return a


def _is_irreducible(low, p):
    """Rabin test for f = x^m + low(x):  x^(p^m) == x mod f and
    gcd(x^(p^(m/r)) - x, f) == 1 for every prime r | m."""
    m = len(low)
    f = list(low) + [1]
    x = [0, 1]
    if _ppowmod(x, p**m, f, p) != x:
        return False
    for r, _ in arith.factorize(m):
        h = _ppowmod(x, p ** (m // r), f, p)
        # h - x
        g = list(h) + [0] * max(0, 2 - len(h))
        g[1] = (g[1] - 1) % p
        _ptrim(g)
        if len(_pgcd(f, g, p)) != 1:
            return False
    return True


def _find_modulus(p, m):
    if m == 1:
        return (0,)
    # digit i of v = coefficient of x^i, so v ascending scans coefficient
    # vectors in base-p numeric order
    for v in range(p**m):
        low, t = [], v
        for _ in range(m):
            t, r = divmod(t, p)
            low.append(r)
        if _is_irreducible(low, p):
            return tuple(low)
    raise RuntimeError(f"no irreducible polynomial of degree {m} over F_{p}")


# ---------------------------------------------------------------------------
# field tables
# ---------------------------------------------------------------------------


class FieldSpec:
    """(p, m, modulus) with modulus as the length-m low-coefficient tuple."""

    __slots__ = ("p", "m", "modulus")

    def __init__(self, p, m, modulus):
        self.p = p
        self.m = m
        self.modulus = tuple(modulus)

    def __repr__(self):
        return f"FieldSpec(p={self.p}, m={self.m}, modulus={self.modulus})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.m, self.modulus) == (
            other.p,
            other.m,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))


class FieldTable:
    """F_{p^m} with exp/log tables over encoded elements.

    exp[i] = encoding of omega**i for 0 <= i < q-1; log[exp[i]] = i and
    log[0] = -1 (undefined).  Immutable after construction.
    """

    __slots__ = ("spec", "q", "exp", "log", "omega", "p", "m", "_ppows")

    def __init__(self, spec: FieldSpec, exp: np.ndarray, log: np.ndarray, omega: int):
        self.spec = spec
        self.p = spec.p
        self.m = spec.m
        self.q = spec.p**spec.m
        self.exp = exp
        self.log = log
        self.omega = omega
        self._ppows = tuple(spec.p**i for i in range(spec.m + 1))
        exp.flags.writeable = False
        log.flags.writeable = False

    def __repr__(self):
        return f"FieldTable(q={self.q}={self.p}^{self.m})"

    # -- scalar element ops --------------------------------------------------

    def digits(self, x: int) -> tuple:
        out = []
        for _ in range(self.m):
            x, r = divmod(x, self.p)
            out.append(r)
        return tuple(out)

    def add(self, x: int, y: int) -> int:
        p = self.p
        if p == 2:
            return x ^ y
        out = 0
        for i in range(self.m):
            pw = self._ppows[i]
            out += ((x // pw % p) + (y // pw % p)) % p * pw
        return out

    def neg(self, x: int) -> int:
        if self.p == 2:
            return x
        p = self.p
        out = 0
        for i in range(self.m):
            pw = self._ppows[i]
            d = x // pw % p
            if d:
                out += (p - d) * pw
        return out

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return int(self.exp[(int(self.log[x]) + int(self.log[y])) % (self.q - 1)])

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.exp[(-int(self.log[x])) % (self.q - 1)])

    def pow(self, x: int, e: int) -> int:
        if x == 0:
            if e == 0:
                return 1
            return 0
        return int(self.exp[(int(self.log[x]) * e) % (self.q - 1)])

    # -- vectorized add-by-constant (BFS inner loop) ---------------------------

    def add_array(self, xs: np.ndarray, r: int) -> np.ndarray:
        """Encodings xs  +  constant element r, digitwise mod p, no tables."""
        if self.p == 2:
            return xs ^ r
        p = self.p
        out = xs.copy()
        for i, d in enumerate(self.digits(r)):
            if d:
                pw = self._ppows[i]
                digit = (xs // pw) % p
                out += np.where(digit >= p - d, d - p, d) * pw
        return out


def _build_exp_binary(modulus, m, omega):
    q1 = (1 << m) - 1
    fmask = (1 << m) | sum(c << i for i, c in enumerate(modulus))
    degw = omega.bit_length() - 1
    out = []
    s = 1
    for _ in range(q1):
        out.append(s)
        acc = 0
        t, sh = omega, 0
        while t:
            if t & 1:
                acc ^= s << sh
            t >>= 1
            sh += 1
        for d in range(m + degw - 1, m - 1, -1):
            if (acc >> d) & 1:
                acc ^= fmask << (d - m)
        s = acc
    return out


def _build_exp_general(modulus, p, m, omega):
    q = p**m
    # omega as digit list, degree dw
    wd = []
    t = omega
    for _ in range(m):
        t, r = divmod(t, p)
        wd.append(r)
    while wd and wd[-1] == 0:
        wd.pop()
    dw = len(wd) - 1
    s = [0] * m
    s[0] = 1
    out = []
    for _ in range(q - 1):
        acc = 0
        for d in reversed(s):
            acc = acc * p + d
        out.append(acc)
        # s *= omega, then reduce by the monic modulus
        r = [0] * (m + dw)
        for i, si in enumerate(s):
            if si:
                for j, wj in enumerate(wd):
                    if wj:
                        r[i + j] = (r[i + j] + si * wj) % p
        for d in range(m + dw - 1, m - 1, -1):
            t = r[d]
            if t:
                r[d] = 0
                for j in range(m):
                    if modulus[j]:
                        r[d - m + j] = (r[d - m + j] - t * modulus[j]) % p
        s = r[:m]
    return out


def _find_omega(modulus, p, m):
    q = p**m
    if q == 2:
        return 1
    mod_full = list(modulus) + [1]
    prime_parts = [r for r, _ in arith.factorize(q - 1)]

    def packed_to_poly(v):
        out = []
        for _ in range(m):
            v, r = divmod(v, p)
            out.append(r)
        return _ptrim(out)

    for cand in range(1, q):
        poly = packed_to_poly(cand)
        if all(_ppowmod(poly, (q - 1) // r, mod_full, p) != [1] for r in prime_parts):
            return cand
    raise RuntimeError(f"no generator found for q={q}")


@functools.lru_cache(maxsize=48)
def _build_field_cached(p: int, m: int) -> FieldTable:
    modulus = _find_modulus(p, m)
    omega = _find_omega(modulus, p, m)
    if p == 2:
        exp_list = _build_exp_binary(modulus, m, omega)
    else:
        exp_list = _build_exp_general(modulus, p, m, omega)
    q = p**m
    exp = np.fromiter(exp_list, dtype=np.int32, count=q - 1)
    log = np.full(q, -1, dtype=np.int32)
    log[exp] = np.arange(q - 1, dtype=np.int32)
    if int((log[1:] < 0).sum()) != 0:
        raise RuntimeError(f"exp table for q={q} is not a bijection (omega not primitive?)")
    return FieldTable(FieldSpec(p, m, modulus), exp, log, omega)


def build_field(p: int, m: int, budget: int = DEFAULT_FIELD_BUDGET) -> FieldTable:
    """Construct (or fetch from the process cache) the tables for F_{p^m}."""
    if m < 1:
        raise FieldError(f"degree must be >= 1, got {m}")
    if not arith.is_probable_prime(p):
        raise InvalidPrimeError(f"{p} is not prime")
    if p**m > budget:
        raise BudgetExceededError(f"{p}^{m} = {p**m} exceeds budget {budget}")
    return _build_field_cached(p, m)


# ---------------------------------------------------------------------------
# k-th power residues
# ---------------------------------------------------------------------------


class ResidueSet:
    """R_k = { x^k : x in F_q* } as a sorted array of encodings."""

    __slots__ = ("k", "members", "n")

    def __init__(self, k, members, n):
        self.k = k
        self.members = members
        self.n = n
        members.flags.writeable = False

    def __repr__(self):
        return f"ResidueSet(k={self.k}, n={self.n})"


def power_residues(F: FieldTable, k: int) -> ResidueSet:
    """The k-th powers of F_q*, for k already normalized (k | q-1)."""
    if k < 1 or (F.q - 1) % k != 0:
        raise NotNormalizedError(f"k={k} does not divide q-1={F.q - 1}")
    members = np.sort(F.exp[::k].copy())
    n = (F.q - 1) // k
    if members.shape[0] != n or np.unique(members).shape[0] != n:
        raise RuntimeError("residue set has wrong size")  # table corruption
    return ResidueSet(k, members, n)
