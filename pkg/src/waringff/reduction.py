"""Certificate-producing reduction engine.

The central identity: when c is a primitive divisor of p^a - 1 and b*c is
a primitive divisor of p^(ab) - 1,

    g((p^(ab) - 1)/(b*c), p^(ab))  =  b * g((p^a - 1)/c, p^a).

`reduce` applies such steps recursively and resolves the final base pair
through the catalog or BFS, emitting a replayable Certificate.  The
specialized checkers (prime b, 2-power b, odd-prime-power b, general b,
rad/phi shortcut) each verify a sufficient condition for the same
identity using only modular arithmetic in b, so they stay usable when
p^(ab) is astronomically large.
"""

import math
from dataclasses import dataclass

from . import arith, classify
from .arith import is_primitive_divisor, psi_mod
from .gpgraph import DEFAULT_BFS_BUDGET, waring_number_bfs


class NonExistentError(ValueError):
    """The requested Waring number does not exist."""


class NotPrimitiveRootError(ValueError):
    pass


class PreconditionFailedError(ValueError):
    pass


# ---------------------------------------------------------------------------
# condition checkers
# ---------------------------------------------------------------------------


def check_main_conditions(p: int, a: int, b: int, c: int) -> bool:
    """c primitive divisor of p^a - 1  AND  b*c primitive divisor of p^(ab) - 1.

    The second test never touches p^(ab): with u = (p^a - 1)/c it is
    equivalent to  b | u*psi_b(p^a)  and  b ∤ u*psi_l(p^a) for l < b,
    all computed mod b.
    """
    if min(p, a, b, c) < 1:
        raise ValueError("check_main_conditions requires positive arguments")
    if not is_primitive_divisor(c, p, a):
        return False
    if b == 1:
        return True
    u_mod = ((p**a - 1) // c) % b
    x = pow(p, a, b)
    acc = 0
    for _ in range(b - 1):
        acc = (acc * x + 1) % b
        if u_mod * acc % b == 0:
            return False
    acc = (acc * x + 1) % b  # psi_b
    return u_mod * acc % b == 0


def check_b_prime(p: int, a: int, b: int, c: int) -> bool:
    """For prime b != p with c † p^a - 1:  b | p^a - 1 and b ∤ (p^a - 1)/c.

    This is an equivalence: it holds exactly when the main conditions do.
    """
    pa1 = p**a - 1
    return pa1 % b == 0 and ((pa1 // c) % b) != 0


def check_b_pow2(p: int, a: int, t: int, c: int) -> bool:
    """For b = 2^t, t >= 2, p odd, c † p^a - 1:
    p^a == 1 (mod 4) and (p^a - 1)/c odd."""
    if t < 2:
        raise ValueError(f"check_b_pow2 requires t >= 2, got {t}")
    pa = p**a
    return pa % 4 == 1 and ((pa - 1) // c) % 2 == 1


def check_b_prime_power(p: int, a: int, r: int, t: int, c: int) -> bool:
    """For b = r^t with r an odd prime != p, t >= 2, c † p^a - 1 and
    gcd((p^a - 1)/c, r) = 1:  the order of p^a mod r^t is r^h, h <= t-1."""
    if t < 2:
        raise ValueError(f"check_b_prime_power requires t >= 2, got {t}")
    rt = r**t
    o = arith.mult_order(pow(p, a, rt), rt)
    # r^h for some 0 <= h <= t-1  <=>  o divides r^(t-1)
    return r ** (t - 1) % o == 0


def check_general_b(p: int, a: int, b: int, c: int) -> bool:
    """Arbitrary b coprime to p, not a pure 2-power, with gcd((p^a-1)/c, b)=1:
    every odd prime power r^t || b must have ord_{r^t}(p^a) = r^h (h < t),
    and p^a == 1 (mod 4) whenever 4 | b."""
    if b & (b - 1) == 0:
        raise ValueError(f"check_general_b requires b not a pure power of 2, got {b}")
    t2 = arith.valuation(2, b)
    if t2 >= 2 and pow(p, a, 4) != 1:
        return False
    for r, t in arith.factorize(b >> t2):
        rt = r**t
        o = arith.mult_order(pow(p, a, rt), rt)
        if r ** (t - 1) % o != 0:
            return False
    return True


def check_rad_phi(p: int, a: int, b: int, c: int) -> bool:
    """Shortcut sufficient condition: phi(rad(b)) | a and gcd((p^a-1)/c, b)=1."""
    phi_rad = arith.euler_phi(arith.radical(b))
    return a % phi_rad == 0 and math.gcd((p**a - 1) // c, b) == 1


# ---------------------------------------------------------------------------
# decomposition enumeration and rule tagging
# ---------------------------------------------------------------------------


def enumerate_decompositions(k: int, p: int, m: int) -> list[tuple[int, int, int, int]]:
    """All (a, b, c, u) with m = a*b, b > 1, n = b*c and the main reduction
    conditions satisfied, sorted by ascending p^a then ascending b."""
    q = p**m
    n = (q - 1) // k
    out = []
    for b in arith.divisors(m):
        if b == 1 or n % b != 0:
            continue
        a = m // b
        c = n // b
        if c > 1 and check_main_conditions(p, a, b, c):
            out.append((a, b, c, (p**a - 1) // c))
    out.sort(key=lambda t: (p ** t[0], t[1]))
    return out


def _is_prime_power(b: int) -> tuple[int, int] | None:
    f = arith.factorize(b)
    if len(f) == 1:
        return f[0]
    return None


def _rule_for(p: int, a: int, b: int, c: int, u: int) -> tuple[str, str]:
    """Most specific rule label (and human tag) justifying a verified step."""
    pp = _is_prime_power(b)
    if pp:
        r, t = pp
        if t == 1 and r != p and check_b_prime(p, a, b, c):
            return "BPrime", f"prime b: b | p^a-1 and b does not divide u (b={b})"
        if r == 2 and t >= 2 and p % 2 == 1 and check_b_pow2(p, a, t, c):
            return "BPowerOf2", f"b = 2^{t}: p^a = 1 mod 4 and u odd"
        if r % 2 == 1 and t >= 2 and r != p and u % r != 0 and check_b_prime_power(p, a, r, t, c):
            return "BPrimePower", f"b = {r}^{t}: ord(p^a mod b) is a power of {r} below b"
    not_pow2 = not (pp and pp[0] == 2)
    if not_pow2 and b > 1 and math.gcd(p, b) == 1:
        if check_rad_phi(p, a, b, c):
            return "RadPhiCorollary", f"phi(rad({b})) divides a={a} and gcd(u, b) = 1"
        if math.gcd(u, b) == 1 and check_general_b(p, a, b, c):
            return "GeneralB", f"per odd prime power of b={b}, ord(p^a) is a small prime power"
    return "MainTheorem", f"{b}*{c} is a primitive divisor of p^({a}*{b})-1, {c} of p^{a}-1"


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionStep:
    rule: str
    p: int
    a: int
    b: int
    c: int
    u: int
    citation: str


@dataclass(frozen=True)
class CertificateBase:
    k: int
    p: int
    a: int
    source: str  # Trivial | BFS | SmallBound | Semiprimitive | Exceptional |
    #              Kononen1 | Kononen2 | CatalogEntry:<family> | Unresolved


@dataclass(frozen=True)
class Certificate:
    target_p: int
    target_m: int
    target_k: int
    steps: tuple[ReductionStep, ...]
    base: CertificateBase
    value: int | None

    @property
    def resolved(self) -> bool:
        return self.value is not None


_FAMILY_SOURCES = {
    "trivial": "Trivial",
    "small": "SmallBound",
    "semiprimitive": "Semiprimitive",
    "exceptional": "Exceptional",
    "kononen1": "Kononen1",
    "kononen2": "Kononen2",
}


def _source_for_family(family: str) -> str:
    return _FAMILY_SOURCES.get(family, f"CatalogEntry:{family}")


def reduce(k: int, p: int, m: int, budget: int = DEFAULT_BFS_BUDGET) -> Certificate:
    """Reduce g(k, p^m) to a certified value.

    Applies the first valid decomposition recursively; a leaf (no valid
    decomposition) resolves through, in order: k = 1, the known-value
    catalog, BFS within budget.  If nothing resolves, the certificate is
    returned Unresolved with the residual pair - never a guessed value.
    """
    q = p**m
    k = arith.normalize_k(k, q)
    if not arith.waring_exists(k, p, m):
        raise NonExistentError(f"g({k}, {p}^{m}) does not exist")

    steps: list[ReductionStep] = []
    cur_k, cur_m = k, m
    b_prod = 1
    while True:
        if cur_k == 1:
            base = CertificateBase(cur_k, p, cur_m, "Trivial")
            base_value = 1
            break
        decs = enumerate_decompositions(cur_k, p, cur_m)
        if decs:
            a, b, c, u = decs[0]
            rule, cite = _rule_for(p, a, b, c, u)
            steps.append(ReductionStep(rule, p, a, b, c, u, cite))
            b_prod *= b
            cur_k, cur_m = u, a
            continue
        kv = classify.known_value(cur_k, p, cur_m)
        if kv is not None:
            base = CertificateBase(cur_k, p, cur_m, _source_for_family(kv.family))
            base_value = kv.value
            break
        if p**cur_m <= budget:
            val = waring_number_bfs(p, cur_m, cur_k, budget=budget)
            if val is None:  # cannot happen on a chain with verified steps
                raise NonExistentError(f"BFS found g({cur_k}, {p}^{cur_m}) nonexistent")
            base = CertificateBase(cur_k, p, cur_m, "BFS")
            base_value = val
            break
        return Certificate(p, m, k, tuple(steps), CertificateBase(cur_k, p, cur_m, "Unresolved"), None)
    return Certificate(p, m, k, tuple(steps), base, b_prod * base_value)


# -- serialization (stable JSON shape; all integers as decimal strings) ------


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "target": {"p": str(cert.target_p), "m": str(cert.target_m), "k": str(cert.target_k)},
        "steps": [
            {
                "rule": s.rule,
                "p": str(s.p),
                "a": str(s.a),
                "b": str(s.b),
                "c": str(s.c),
                "u": str(s.u),
                "citation": s.citation,
            }
            for s in cert.steps
        ],
        "base": {
            "k": str(cert.base.k),
            "p": str(cert.base.p),
            "a": str(cert.base.a),
            "source": cert.base.source,
        },
        "value": None if cert.value is None else str(cert.value),
    }


def certificate_from_json(d: dict) -> Certificate:
    steps = tuple(
        ReductionStep(s["rule"], int(s["p"]), int(s["a"]), int(s["b"]), int(s["c"]), int(s["u"]), s["citation"])
        for s in d["steps"]
    )
    base = CertificateBase(int(d["base"]["k"]), int(d["base"]["p"]), int(d["base"]["a"]), d["base"]["source"])
    value = None if d["value"] is None else int(d["value"])
    return Certificate(int(d["target"]["p"]), int(d["target"]["m"]), int(d["target"]["k"]), steps, base, value)


def _verify_step_rule(s: ReductionStep, c_is_primitive: bool) -> bool:
    if not c_is_primitive:
        return False
    if s.rule == "MainTheorem":
        return check_main_conditions(s.p, s.a, s.b, s.c)
    if s.rule == "BPrime":
        return (
            arith.is_probable_prime(s.b)
            and s.b != s.p
            and check_b_prime(s.p, s.a, s.b, s.c)
            and check_main_conditions(s.p, s.a, s.b, s.c)
        )
    pp = _is_prime_power(s.b)
    if s.rule == "BPowerOf2":
        return (
            pp is not None
            and pp[0] == 2
            and pp[1] >= 2
            and s.p % 2 == 1
            and check_b_pow2(s.p, s.a, pp[1], s.c)
            and check_main_conditions(s.p, s.a, s.b, s.c)
        )
    if s.rule == "BPrimePower":
        return (
            pp is not None
            and pp[0] % 2 == 1
            and pp[1] >= 2
            and pp[0] != s.p
            and s.u % pp[0] != 0
            and check_b_prime_power(s.p, s.a, pp[0], pp[1], s.c)
            and check_main_conditions(s.p, s.a, s.b, s.c)
        )
    if s.rule == "RadPhiCorollary":
        return (
            math.gcd(s.p, s.b) == 1
            and not (pp and pp[0] == 2)
            and check_rad_phi(s.p, s.a, s.b, s.c)
            and check_main_conditions(s.p, s.a, s.b, s.c)
        )
    if s.rule == "GeneralB":
        return (
            math.gcd(s.p, s.b) == 1
            and math.gcd(s.u, s.b) == 1
            and not (pp and pp[0] == 2)
            and check_general_b(s.p, s.a, s.b, s.c)
            and check_main_conditions(s.p, s.a, s.b, s.c)
        )
    return False


def _base_value(base: CertificateBase, budget: int) -> int | None:
    k, p, a = base.k, base.p, base.a
    src = base.source
    if src == "Trivial":
        return 1 if k == 1 else None
    if src == "BFS":
        if p**a > budget:
            return None
        return waring_number_bfs(p, a, k, budget=budget)
    if src == "SmallBound":
        return 2 if k >= 2 and classify.small_range(k, p**a) else None
    if src == "Semiprimitive":
        return 2 if classify.match_family("semiprimitive", k, p, a) else None
    if src == "Exceptional":
        return 2 if classify.match_family("exceptional", k, p, a) else None
    if src == "Kononen1":
        return classify.match_family("kononen1", k, p, a)
    if src == "Kononen2":
        return classify.match_family("kononen2", k, p, a)
    if src.startswith("CatalogEntry:"):
        return classify.match_family(src.split(":", 1)[1], k, p, a)
    return None


def replay_certificate(cert: Certificate, budget: int = DEFAULT_BFS_BUDGET, bfs_confirm: bool = True) -> bool:
    """Re-verify every step precondition, the base claim and the value
    arithmetic of a certificate.  Tampering with any field makes this fail.

    When the target q is within budget and bfs_confirm is set, the claimed
    value is additionally confirmed against the BFS oracle.
    """
    if cert.value is None:
        return False
    p = cert.target_p
    q = p**cert.target_m
    if arith.normalize_k(cert.target_k, q) != cert.target_k:
        return False
    if not arith.waring_exists(cert.target_k, p, cert.target_m):
        return False
    cur_k, cur_m = cert.target_k, cert.target_m
    b_prod = 1
    for s in cert.steps:
        if s.p != p or s.a * s.b != cur_m or s.b < 2 or s.c < 2:
            return False
        pa1 = p**s.a - 1
        if pa1 % s.c != 0 or s.u != pa1 // s.c:
            return False
        if cur_k * s.b * s.c != p**cur_m - 1:
            return False
        if not _verify_step_rule(s, is_primitive_divisor(s.c, p, s.a)):
            return False
        b_prod *= s.b
        cur_k, cur_m = s.u, s.a
    if (cert.base.k, cert.base.p, cert.base.a) != (cur_k, p, cur_m):
        return False
    bv = _base_value(cert.base, budget)
    if bv is None or cert.value != b_prod * bv:
        return False
    if bfs_confirm and q <= budget:
        if waring_number_bfs(p, cert.target_m, cert.target_k, budget=budget) != cert.value:
            return False
    return True


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def kononen1(p: int, r: int, m: int) -> tuple[int, int, int]:
    """(k, q, value) for the primitive-root closed form:
    k = (p^phi(r^m) - 1)/r^m, value = (p-1)*phi(r^m)/2.

    p must be a primitive root modulo r^m; for r = 2 that forces m = 2.
    """
    if not (arith.is_probable_prime(p) and arith.is_probable_prime(r)) or p == r:
        raise PreconditionFailedError("p, r must be distinct primes")
    if r == 2 and m != 2:
        raise PreconditionFailedError("r = 2 admits primitive roots only for modulus 4 (m = 2)")
    rm = r**m
    e = arith.euler_phi(rm)
    if arith.mult_order(p % rm, rm) != e:
        raise NotPrimitiveRootError(f"{p} is not a primitive root mod {rm}")
    q = p**e
    return (q - 1) // rm, q, (p - 1) * e // 2


def kononen2(p: int, r: int, m: int) -> tuple[int, int, int]:
    """(k, q, value) for the odd companion form: k = (p^phi(r^m) - 1)/(2 r^m),
    value = r^(m-1) * floor(pr/4 - p/4r)  (r < p)  or with the roles of the
    last fraction swapped (r >= p)."""
    if not (arith.is_probable_prime(p) and arith.is_probable_prime(r)) or p == r:
        raise PreconditionFailedError("p, r must be distinct primes")
    if p % 2 == 0 or r % 2 == 0:
        raise PreconditionFailedError("p, r must both be odd")
    rm = r**m
    e = arith.euler_phi(rm)
    if arith.mult_order(p % rm, rm) != e:
        raise NotPrimitiveRootError(f"{p} is not a primitive root mod {rm}")
    q = p**e
    if r < p:
        value = r ** (m - 1) * ((p * (r * r - 1)) // (4 * r))
    else:
        value = r ** (m - 1) * ((r * (p * p - 1)) // (4 * p))
    return (q - 1) // (2 * rm), q, value


def hamming_value(p: int, a: int, b: int) -> tuple[int, int, int]:
    """(k, q, b) for the complete-factor case u = 1:
    g((p^(ab) - 1)/(b (p^a - 1)), p^(ab)) = b  when b is a prime != p
    dividing p^a - 1."""
    if not arith.is_probable_prime(b) or b == p:
        raise PreconditionFailedError(f"b = {b} must be a prime different from p = {p}")
    if (p**a - 1) % b != 0:
        raise PreconditionFailedError(f"{b} does not divide {p}^{a} - 1")
    q = p ** (a * b)
    return (q - 1) // (b * (p**a - 1)), q, b
