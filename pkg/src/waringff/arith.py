"""Exact integer number theory shared by every other module.

Everything here operates on arbitrary-precision ints; classification and
certificate replay push values like 41**81 through these functions.
All functions are pure and safe to call from any number of threads.
"""

import math
from dataclasses import dataclass


class NotCoprimeError(ValueError):
    """Raised when a multiplicative order is requested for gcd(a, n) != 1."""


# ---------------------------------------------------------------------------
# primality / factorization
# ---------------------------------------------------------------------------

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# deterministic for n < 3.3e24; above that the fixed witness set makes the
# test probabilistic with error < 4^-12 per extra witness (fine per scope:
# no cryptographic-scale inputs)
_EXTRA_WITNESSES = (41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101)


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    witnesses = _SMALL_PRIMES if n < 3_317_044_064_679_887_385_961_981 else _SMALL_PRIMES + _EXTRA_WITNESSES
    for a in witnesses:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """One nontrivial factor of composite n (Brent's cycle variant).

    Deterministic: parameters are swept in a fixed order so factorizations
    are reproducible run to run.
    """
    if n % 2 == 0:
        return 2
    for x0 in range(2, 1000):
        for c in range(1, 50):
            y, r, fq = x0, 1, 1
            g = 1
            while g == 1:
                x = y
                for _ in range(r):
                    y = (y * y + c) % n
                k = 0
                while k < r and g == 1:
                    ys = y
                    for _ in range(min(128, r - k)):
                        y = (y * y + c) % n
                        fq = fq * abs(x - y) % n
                    g = math.gcd(fq, n)
                    k += 128
                r *= 2
            if g == n:
                g = 1
                while g == 1:
                    ys = (ys * ys + c) % n
                    g = math.gcd(abs(x - ys), n)
            if g != n:
                return g
    raise RuntimeError(f"failed to factor {n}")


_TRIAL_BOUND = 100_000


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization as [(prime, exponent), ...] sorted by prime.

    Trial division below a fixed bound, then Pollard-Brent with a
    Miller-Rabin split test. factorize(1) == [].
    """
    if n < 1:
        raise ValueError(f"factorize requires n >= 1, got {n}")
    counts: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    # wheel over 6k+-1
    d = 7
    while d * d <= n and d < _TRIAL_BOUND:
        for q in (d, d + 4):
            while n % q == 0:
                counts[q] = counts.get(q, 0) + 1
                n //= q
        d += 6
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        g = _pollard_brent(m)
        stack.append(g)
        stack.append(m // g)
    return sorted(counts.items())


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError(f"euler_phi requires n >= 1, got {n}")
    out = n
    for p, _ in factorize(n):
        out -= out // p
    return out


def radical(n: int) -> int:
    """Product of the distinct primes dividing n; radical(1) == 1."""
    if n < 1:
        raise ValueError(f"radical requires n >= 1, got {n}")
    out = 1
    for p, _ in factorize(n):
        out *= p
    return out


def valuation(r: int, n: int) -> int:
    """Largest e with r**e | n."""
    if r < 2 or n < 1:
        raise ValueError(f"valuation requires r >= 2, n >= 1, got ({r}, {n})")
    e = 0
    while n % r == 0:
        n //= r
        e += 1
    return e


# ---------------------------------------------------------------------------
# orders and primitive divisors
# ---------------------------------------------------------------------------


def mult_order(a: int, n: int) -> int:
    """Least e >= 1 with a**e == 1 (mod n).

    Factors phi(n) and strips prime factors from the exponent; no linear
    scan, so it is usable for n with thousands of bits as long as n itself
    factors.
    """
    if n < 1:
        raise ValueError(f"mult_order requires n >= 1, got {n}")
    a %= n
    if n == 1:
        return 1
    if math.gcd(a, n) != 1:
        raise NotCoprimeError(f"gcd({a}, {n}) != 1")
    e = euler_phi(n)
    for p, _ in factorize(e):
        while e % p == 0 and pow(a, e // p, n) == 1:
            e //= p
    return e


# above this, is_primitive_divisor avoids factoring e (needed for the huge
# cofactors that appear when enumerating decompositions of astronomical q)
_ORDER_ROUTE_LIMIT = 1 << 48


def is_primitive_divisor(e: int, p: int, a: int) -> bool:
    """True iff e | p**a - 1 and e does not divide p**t - 1 for any t < a.

    Convention: e == 1 is a primitive divisor of p**a - 1 only when a == 1,
    which keeps the trivial b = 1 reduction valid.
    """
    if e < 1 or a < 1:
        raise ValueError(f"is_primitive_divisor requires e, a >= 1, got ({e}, {a})")
    if e == 1:
        return a == 1
    if pow(p, a, e) != 1:
        return False
    if e <= _ORDER_ROUTE_LIMIT:
        return mult_order(p % e, e) == a
    # e too large to factor: p, p^2, ..., p^(a-1) mod e directly (a is small)
    x = p % e
    cur = 1
    for _ in range(a - 1):
        cur = cur * x % e
        if cur == 1:
            return False
    return True


# ---------------------------------------------------------------------------
# the geometric-sum polynomial  1 + x + ... + x^(t-1)
# ---------------------------------------------------------------------------


def psi_mod(t: int, x: int, n: int) -> int:
    """(x^(t-1) + ... + x + 1) mod n by Horner accumulation.

    Never materializes the full value; x may be given unreduced.
    """
    if t < 1 or n < 1:
        raise ValueError(f"psi_mod requires t, n >= 1, got ({t}, {n})")
    x %= n
    acc = 0
    for _ in range(t):
        acc = (acc * x + 1) % n
    return acc


def psi_factor_identity_check(a: int, b: int, beta: int, n: int) -> bool:
    """Whether psi_{ab}(beta) == psi_b(beta^a) * psi_a(beta) (mod n).

    Algebraic identity, so this should hold for every input; exposed so the
    verification suites can assert it wholesale.
    """
    if a < 1 or b < 1 or n < 2:
        raise ValueError("psi_factor_identity_check requires a, b >= 1 and n >= 2")
    lhs = psi_mod(a * b, beta, n)
    rhs = psi_mod(b, pow(beta, a, n), n) * psi_mod(a, beta, n) % n
    return lhs == rhs


# ---------------------------------------------------------------------------
# Waring existence and normalization
# ---------------------------------------------------------------------------


def normalize_k(k: int, q: int) -> int:
    """gcd(k, q - 1); every downstream module works on the normalized k."""
    if k < 1 or q < 2:
        raise ValueError(f"normalize_k requires k >= 1, q >= 2, got ({k}, {q})")
    return math.gcd(k, q - 1)


def waring_exists(k: int, p: int, m: int) -> bool:
    """Whether g(k, p**m) exists.

    Criterion: (p^m - 1)/(p^d - 1) divides k for no proper divisor d of m,
    after normalizing k by gcd with p^m - 1.
    """
    if m < 1 or k < 1:
        raise ValueError(f"waring_exists requires m, k >= 1, got ({m}, {k})")
    q = p**m
    k = normalize_k(k, q)
    for d in divisors(m):
        if d == m:
            continue
        if k % ((q - 1) // (p**d - 1)) == 0:
            return False
    return True


@dataclass(frozen=True)
class PrimePower:
    """A validated q = p**m."""

    p: int
    m: int
    q: int

    def __post_init__(self):
        if not is_probable_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.m < 1 or self.p**self.m != self.q:
            raise ValueError(f"{self.q} != {self.p}**{self.m}")


def prime_power(p: int, m: int) -> PrimePower:
    return PrimePower(p, m, p**m)
