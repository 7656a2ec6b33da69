"""Modular arithmetic and primality primitives.

Python ints are already arbitrary precision, so a ``Natural`` here is just a
non-negative ``int``.
"""
from __future__ import annotations

import enum
from math import isqrt
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from sigforge.sampling import RngStream


class DomainError(ValueError):
    """An argument lies outside the operation's mathematical domain."""


class MrVerdict(enum.Enum):
    COMPOSITE = "composite"
    PROBABLE_PRIME = "probable_prime"


# Deterministic Miller-Rabin witness set, valid for n < 3.3e24.
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def mod_pow(base: int, exp: int, modulus: int) -> int:
    """Return ``base**exp % modulus`` by square-and-multiply."""
    if modulus <= 0:
        raise DomainError("modulus must be >= 1")
    if exp < 0:
        raise DomainError("exponent must be non-negative")
    return pow(base, exp, modulus)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, u, v)`` with ``u*a + v*b == g == gcd(a, b)``."""
    if a == 0 and b == 0:
        raise DomainError("gcd(0, 0) is undefined")
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def mod_inverse(a: int, m: int) -> int:
    if m <= 0:
        raise DomainError("modulus must be >= 1")
    g, u, _ = ext_gcd(a % m, m)
    if g != 1:
        raise DomainError(f"{a} is not invertible modulo {m}")
    return u % m


def _split_pow2(n: int) -> tuple[int, int]:
    """Write ``n - 1 = 2**s * d`` with ``d`` odd."""
    d = n - 1
    s = (d & -d).bit_length() - 1
    return s, d >> s


def miller_rabin_round(n: int, base: int) -> MrVerdict:
    """One Miller-Rabin round of ``n`` (odd, >= 3) to ``base`` in [2, n-2]."""
    if n < 3 or n % 2 == 0:
        raise DomainError("miller_rabin_round needs odd n >= 3")
    s, d = _split_pow2(n)
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return MrVerdict.PROBABLE_PRIME
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return MrVerdict.PROBABLE_PRIME
    return MrVerdict.COMPOSITE


def miller_rabin(n: int, rounds: int, rng: RngStream) -> tuple[bool, int]:
    """Run up to ``rounds`` rounds with uniform bases; stop at the first witness.

    Returns ``(is_probable_prime, rounds_executed)``. The shortcuts for
    ``n < 4`` and even ``n`` execute no rounds.
    """
    if rounds < 1:
        raise DomainError("rounds must be >= 1")
    if n < 2:
        return False, 0
    if n in (2, 3):
        return True, 0
    if n % 2 == 0:
        return False, 0
    s, d = _split_pow2(n)
    nm1 = n - 1
    for executed in range(1, rounds + 1):
        base = 2 + rng.uniform_below(n - 3)
        x = pow(base, d, n)
        if x == 1 or x == nm1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == nm1:
                break
        else:
            return False, executed
    return True, rounds


def is_prime(n: int) -> bool:
    """Deterministic for n < 3.3e24 (fixed witness set); a strong test beyond."""
    if n < 2:
        return False
    for p in _DETERMINISTIC_BASES:
        if n % p == 0:
            return n == p
    return all(
        miller_rabin_round(n, b) is MrVerdict.PROBABLE_PRIME
        for b in _DETERMINISTIC_BASES
    )


def is_prime_trial(n: int) -> bool:
    """Trial division. Slow; meant as an oracle for small n."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for f in range(3, isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def next_prime(n: int, rounds: int, rng: RngStream) -> int:
    """Smallest integer > n passing ``rounds`` Miller-Rabin rounds."""
    if n < 1:
        raise DomainError("n must be >= 1")
    c = n + 1
    while True:
        ok, _ = miller_rabin(c, rounds, rng)
        if ok:
            return c
        c += 1


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division (desk scale only)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, as -1, 0 or +1."""
    if p < 3 or p % 2 == 0:
        raise DomainError("p must be an odd prime")
    r = pow(a, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of ``a`` modulo the odd prime ``p`` (Tonelli-Shanks), or None."""
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    s, q = _split_pow2(p)
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r
