"""Cyclic groups for discrete logs, plus RSA and ECC key generation.

Elliptic-curve points are ``None`` for the point at infinity and ``(x, y)``
tuples otherwise. Both groups expose ``encode`` (an integer used to key the
walk partitions), and the compiled walks use the same encoding.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor, gcd
from typing import Optional, Protocol, Tuple

from sigforge import kernels
from sigforge.numtheory import (
    DomainError,
    is_prime,
    legendre,
    miller_rabin,
    mod_inverse,
    next_prime,
    prime_factors,
    sqrt_mod,
)
from sigforge.sampling import RngStream
from sigforge.timing import clock, gc_paused

ECPoint = Optional[Tuple[int, int]]
INFINITY: ECPoint = None

RSA_ROUNDS = 40
POINT_COUNT_BOUND = 10**7


class CyclicGroup(Protocol):
    order: int

    def identity(self): ...

    def op(self, a, b): ...

    def inverse(self, a): ...

    def pow(self, a, k: int): ...

    def encode(self, a) -> int: ...


@dataclass(frozen=True)
class ZpStar:
    """The multiplicative group of Z/pZ, p prime."""

    p: int

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise DomainError("ZpStar needs an odd prime modulus")

    @property
    def order(self) -> int:
        return self.p - 1

    def identity(self) -> int:
        return 1

    def op(self, a: int, b: int) -> int:
        return a * b % self.p

    def inverse(self, a: int) -> int:
        return pow(a, -1, self.p)

    def pow(self, a: int, k: int) -> int:
        return pow(a, k, self.p)

    def encode(self, a: int) -> int:
        return a

    def elements(self):
        return range(1, self.p)

    def element_order_is_full(self, g: int) -> bool:
        """True when g generates the whole group (checked over prime factors of p-1)."""
        if g % self.p == 0:
            return False
        return all(pow(g, self.order // q, self.p) != 1 for q in prime_factors(self.order))

    def generator(self) -> int:
        """Smallest primitive root."""
        g = 2 if self.p > 3 else 2 % self.p
        while not self.element_order_is_full(g):
            g += 1
        return g


@dataclass(frozen=True)
class Curve:
    """y^2 = x^3 + a x + b over F_p, p an odd prime > 3."""

    p: int
    a: int
    b: int

    def __post_init__(self):
        if self.p <= 3 or not is_prime(self.p):
            raise DomainError("curve modulus must be a prime > 3")
        if (4 * self.a**3 + 27 * self.b**2) % self.p == 0:
            raise DomainError("singular curve")

    def rhs(self, x: int) -> int:
        return (x * x * x + self.a * x + self.b) % self.p

    def contains(self, P: ECPoint) -> bool:
        if P is None:
            return True
        x, y = P
        return 0 <= x < self.p and 0 <= y < self.p and (y * y - self.rhs(x)) % self.p == 0

    def negate(self, P: ECPoint) -> ECPoint:
        return None if P is None else (P[0], -P[1] % self.p)


def _add(c: Curve, P: ECPoint, Q: ECPoint) -> ECPoint:
    if P is None:
        return Q
    if Q is None:
        return P
    p = c.p
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + c.a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def _mul(c: Curve, k: int, P: ECPoint) -> ECPoint:
    if k < 0:
        k, P = -k, c.negate(P)
    R = None
    while k:
        if k & 1:
            R = _add(c, R, P)
        P = _add(c, P, P)
        k >>= 1
    return R


def ec_add(c: Curve, P: ECPoint, Q: ECPoint) -> ECPoint:
    """Chord-and-tangent sum of two points on ``c``."""
    if not (c.contains(P) and c.contains(Q)):
        raise DomainError("point not on curve")
    return _add(c, P, Q)


def ec_scalar_mul(c: Curve, k: int, P: ECPoint) -> ECPoint:
    if not c.contains(P):
        raise DomainError("point not on curve")
    return _mul(c, k, P)


def ec_count_points(c: Curve, bound: int = POINT_COUNT_BOUND) -> int:
    """#E(F_p) = p + 1 + sum over x of legendre(x^3 + a x + b, p)."""
    if c.p > bound:
        raise DomainError(f"p = {c.p} exceeds the point-counting bound {bound}")
    return kernels.count_points(c.p, c.a % c.p, c.b % c.p)


def ec_count_points_naive(c: Curve) -> int:
    """Same count, summing Legendre symbols one at a time."""
    return c.p + 1 + sum(legendre(c.rhs(x), c.p) for x in range(c.p))


def ec_points(c: Curve) -> list:
    """All points, by enumerating every (x, y) pair. Tiny curves only."""
    squares: dict[int, list[int]] = {}
    for y in range(c.p):
        squares.setdefault(y * y % c.p, []).append(y)
    pts: list = [None]
    for x in range(c.p):
        pts.extend((x, y) for y in squares.get(c.rhs(x), ()))
    return pts


def random_point(c: Curve, rng: RngStream) -> ECPoint:
    """A uniformly chosen x with a non-zero square on the right side, and one of its roots."""
    while True:
        x = rng.uniform_below(c.p)
        v = c.rhs(x)
        if v == 0:
            continue
        y = sqrt_mod(v, c.p)
        if y is None:
            continue
        return (x, y) if rng.uniform_below(2) == 0 else (x, -y % c.p)


@dataclass(frozen=True)
class EllipticCurveGroup:
    """E(F_p) as a cyclic group; only prime orders are accepted."""

    curve: Curve
    order: int

    def __post_init__(self):
        if not is_prime(self.order):
            raise DomainError("curve group order must be prime to be cyclic")

    def identity(self) -> ECPoint:
        return None

    def op(self, P: ECPoint, Q: ECPoint) -> ECPoint:
        return _add(self.curve, P, Q)

    def inverse(self, P: ECPoint) -> ECPoint:
        return self.curve.negate(P)

    def pow(self, P: ECPoint, k: int) -> ECPoint:
        return _mul(self.curve, k, P)

    def encode(self, P: ECPoint) -> int:
        return 0 if P is None else 1 + P[0] * self.curve.p + P[1]

    def elements(self):
        return ec_points(self.curve)


def prime_order_curve(p: int, rng: RngStream, a: int = 1) -> tuple[EllipticCurveGroup, ECPoint]:
    """Draw b uniformly from [1, p] until y^2 = x^3 + a x + b has prime order != p.

    Returns the group and a generator (any point other than infinity).
    """
    while True:
        b = rng.uniform_int(1, p)
        try:
            c = Curve(p, a, b % p)
        except DomainError:
            continue
        n = ec_count_points(c)
        ok, _ = miller_rabin(n, RSA_ROUNDS, rng)
        if ok and n != p:
            return EllipticCurveGroup(c, n), random_point(c, rng)


@dataclass(frozen=True)
class RsaKey:
    p: int
    q: int
    e: int
    d: int

    @property
    def n(self) -> int:
        return self.p * self.q

    @property
    def phi(self) -> int:
        return (self.p - 1) * (self.q - 1)

    def encrypt(self, m: int) -> int:
        return pow(m, self.e, self.n)

    def decrypt(self, c: int) -> int:
        return pow(c, self.d, self.n)


def rsa_key_from_primes(p: int, q: int, e: int) -> RsaKey:
    if p == q:
        raise DomainError("p and q must differ")
    phi = (p - 1) * (q - 1)
    return RsaKey(p, q, e, mod_inverse(e, phi))


def _interval(X: int, kappa) -> tuple[int, int]:
    hi = floor(Fraction(kappa) * X)
    if X < 2 or hi <= X:
        raise DomainError(f"interval [{X}, {kappa}*{X}] is too small")
    return X, hi


@lru_cache(maxsize=64)
def _check_two_primes(lo: int, hi: int) -> None:
    first = lo if is_prime(lo) else _next_prime_det(lo)
    if first > hi or _next_prime_det(first) > hi:
        raise DomainError(f"[{lo}, {hi}] holds fewer than two primes")


def _next_prime_det(n: int) -> int:
    c = n + 1
    while not is_prime(c):
        c += 1
    return c


def rsa_keygen(X: int, kappa, rng: RngStream, rounds: int = RSA_ROUNDS) -> tuple[RsaKey, float]:
    """Generate an RSA key with primes from [X, kappa*X]; returns ``(key, wall_seconds)``.

    Each prime is the first probable prime after a uniform draw from the
    interval; e is uniform on [1, phi] among values coprime to phi.
    """
    lo, hi = _interval(X, kappa)
    _check_two_primes(lo, hi)
    with gc_paused():
        t0 = clock()
        p = next_prime(rng.uniform_int(lo, hi), rounds, rng)
        while True:
            q = next_prime(rng.uniform_int(lo, hi), rounds, rng)
            if q != p:
                break
        phi = (p - 1) * (q - 1)
        while True:
            e = rng.uniform_int(1, phi)
            if gcd(e, phi) == 1:
                break
        key = RsaKey(p, q, e, mod_inverse(e, phi))
        elapsed = clock() - t0
    return key, elapsed


@dataclass(frozen=True)
class EccKeyRecord:
    curve: Curve
    order: int
    generator: ECPoint
    x: int
    y: int
    shared_point: ECPoint
    wall_seconds: float


def ecc_keygen(X: int, kappa, rng: RngStream, bound: int = POINT_COUNT_BOUND) -> EccKeyRecord:
    """Diffie-Hellman key agreement on a random prime-order curve y^2 = x^3 + x + b.

    The timed region covers the prime search, every rejected curve, and both
    scalar multiplications.
    """
    lo, hi = _interval(X, kappa)
    if hi >= bound:
        raise DomainError(f"kappa*X = {hi} exceeds the point-counting bound {bound}")
    with gc_paused():
        t0 = clock()
        p = next_prime(rng.uniform_int(lo, hi), RSA_ROUNDS, rng)
        if p > bound:
            raise DomainError(f"p = {p} exceeds the point-counting bound {bound}")
        group, g = prime_order_curve(p, rng)
        x = rng.uniform_int(1, group.order)
        y = rng.uniform_int(1, group.order)
        shared = group.pow(group.pow(g, x), y)
        elapsed = clock() - t0
    return EccKeyRecord(group.curve, group.order, g, x, y, shared, elapsed)


def curve_group_near(target: int, rng: RngStream) -> tuple[EllipticCurveGroup, ECPoint]:
    """A prime-order curve over F_p with p = next_prime(target)."""
    p = next_prime(max(target, 4), RSA_ROUNDS, rng)
    if p > POINT_COUNT_BOUND:
        raise DomainError(f"p = {p} exceeds the point-counting bound")
    return prime_order_curve(p, rng)


def zp_group_near(target: int, rng: RngStream) -> tuple[ZpStar, int]:
    """(Z/pZ)* with p = next_prime(target) and its smallest primitive root."""
    p = next_prime(max(target, 2), RSA_ROUNDS, rng)
    G = ZpStar(p)
    return G, G.generator()


def hasse_bound_ok(c: Curve, count: int) -> bool:
    return (count - c.p - 1) ** 2 <= 4 * c.p

