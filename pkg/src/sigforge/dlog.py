"""Black-box discrete-log solvers built on collision walks.

All three solvers track ``current = h**a * g**b`` (written multiplicatively)
and start from ``x_1 = h``:

* ``dlog_birthday``: x -> x**r(x) * g**s(x), with r and s keyed-hash values on [1, #G];
* ``dlog_rho``: x -> x*x, x*g or x*h by the keyed hash of x mod 3, stopping at
  the first repeated element;
* ``dlog_rho_floyd``: the same walk with Floyd's x_m == x_2m test, so only two
  cursors are stored.

A collision x_m == x_k gives (a_m - a_k) x == b_k - b_m mod #G. When the
coefficient is not a unit but the congruence still has a small solution set,
each candidate is checked against g**x == h; otherwise the walk restarts with
a fresh key.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt
from typing import Any, Callable

from sigforge import kernels
from sigforge.errors import StepCapExceeded
from sigforge.groups import CyclicGroup, EllipticCurveGroup, ZpStar
from sigforge.sampling import keyed_hash_below, keyed_hash_mod3, next_key

MAX_RETRIES = 16
# Largest gcd whose candidate solutions are enumerated instead of restarting.
MAX_CANDIDATES = 4096

ALGORITHMS = {"birthday": kernels.BIRTHDAY, "rho": kernels.RHO, "rho-floyd": kernels.FLOYD}


class DegenerateCollision(ArithmeticError):
    """The collision relation does not pin down a unique exponent."""


class DlogFailure(RuntimeError):
    pass


@dataclass
class DlogState:
    current: Any
    a: int
    b: int


@dataclass(frozen=True)
class DlogResult:
    x: int
    steps: int
    retries: int


def solve_collision_relation(a_m: int, b_m: int, a_k: int, b_k: int, order: int) -> int:
    """Solve (a_m - a_k) x == b_k - b_m (mod order) when a_m - a_k is a unit."""
    da = (a_m - a_k) % order
    db = (b_k - b_m) % order
    if gcd(da, order) != 1:
        raise DegenerateCollision(f"gcd({da}, {order}) != 1")
    return db * pow(da, -1, order) % order


def relation_candidates(a_m: int, b_m: int, a_k: int, b_k: int, order: int) -> list[int]:
    """Every x in [0, order) solving the collision relation (empty if none)."""
    da = (a_m - a_k) % order
    db = (b_k - b_m) % order
    d = gcd(da, order)
    if db % d:
        return []
    m = order // d
    if m == 1:
        return list(range(order))
    x0 = (db // d) * pow(da // d, -1, m) % m
    return [x0 + j * m for j in range(d)]


def step_cap(order: int) -> int:
    r = isqrt(order)
    return 4096 * (r if r * r == order else r + 1)


def rho_step(G: CyclicGroup, g, h, key: int, s: DlogState) -> DlogState:
    """One step of the three-way walk, keeping current == h**a * g**b."""
    n = G.order
    c = keyed_hash_mod3(key, G.encode(s.current))
    if c == 0:
        return DlogState(G.op(s.current, s.current), 2 * s.a % n, 2 * s.b % n)
    if c == 1:
        return DlogState(G.op(s.current, g), s.a, (s.b + 1) % n)
    return DlogState(G.op(s.current, h), (s.a + 1) % n, s.b)


def birthday_step(G: CyclicGroup, g, h, key: int, s: DlogState) -> DlogState:
    n = G.order
    e = G.encode(s.current)
    r = 1 + keyed_hash_below(key, e, 1, n)
    t = 1 + keyed_hash_below(key, e, 2, n)
    nxt = G.op(G.pow(s.current, r), G.pow(g, t))
    return DlogState(nxt, r * s.a % n, (r * s.b + t) % n)


def generic_walk(G: CyclicGroup, g, h, key: int, algo: int, cap: int) -> tuple[int, int, int, int, int]:
    """Group-agnostic collision search; returns ``(steps, a1, b1, a2, b2)``."""
    stepper = birthday_step if algo == kernels.BIRTHDAY else rho_step
    f: Callable[[DlogState], DlogState] = lambda s: stepper(G, g, h, key, s)  # noqa: E731
    start = DlogState(h, 1 % G.order, 0)
    if algo == kernels.FLOYD:
        t, hr = start, f(start)
        m = 1
        while G.encode(t.current) != G.encode(hr.current):
            m += 1
            if m > cap:
                raise StepCapExceeded(f"Floyd search passed {cap} iterations")
            t, hr = f(t), f(f(hr))
        return 3 * m, t.a, t.b, hr.a, hr.b
    s = start
    seen = {G.encode(s.current): (s.a, s.b)}
    n = 1
    while True:
        n += 1
        if n > cap:
            raise StepCapExceeded(f"collision search passed {cap} steps")
        s = f(s)
        enc = G.encode(s.current)
        if enc in seen:
            a_k, b_k = seen[enc]
            return n, s.a, s.b, a_k, b_k
        seen[enc] = (s.a, s.b)


def _walk(G: CyclicGroup, g, h, key: int, algo: int) -> tuple[int, int, int, int, int]:
    cap = step_cap(G.order)
    limit = kernels.COMPILED_MODULUS_LIMIT
    if isinstance(G, ZpStar) and G.p < limit:
        return kernels.dlog_walk_zp(G.p, G.order, g, h, key, algo, cap)
    if isinstance(G, EllipticCurveGroup) and G.curve.p < limit and G.order < 2 * limit:
        return kernels.dlog_walk_ec(G.curve.p, G.curve.a % G.curve.p, G.order, g, h, key, algo, cap)
    return generic_walk(G, g, h, key, algo, cap)


def _solve(G: CyclicGroup, g, h, key: int, algo: int, max_retries: int = MAX_RETRIES) -> DlogResult:
    order = G.order
    total = 0
    for attempt in range(max_retries + 1):
        steps, a1, b1, a2, b2 = _walk(G, g, h, key, algo)
        total += steps
        cands = relation_candidates(a1, b1, a2, b2, order)
        if 0 < len(cands) <= MAX_CANDIDATES:
            for x in cands:
                if G.pow(g, x) == h:
                    return DlogResult(x, total, attempt)
        key = next_key(key)
    raise DlogFailure(f"no usable collision after {max_retries} retries")


def dlog_birthday(G: CyclicGroup, g, h, key: int) -> DlogResult:
    """Discrete log by the random-exponent walk (large-power steps)."""
    return _solve(G, g, h, key, kernels.BIRTHDAY)


def dlog_rho(G: CyclicGroup, g, h, key: int) -> DlogResult:
    """Discrete log by the three-way walk, detecting its first collision."""
    return _solve(G, g, h, key, kernels.RHO)


def dlog_rho_floyd(G: CyclicGroup, g, h, key: int) -> DlogResult:
    """Discrete log by the three-way walk with Floyd cycle detection."""
    return _solve(G, g, h, key, kernels.FLOYD)


SOLVERS = {"birthday": dlog_birthday, "rho": dlog_rho, "rho-floyd": dlog_rho_floyd}
