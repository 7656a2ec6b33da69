"""Collision processes on Z/NZ and Floyd cycle detection.

Four walk families are supported:

``Birthday``
    each state is a fresh uniform draw (the birthday problem);
``PollardRho``
    the deterministic keyed walk x -> 2x, x+1 or x+h, the branch picked by the
    keyed hash of x mod 3;
``UniformGamma``
    the same three edges, but each step picks one uniformly at random;
``GammaN``
    the 2-valent walk x -> 3(x+1) or 3(x-1) on Z/NZ, N prime > 3.

Collision indices count states from 1, so the earliest possible collision is
at index 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Callable, Optional, Union

from sigforge import kernels
from sigforge.errors import StepCapExceeded
from sigforge.numtheory import is_prime
from sigforge.sampling import RngStream, keyed_hash_mod3


def _check_state(N: int, name: str, value: int) -> None:
    if not 0 <= value < N:
        raise ValueError(f"{name} must lie in [0, {N})")


@dataclass(frozen=True)
class Birthday:
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")


@dataclass(frozen=True)
class PollardRho:
    N: int
    h: int
    x1: int
    key: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        _check_state(self.N, "h", self.h)
        _check_state(self.N, "x1", self.x1)


@dataclass(frozen=True)
class UniformGamma:
    N: int
    h: int
    x1: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        _check_state(self.N, "h", self.h)
        _check_state(self.N, "x1", self.x1)


@dataclass(frozen=True)
class GammaN:
    N: int
    x1: int

    def __post_init__(self):
        if self.N <= 3 or not is_prime(self.N):
            raise ValueError("GammaN is defined for primes N > 3")
        _check_state(self.N, "x1", self.x1)


WalkSpec = Union[Birthday, PollardRho, UniformGamma, GammaN]


@dataclass(frozen=True)
class CollisionOutcome:
    """Where a walk first revisits a state.

    ``first_collision_index`` is the smallest n with x_n == x_k for some k < n,
    and ``tail`` is that k. For the deterministic rho walk the sequence is
    eventually periodic, so ``cycle_len`` and ``floyd_m`` (smallest m >= 1 with
    x_m == x_2m) are also filled in.
    """

    first_collision_index: int
    tail: Optional[int] = None
    cycle_len: Optional[int] = None
    floyd_m: Optional[int] = None


def step_cap(N: int) -> int:
    """Runaway guard shared by all walks."""
    return 64 * _ceil_sqrt(N) * 64


def _ceil_sqrt(n: int) -> int:
    r = isqrt(n)
    return r if r * r == n else r + 1


def rho_successor(N: int, h: int, key: int, x: int) -> int:
    c = keyed_hash_mod3(key, x)
    if c == 0:
        return 2 * x % N
    if c == 1:
        return (x + 1) % N
    return (x + h) % N


def step(spec: WalkSpec, x: int, rng: Optional[RngStream] = None) -> int:
    """One transition of the walk from state ``x``."""
    if isinstance(spec, PollardRho):
        return rho_successor(spec.N, spec.h, spec.key, x)
    if rng is None:
        raise ValueError(f"{type(spec).__name__} walks need an rng")
    if isinstance(spec, Birthday):
        return rng.uniform_below(spec.N)
    if isinstance(spec, UniformGamma):
        c = rng.uniform_below(3)
        if c == 0:
            return 2 * x % spec.N
        if c == 1:
            return (x + 1) % spec.N
        return (x + spec.h) % spec.N
    if isinstance(spec, GammaN):
        if rng.uniform_below(2) == 0:
            return 3 * (x + 1) % spec.N
        return 3 * (x - 1) % spec.N
    raise TypeError(f"unknown walk {spec!r}")


def floyd_index(tail: int, cycle_len: int) -> int:
    """Smallest m >= 1 with x_m == x_2m when the cycle starts at index ``tail``."""
    return cycle_len * -(-tail // cycle_len)


def _fits_compiled(spec: WalkSpec) -> bool:
    return spec.N < (1 << 61)


def run_to_collision(spec: WalkSpec, rng: Optional[RngStream] = None) -> CollisionOutcome:
    """Iterate the walk until the first repeated state.

    Birthday walks draw x_1 from ``rng`` as well. Raises ``StepCapExceeded``
    after ``step_cap(N)`` steps.
    """
    cap = step_cap(spec.N)
    if isinstance(spec, PollardRho):
        if _fits_compiled(spec):
            n, k = kernels.rho_walk(spec.N, spec.h, spec.x1, spec.key, cap)
        else:
            n, k = _generic_collision(spec, spec.x1, None, cap)
        lam = n - k
        return CollisionOutcome(n, k, lam, floyd_index(k, lam))
    if rng is None:
        raise ValueError(f"{type(spec).__name__} walks need an rng")
    if not _fits_compiled(spec):
        x1 = rng.uniform_below(spec.N) if isinstance(spec, Birthday) else spec.x1
        return CollisionOutcome(_generic_collision(spec, x1, rng, cap)[0])
    if isinstance(spec, Birthday):
        n = kernels.birthday_walk(rng.bitgen, spec.N, cap)
    elif isinstance(spec, UniformGamma):
        n = kernels.uniform_gamma_walk(rng.bitgen, spec.N, spec.h, spec.x1, cap)
    elif isinstance(spec, GammaN):
        n = kernels.gamma_n_walk(rng.bitgen, spec.N, spec.x1, cap)
    else:
        raise TypeError(f"unknown walk {spec!r}")
    return CollisionOutcome(n)


def _generic_collision(spec, x1, rng, cap):
    x = x1
    seen = {x: 1}
    n = 1
    while True:
        n += 1
        if n > cap:
            raise StepCapExceeded(f"walk passed {cap} steps")
        x = step(spec, x, rng)
        k = seen.get(x)
        if k is not None:
            return n, k
        seen[x] = n


def floyd_detect(
    f: Union[PollardRho, Callable[[int], int]],
    x1: Optional[int] = None,
    cap: Optional[int] = None,
) -> tuple[int, int]:
    """Tortoise-and-hare search for the smallest m >= 1 with x_m == x_2m.

    ``f`` is either a ``PollardRho`` spec (its own ``x1`` is used) or any
    deterministic successor function together with a start ``x1``.
    Returns ``(m, x_m)`` using O(1) memory.
    """
    if isinstance(f, PollardRho):
        spec = f
        x1 = spec.x1
        cap = cap or step_cap(spec.N)
        f = lambda x: rho_successor(spec.N, spec.h, spec.key, x)  # noqa: E731
    elif x1 is None:
        raise ValueError("a start value is needed for a bare successor function")
    cap = cap or 1 << 32
    tortoise, hare = x1, f(x1)
    m = 1
    while tortoise != hare:
        m += 1
        if m > cap:
            raise StepCapExceeded(f"Floyd search passed {cap} iterations")
        tortoise = f(tortoise)
        hare = f(f(hare))
    return m, tortoise
