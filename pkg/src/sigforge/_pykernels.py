"""Pure-Python kernels, used when the compiled core is unavailable.

Function-for-function mirror of ``_core.pyx``: the same inputs consume the
same random words and produce the same outputs.
"""
import numpy as np

from sigforge.errors import StepCapExceeded
from sigforge.sampling import keyed_hash_below, keyed_hash_mod3, mask_for

BIRTHDAY, RHO, FLOYD = 0, 1, 2

COMPILED = False


def _below(raw, bound):
    mask = mask_for(bound)
    while True:
        v = int(raw()) & mask
        if v < bound:
            return v


def birthday_walk(bitgen, N, cap):
    raw = bitgen.random_raw
    seen = {_below(raw, N)}
    n = 1
    while True:
        n += 1
        if n > cap:
            raise StepCapExceeded(f"birthday walk passed {cap} steps")
        x = _below(raw, N)
        if x in seen:
            return n
        seen.add(x)


def rho_walk(N, h, x1, key, cap):
    """First collision of the keyed walk; returns ``(n, k)`` with x_n == x_k."""
    x = x1
    seen = {x: 1}
    n = 1
    while True:
        n += 1
        if n > cap:
            raise StepCapExceeded(f"rho walk passed {cap} steps")
        c = keyed_hash_mod3(key, x)
        if c == 0:
            x = 2 * x % N
        elif c == 1:
            x = (x + 1) % N
        else:
            x = (x + h) % N
        k = seen.get(x)
        if k is not None:
            return n, k
        seen[x] = n


def uniform_gamma_walk(bitgen, N, h, x1, cap):
    raw = bitgen.random_raw
    x = x1
    seen = {x}
    n = 1
    while True:
        n += 1
        if n > cap:
            raise StepCapExceeded(f"uniform walk passed {cap} steps")
        c = _below(raw, 3)
        if c == 0:
            x = 2 * x % N
        elif c == 1:
            x = (x + 1) % N
        else:
            x = (x + h) % N
        if x in seen:
            return n
        seen.add(x)


def gamma_n_walk(bitgen, N, x1, cap):
    raw = bitgen.random_raw
    x = x1
    seen = {x}
    n = 1
    while True:
        n += 1
        if n > cap:
            raise StepCapExceeded(f"gamma walk passed {cap} steps")
        if _below(raw, 2) == 0:
            x = 3 * (x + 1) % N
        else:
            x = 3 * (x - 1) % N
        if x in seen:
            return n
        seen.add(x)


def _collide(step, start, algo, cap):
    """Shared first-collision / Floyd driver over states ``(enc, elem, a, b)``."""
    if algo == FLOYD:
        t = start
        hr = step(t)
        m = 1
        while t[0] != hr[0]:
            m += 1
            if m > cap:
                raise StepCapExceeded(f"Floyd search passed {cap} iterations")
            t = step(t)
            hr = step(step(hr))
        return 3 * m, t[2], t[3], hr[2], hr[3]
    s = start
    seen = {s[0]: (s[2], s[3])}
    n = 1
    while True:
        n += 1
        if n > cap:
            raise StepCapExceeded(f"collision search passed {cap} steps")
        s = step(s)
        prev = seen.get(s[0])
        if prev is not None:
            return n, s[2], s[3], prev[0], prev[1]
        seen[s[0]] = (s[2], s[3])


def dlog_walk_zp(p, order, g, h, key, algo, cap):
    """Collision search for g^x = h in (Z/pZ)*; returns (steps, a1, b1, a2, b2)."""
    if algo == BIRTHDAY:
        def step(s):
            _, x, a, b = s
            r = 1 + keyed_hash_below(key, x, 1, order)
            t = 1 + keyed_hash_below(key, x, 2, order)
            y = pow(x, r, p) * pow(g, t, p) % p
            return y, y, r * a % order, (r * b + t) % order
    else:
        def step(s):
            _, x, a, b = s
            c = keyed_hash_mod3(key, x)
            if c == 0:
                y = x * x % p
                return y, y, 2 * a % order, 2 * b % order
            if c == 1:
                y = x * g % p
                return y, y, a, (b + 1) % order
            y = x * h % p
            return y, y, (a + 1) % order, b
    return _collide(step, (h, h, 1 % order, 0), algo, cap)


def _ec_add(P, Q, p, a):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def _ec_mul(k, P, p, a):
    R = None
    while k:
        if k & 1:
            R = _ec_add(R, P, p, a)
        P = _ec_add(P, P, p, a)
        k >>= 1
    return R


def _ec_encode(P, p):
    return 0 if P is None else 1 + P[0] * p + P[1]


def dlog_walk_ec(p, a, order, g, h, key, algo, cap):
    """Collision search for g^x = h on an elliptic curve group of prime order."""
    if algo == BIRTHDAY:
        def step(s):
            e, X, u, v = s
            r = 1 + keyed_hash_below(key, e, 1, order)
            t = 1 + keyed_hash_below(key, e, 2, order)
            Y = _ec_add(_ec_mul(r, X, p, a), _ec_mul(t, g, p, a), p, a)
            return _ec_encode(Y, p), Y, r * u % order, (r * v + t) % order
    else:
        def step(s):
            e, X, u, v = s
            c = keyed_hash_mod3(key, e)
            if c == 0:
                Y = _ec_add(X, X, p, a)
                u, v = 2 * u % order, 2 * v % order
            elif c == 1:
                Y = _ec_add(X, g, p, a)
                v = (v + 1) % order
            else:
                Y = _ec_add(X, h, p, a)
                u = (u + 1) % order
            return _ec_encode(Y, p), Y, u, v
    return _collide(step, (_ec_encode(h, p), h, 1 % order, 0), algo, cap)


def count_points(p, a, b):
    """#E(F_p) for y^2 = x^3 + a x + b via a quadratic-residue table."""
    xs = np.arange(p, dtype=np.int64)
    is_sq = np.zeros(p, dtype=np.int8)
    is_sq[xs[1:] * xs[1:] % p] = 1
    chi = 2 * is_sq - 1
    chi[0] = 0
    rhs = ((xs * xs % p) * xs + a * xs + b) % p
    return int(p + 1 + chi[rhs].sum())
