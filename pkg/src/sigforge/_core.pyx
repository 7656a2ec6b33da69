# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the collision walks, discrete-log walks and point counting.

Mirrors ``_pykernels`` exactly; moduli must stay below 2**31 so that every
product of two residues fits in 64 bits.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer
from cython.operator cimport dereference as deref
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc
from libc.string cimport memset
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector
from numpy.random cimport bitgen_t

from sigforge.errors import StepCapExceeded

COMPILED = True

cdef enum:
    BIRTHDAY = 0
    FLOYD = 2

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MAX_U64 = 0xFFFFFFFFFFFFFFFFULL
cdef uint64_t MODULUS_LIMIT = 1ULL << 31


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t _mask_for(uint64_t bound) noexcept nogil:
    cdef uint64_t m = bound - 1
    m |= m >> 1
    m |= m >> 2
    m |= m >> 4
    m |= m >> 8
    m |= m >> 16
    m |= m >> 32
    return m


cdef inline int _hash_mod3(uint64_t key, uint64_t x) noexcept nogil:
    # 2**64 - 1 is the only word at or above the largest multiple of 3.
    cdef uint64_t v = _mix64(x ^ key)
    while v == MAX_U64:
        v = _mix64(v)
    return <int>(v % 3)


cdef inline uint64_t _hash_below(uint64_t key, uint64_t x, uint64_t lane,
                                 uint64_t bound) noexcept nogil:
    cdef uint64_t base = _mix64(x ^ key)
    cdef uint64_t mask = _mask_for(bound)
    cdef uint64_t j = 0
    cdef uint64_t v
    while True:
        j += 1
        v = _mix64(base + GOLDEN * ((lane << 32) + j)) & mask
        if v < bound:
            return v


cdef inline uint64_t _below(bitgen_t* bg, uint64_t bound) noexcept nogil:
    cdef uint64_t mask = _mask_for(bound)
    cdef uint64_t v
    while True:
        v = bg.next_uint64(bg.state) & mask
        if v < bound:
            return v


cdef bitgen_t* _bitgen(object bitgen) except NULL:
    return <bitgen_t*>PyCapsule_GetPointer(bitgen.capsule, "BitGenerator")


def mix64(uint64_t z):
    return _mix64(z)


def hash_mod3(uint64_t key, uint64_t x):
    return _hash_mod3(key, x)


def hash_below(uint64_t key, uint64_t x, uint64_t lane, uint64_t bound):
    if bound < 1:
        raise ValueError("bound must be >= 1")
    return _hash_below(key, x, lane, bound)


def birthday_walk(object bitgen, uint64_t N, uint64_t cap):
    cdef bitgen_t* bg = _bitgen(bitgen)
    cdef unordered_set[uint64_t] seen
    cdef uint64_t n = 1
    cdef bint fresh
    seen.reserve(256)
    with bitgen.lock, nogil:
        seen.insert(_below(bg, N))
        while True:
            n += 1
            if n > cap:
                break
            fresh = seen.insert(_below(bg, N)).second
            if not fresh:
                break
    if n > cap:
        raise StepCapExceeded(f"birthday walk passed {cap} steps")
    return n


def rho_walk(uint64_t N, uint64_t h, uint64_t x1, uint64_t key, uint64_t cap):
    """First collision of the keyed walk; returns ``(n, k)`` with x_n == x_k."""
    if N >= (1ULL << 62):
        raise ValueError("modulus too large for the compiled walk")
    cdef unordered_map[uint64_t, uint64_t] seen
    cdef unordered_map[uint64_t, uint64_t].iterator it
    cdef uint64_t x = x1
    cdef uint64_t n = 1
    cdef uint64_t k = 0
    cdef int c
    seen.reserve(256)
    with nogil:
        seen[x] = 1
        while True:
            n += 1
            if n > cap:
                break
            c = _hash_mod3(key, x)
            if c == 0:
                x = (2 * x) % N
            elif c == 1:
                x = (x + 1) % N
            else:
                x = (x + h) % N
            it = seen.find(x)
            if it != seen.end():
                k = deref(it).second
                break
            seen[x] = n
    if n > cap:
        raise StepCapExceeded(f"rho walk passed {cap} steps")
    return n, k


def uniform_gamma_walk(object bitgen, uint64_t N, uint64_t h, uint64_t x1, uint64_t cap):
    if N >= (1ULL << 62):
        raise ValueError("modulus too large for the compiled walk")
    cdef bitgen_t* bg = _bitgen(bitgen)
    cdef unordered_set[uint64_t] seen
    cdef uint64_t x = x1
    cdef uint64_t n = 1
    cdef uint64_t c
    seen.reserve(256)
    with bitgen.lock, nogil:
        seen.insert(x)
        while True:
            n += 1
            if n > cap:
                break
            c = _below(bg, 3)
            if c == 0:
                x = (2 * x) % N
            elif c == 1:
                x = (x + 1) % N
            else:
                x = (x + h) % N
            if not seen.insert(x).second:
                break
    if n > cap:
        raise StepCapExceeded(f"uniform walk passed {cap} steps")
    return n


def gamma_n_walk(object bitgen, uint64_t N, uint64_t x1, uint64_t cap):
    if N >= (1ULL << 61):
        raise ValueError("modulus too large for the compiled walk")
    cdef bitgen_t* bg = _bitgen(bitgen)
    cdef unordered_set[uint64_t] seen
    cdef uint64_t x = x1
    cdef uint64_t n = 1
    seen.reserve(256)
    with bitgen.lock, nogil:
        seen.insert(x)
        while True:
            n += 1
            if n > cap:
                break
            if _below(bg, 2) == 0:
                x = (3 * ((x + 1) % N)) % N
            else:
                x = (3 * ((x + N - 1) % N)) % N
            if not seen.insert(x).second:
                break
    if n > cap:
        raise StepCapExceeded(f"gamma walk passed {cap} steps")
    return n


# ---------------------------------------------------------------- (Z/pZ)*

cdef inline uint64_t _mulmod(uint64_t a, uint64_t b, uint64_t m) noexcept nogil:
    return (a * b) % m


cdef uint64_t _powmod(uint64_t b, uint64_t e, uint64_t m) noexcept nogil:
    cdef uint64_t r = 1 % m
    b %= m
    while e:
        if e & 1:
            r = _mulmod(r, b, m)
        b = _mulmod(b, b, m)
        e >>= 1
    return r


cdef struct ZState:
    uint64_t x
    uint64_t a
    uint64_t b


cdef inline ZState _zp_step(ZState s, uint64_t p, uint64_t order, uint64_t g,
                            uint64_t h, uint64_t key, int algo) noexcept nogil:
    cdef ZState o
    cdef uint64_t r, t
    cdef int c
    if algo == BIRTHDAY:
        r = 1 + _hash_below(key, s.x, 1, order)
        t = 1 + _hash_below(key, s.x, 2, order)
        o.x = _mulmod(_powmod(s.x, r, p), _powmod(g, t, p), p)
        o.a = _mulmod(r, s.a, order)
        o.b = (_mulmod(r, s.b, order) + t) % order
        return o
    c = _hash_mod3(key, s.x)
    if c == 0:
        o.x = _mulmod(s.x, s.x, p)
        o.a = (2 * s.a) % order
        o.b = (2 * s.b) % order
    elif c == 1:
        o.x = _mulmod(s.x, g, p)
        o.a = s.a
        o.b = (s.b + 1) % order
    else:
        o.x = _mulmod(s.x, h, p)
        o.a = (s.a + 1) % order
        o.b = s.b
    return o


def dlog_walk_zp(uint64_t p, uint64_t order, uint64_t g, uint64_t h, uint64_t key,
                 int algo, uint64_t cap):
    """Collision search for g^x = h in (Z/pZ)*; returns (steps, a1, b1, a2, b2)."""
    if p >= MODULUS_LIMIT or order >= MODULUS_LIMIT:
        raise ValueError("modulus too large for the compiled walk")
    cdef ZState t, hr, s
    cdef uint64_t m, n
    cdef unordered_map[uint64_t, uint64_t] seen
    cdef vector[uint64_t] av, bv
    cdef uint64_t idx
    s.x = h
    s.a = 1 % order
    s.b = 0
    if algo == FLOYD:
        with nogil:
            t = s
            hr = _zp_step(t, p, order, g, h, key, algo)
            m = 1
            while t.x != hr.x:
                m += 1
                if m > cap:
                    break
                t = _zp_step(t, p, order, g, h, key, algo)
                hr = _zp_step(_zp_step(hr, p, order, g, h, key, algo), p, order, g, h, key, algo)
        if m > cap:
            raise StepCapExceeded(f"Floyd search passed {cap} iterations")
        return 3 * m, t.a, t.b, hr.a, hr.b
    seen.reserve(256)
    with nogil:
        seen[s.x] = 0
        av.push_back(s.a)
        bv.push_back(s.b)
        n = 1
        while True:
            n += 1
            if n > cap:
                break
            s = _zp_step(s, p, order, g, h, key, algo)
            if seen.count(s.x):
                idx = seen[s.x]
                break
            seen[s.x] = av.size()
            av.push_back(s.a)
            bv.push_back(s.b)
    if n > cap:
        raise StepCapExceeded(f"collision search passed {cap} steps")
    return n, s.a, s.b, av[idx], bv[idx]


# ---------------------------------------------------------------- E(F_p)

cdef struct Pt:
    uint64_t x
    uint64_t y
    bint inf


cdef inline uint64_t _invmod(uint64_t a, uint64_t m) noexcept nogil:
    cdef int64_t t = 0, nt = 1, q, tmp
    cdef int64_t r = <int64_t>m, nr = <int64_t>(a % m)
    while nr != 0:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += <int64_t>m
    return <uint64_t>t


cdef inline Pt _ec_add(Pt P, Pt Q, uint64_t p, uint64_t a) noexcept nogil:
    cdef Pt R
    cdef uint64_t lam, num, den
    if P.inf:
        return Q
    if Q.inf:
        return P
    if P.x == Q.x:
        if (P.y + Q.y) % p == 0:
            R.inf = True
            R.x = 0
            R.y = 0
            return R
        num = (3 * _mulmod(P.x, P.x, p) + a) % p
        den = (2 * P.y) % p
    else:
        num = (Q.y + p - P.y) % p
        den = (Q.x + p - P.x) % p
    lam = _mulmod(num, _invmod(den, p), p)
    R.inf = False
    R.x = (_mulmod(lam, lam, p) + 2 * p - P.x - Q.x) % p
    R.y = (_mulmod(lam, (P.x + p - R.x) % p, p) + p - P.y) % p
    return R


cdef inline Pt _ec_mul(uint64_t k, Pt P, uint64_t p, uint64_t a) noexcept nogil:
    cdef Pt R
    R.inf = True
    R.x = 0
    R.y = 0
    while k:
        if k & 1:
            R = _ec_add(R, P, p, a)
        P = _ec_add(P, P, p, a)
        k >>= 1
    return R


cdef inline uint64_t _enc(Pt P, uint64_t p) noexcept nogil:
    if P.inf:
        return 0
    return 1 + P.x * p + P.y


cdef struct EState:
    Pt X
    uint64_t e
    uint64_t a
    uint64_t b


cdef inline EState _ec_step(EState s, uint64_t p, uint64_t ca, uint64_t order,
                            Pt g, Pt h, uint64_t key, int algo) noexcept nogil:
    cdef EState o
    cdef uint64_t r, t
    cdef int c
    if algo == BIRTHDAY:
        r = 1 + _hash_below(key, s.e, 1, order)
        t = 1 + _hash_below(key, s.e, 2, order)
        o.X = _ec_add(_ec_mul(r, s.X, p, ca), _ec_mul(t, g, p, ca), p, ca)
        o.a = _mulmod(r, s.a, order)
        o.b = (_mulmod(r, s.b, order) + t) % order
    else:
        c = _hash_mod3(key, s.e)
        if c == 0:
            o.X = _ec_add(s.X, s.X, p, ca)
            o.a = (2 * s.a) % order
            o.b = (2 * s.b) % order
        elif c == 1:
            o.X = _ec_add(s.X, g, p, ca)
            o.a = s.a
            o.b = (s.b + 1) % order
        else:
            o.X = _ec_add(s.X, h, p, ca)
            o.a = (s.a + 1) % order
            o.b = s.b
    o.e = _enc(o.X, p)
    return o


cdef Pt _to_pt(object P, uint64_t p) except *:
    cdef Pt R
    if P is None:
        R.inf = True
        R.x = 0
        R.y = 0
    else:
        R.inf = False
        R.x = <uint64_t>(P[0] % p)
        R.y = <uint64_t>(P[1] % p)
    return R


def dlog_walk_ec(uint64_t p, uint64_t a, uint64_t order, object g, object h,
                 uint64_t key, int algo, uint64_t cap):
    """Collision search for g^x = h on an elliptic curve group of prime order."""
    if p >= MODULUS_LIMIT or order >= (1ULL << 32):
        raise ValueError("modulus too large for the compiled walk")
    cdef Pt G = _to_pt(g, p)
    cdef Pt H = _to_pt(h, p)
    cdef EState s, t, hr
    cdef uint64_t m, n, idx
    cdef unordered_map[uint64_t, uint64_t] seen
    cdef vector[uint64_t] av, bv
    a %= p
    s.X = H
    s.e = _enc(H, p)
    s.a = 1 % order
    s.b = 0
    if algo == FLOYD:
        with nogil:
            t = s
            hr = _ec_step(t, p, a, order, G, H, key, algo)
            m = 1
            while t.e != hr.e:
                m += 1
                if m > cap:
                    break
                t = _ec_step(t, p, a, order, G, H, key, algo)
                hr = _ec_step(_ec_step(hr, p, a, order, G, H, key, algo),
                              p, a, order, G, H, key, algo)
        if m > cap:
            raise StepCapExceeded(f"Floyd search passed {cap} iterations")
        return 3 * m, t.a, t.b, hr.a, hr.b
    seen.reserve(256)
    with nogil:
        seen[s.e] = 0
        av.push_back(s.a)
        bv.push_back(s.b)
        n = 1
        while True:
            n += 1
            if n > cap:
                break
            s = _ec_step(s, p, a, order, G, H, key, algo)
            if seen.count(s.e):
                idx = seen[s.e]
                break
            seen[s.e] = av.size()
            av.push_back(s.a)
            bv.push_back(s.b)
    if n > cap:
        raise StepCapExceeded(f"collision search passed {cap} steps")
    return n, s.a, s.b, av[idx], bv[idx]


def count_points(uint64_t p, uint64_t a, uint64_t b):
    """#E(F_p) for y^2 = x^3 + a x + b via a quadratic-residue table."""
    if p >= MODULUS_LIMIT:
        raise ValueError("modulus too large for point counting")
    cdef unsigned char* sq = <unsigned char*>malloc(p)
    if sq == NULL:
        raise MemoryError()
    cdef uint64_t x, v
    cdef int64_t total = 0
    a %= p
    b %= p
    with nogil:
        memset(sq, 0, p)
        for x in range(1, p):
            sq[_mulmod(x, x, p)] = 1
        for x in range(p):
            v = (_mulmod(_mulmod(x, x, p), x, p) + _mulmod(a, x, p) + b) % p
            if v != 0:
                total += 1 if sq[v] else -1
    free(sq)
    return <int64_t>(p + 1) + total
