import itertools
import math

import pytest

from sigforge.groups import (
    Curve,
    EllipticCurveGroup,
    ZpStar,
    curve_group_near,
    ec_add,
    ec_count_points,
    ec_count_points_naive,
    ec_points,
    ec_scalar_mul,
    ecc_keygen,
    hasse_bound_ok,
    prime_order_curve,
    random_point,
    rsa_key_from_primes,
    rsa_keygen,
    zp_group_near,
)
from sigforge.numtheory import DomainError, is_prime
from sigforge.sampling import RngStream

C5 = Curve(5, 1, 1)


def _brute_count(c):
    return 1 + sum(1 for x in range(c.p) for y in range(c.p) if (y * y - c.rhs(x)) % c.p == 0)


def test_point_addition_examples():
    P = (0, 1)
    assert ec_add(C5, P, None) == P
    assert ec_add(C5, P, C5.negate(P)) is None
    assert ec_add(C5, P, P) == (4, 2)
    assert C5.contains((4, 2))


def test_scalar_mul_examples():
    P = (0, 1)
    assert ec_scalar_mul(C5, 0, P) is None
    assert ec_scalar_mul(C5, 1, P) == P
    assert ec_scalar_mul(C5, 9, P) is None
    assert ec_scalar_mul(C5, -1, P) == C5.negate(P)


def test_off_curve_rejected():
    with pytest.raises(DomainError):
        ec_add(C5, (0, 2), (0, 1))
    with pytest.raises(DomainError):
        Curve(5, 0, 0)
    with pytest.raises(DomainError):
        Curve(9, 1, 1)


def test_point_counts_against_enumeration():
    assert ec_count_points(C5) == 9 == _brute_count(C5)
    c = Curve(5, 1, 0)
    assert ec_count_points(c) == _brute_count(c) == len(ec_points(c))


def test_point_count_bound():
    with pytest.raises(DomainError):
        ec_count_points(Curve(10007, 1, 3), bound=10000)


def test_hasse_on_random_curves():
    r = RngStream(77, 0)
    for _ in range(100):
        p = [101, 1009, 10007, 40009][r.uniform_below(4)]
        try:
            c = Curve(p, r.uniform_below(p), r.uniform_below(p))
        except DomainError:
            continue
        n = ec_count_points(c)
        assert hasse_bound_ok(c, n)
        if p < 2000:
            assert n == ec_count_points_naive(c)


def _check_axioms(elements, op, identity, inverse):
    elements = list(elements)
    S = set(elements)
    for a in elements:
        assert op(a, identity) == a == op(identity, a)
        assert op(a, inverse(a)) == identity
    for a, b in itertools.product(elements, repeat=2):
        assert op(a, b) in S
        assert op(a, b) == op(b, a)
    for a, b, c in itertools.product(elements, repeat=3):
        assert op(op(a, b), c) == op(a, op(b, c))


def test_axioms_nine_point_curve():
    pts = ec_points(C5)
    assert len(pts) == 9
    G = EllipticCurveGroup(C5, 9) if is_prime(9) else None
    assert G is None  # order 9 is not prime, so check the raw curve law
    _check_axioms(pts, lambda a, b: ec_add(C5, a, b), None, C5.negate)


def test_axioms_zp101():
    G = ZpStar(101)
    _check_axioms(G.elements(), G.op, G.identity(), G.inverse)


def test_zp_generator():
    G = ZpStar(101)
    g = G.generator()
    assert g == 2
    assert len({G.pow(g, k) for k in range(100)}) == 100
    assert not G.element_order_is_full(G.pow(g, 2))


def test_prime_order_curve():
    G, g = prime_order_curve(10007, RngStream(5, 0))
    assert is_prime(G.order) and G.order != 10007
    assert G.curve.contains(g) and g is not None
    assert G.pow(g, G.order) is None
    assert hasse_bound_ok(G.curve, G.order)


def test_random_point_on_curve():
    r = RngStream(8, 8)
    c = Curve(10007, 1, 3)
    for _ in range(50):
        assert c.contains(random_point(c, r))


def test_group_near_helpers():
    G, g = zp_group_near(10**5, RngStream(1, 0))
    assert G.p == 100003 and G.element_order_is_full(g)
    E, P = curve_group_near(10**4, RngStream(1, 0))
    assert E.curve.p == 10007 and E.pow(P, E.order) is None


def test_rsa_forced_example():
    key = rsa_key_from_primes(11, 13, 7)
    assert key.d == 103 and 7 * 103 % 120 == 1
    assert key.encrypt(2) == 128
    assert key.decrypt(128) == 2


def test_rsa_keygen_invariants():
    for i in range(20):
        key, wall = rsa_keygen(2**32, 2, RngStream(3, i))
        assert key.p != key.q and 2**32 < key.p and 2**32 < key.q
        assert key.e * key.d % key.phi == 1
        assert math.gcd(key.e, key.phi) == 1
        assert key.decrypt(key.encrypt(12345)) == 12345
        assert wall >= 0


def test_rsa_interval_too_small():
    with pytest.raises(DomainError):
        rsa_keygen(24, 1.1, RngStream(0, 0))


def test_ecc_keygen_commutes_and_replays():
    rec = ecc_keygen(10**4, 2, RngStream(42, 0))
    G = EllipticCurveGroup(rec.curve, rec.order)
    assert G.pow(G.pow(rec.generator, rec.x), rec.y) == G.pow(G.pow(rec.generator, rec.y), rec.x)
    assert rec.shared_point == G.pow(rec.generator, rec.x * rec.y)
    again = ecc_keygen(10**4, 2, RngStream(42, 0))
    assert (again.curve, again.order, again.generator, again.x, again.y) == (
        rec.curve, rec.order, rec.generator, rec.x, rec.y
    )


def test_ecc_bound_refused():
    with pytest.raises(DomainError):
        ecc_keygen(10**7, 2, RngStream(0, 0))
