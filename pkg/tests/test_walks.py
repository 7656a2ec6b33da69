import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigforge.errors import StepCapExceeded
from sigforge.sampling import RngStream, keyed_hash_mod3
from sigforge.walks import (
    Birthday,
    GammaN,
    PollardRho,
    UniformGamma,
    floyd_detect,
    floyd_index,
    rho_successor,
    run_to_collision,
    step,
    step_cap,
)


def _brute_rho(N, h, x1, key):
    seen = {}
    x, n = x1, 1
    while x not in seen:
        seen[x] = n
        x = rho_successor(N, h, key, x)
        n += 1
    return n, seen[x]


def test_rho_branch_zero_doubles():
    key = next(k for k in range(100) if keyed_hash_mod3(k, 5) == 0)
    assert step(PollardRho(101, 7, 5, key), 5) == 10


def test_gamma_n_from_zero():
    r = RngStream(3, 0)
    c = Counter(step(GammaN(101, 0), 0, r) for _ in range(20_000))
    assert set(c) == {3, 98}
    assert abs(c[3] / 20_000 - 0.5) < 0.02


def test_birthday_ignores_state():
    a, b = RngStream(1, 1), RngStream(1, 1)
    assert [step(Birthday(1000), 0, a) for _ in range(20)] == [step(Birthday(1000), 999, b) for _ in range(20)]


def test_birthday_single_state():
    assert run_to_collision(Birthday(1), RngStream(0, 0)).first_collision_index == 2


def test_validation():
    with pytest.raises(ValueError):
        GammaN(100, 1)
    with pytest.raises(ValueError):
        PollardRho(10, 3, 10, 0)
    with pytest.raises(ValueError):
        run_to_collision(Birthday(5))


def test_step_cap_value():
    assert step_cap(40009) == 64 * 201 * 64
    assert step_cap(100) == 64 * 10 * 64


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 5000), st.data())
def test_rho_matches_bruteforce(N, data):
    h = data.draw(st.integers(0, N - 1))
    x1 = data.draw(st.integers(0, N - 1))
    key = data.draw(st.integers(0, 2**64 - 1))
    out = run_to_collision(PollardRho(N, h, x1, key))
    n, k = _brute_rho(N, h, x1, key)
    assert (out.first_collision_index, out.tail) == (n, k)
    lam = out.cycle_len
    assert lam == n - k
    # Floyd invariants for deterministic runs
    assert out.floyd_m % lam == 0
    assert out.floyd_m >= max(lam, k)
    assert 2 * out.floyd_m >= n
    assert floyd_detect(PollardRho(N, h, x1, key))[0] == out.floyd_m


def test_floyd_pure_three_cycle():
    assert floyd_detect(lambda x: (x + 1) % 3, 0)[0] == 3


def test_floyd_tail_two_cycle_three():
    table = {10: 11, 11: 0, 0: 1, 1: 2, 2: 0}
    m, xm = floyd_detect(table.__getitem__, 10)
    assert m == 3 and xm == 0
    assert floyd_index(2, 3) == 3


def test_floyd_eventually_constant():
    assert floyd_detect(lambda x: 7, 3) == (2, 7)


def test_floyd_cap():
    with pytest.raises(StepCapExceeded):
        floyd_detect(lambda x: x + 1, 0, cap=50)


def test_collision_distributions_are_sane():
    r = RngStream(11, 0)
    N = 10007
    means = {}
    for name, spec in {
        "birthday": Birthday(N),
        "uniform-gamma": UniformGamma(N, 123, 45),
        "gamma-n": GammaN(N, 45),
    }.items():
        vals = [run_to_collision(spec, r).first_collision_index for _ in range(2000)]
        means[name] = sum(vals) / len(vals)
    assert abs(means["birthday"] / math.sqrt(math.pi * N / 2) - 1) < 0.06
    assert 1.3 < means["uniform-gamma"] / math.sqrt(N) < 2.0
    assert 1.3 < means["gamma-n"] / math.sqrt(N) < 2.2


def test_generic_path_matches_kernels():
    from sigforge.walks import _generic_collision

    spec = PollardRho(40009, 17, 5, 99)
    out = run_to_collision(spec)
    assert _generic_collision(spec, 5, None, step_cap(40009)) == (out.first_collision_index, out.tail)
    a, b = RngStream(4, 4), RngStream(4, 4)
    g = GammaN(40009, 8)
    assert _generic_collision(g, 8, a, step_cap(40009))[0] == run_to_collision(g, b).first_collision_index
