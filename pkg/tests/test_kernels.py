"""The compiled core and the pure-Python fallback must agree bit for bit."""
import os
import subprocess
import sys

import numpy as np
import pytest

from sigforge import _pykernels, kernels, sampling
from sigforge.groups import Curve, curve_group_near, ec_count_points_naive, zp_group_near

core = kernels.load_compiled()
needs_core = pytest.mark.skipif(core is None, reason="compiled core not built")


def _bitgen(seed, i):
    return sampling.RngStream(seed, i).bitgen


@needs_core
def test_core_hashes_match():
    r = np.random.default_rng(0)
    for key, x in r.integers(0, 2**63, size=(2000, 2), dtype=np.uint64).tolist():
        assert core.mix64(x) == sampling.mix64(x)
        assert core.hash_mod3(key, x) == sampling.keyed_hash_mod3(key, x)
        for bound in (1, 2, 3, 1000, 2**40 + 1, 2**64 - 1):
            assert core.hash_below(key, x, 1, bound) == sampling.keyed_hash_below(key, x, 1, bound)


@needs_core
@pytest.mark.parametrize("N", [1, 2, 97, 40009, 2**34 + 25])
def test_walk_parity(N):
    cap = 64 * 64 * (int(N**0.5) + 1)
    for i in range(40 if N < 10**6 else 2):
        assert core.birthday_walk(_bitgen(1, i), N, cap) == _pykernels.birthday_walk(_bitgen(1, i), N, cap)
        h, x1, key = (i * 7919) % N, (i * 104729) % N, 2**64 - 1 - i
        assert core.rho_walk(N, h, x1, key, cap) == _pykernels.rho_walk(N, h, x1, key, cap)
        assert core.uniform_gamma_walk(_bitgen(2, i), N, h, x1, cap) == _pykernels.uniform_gamma_walk(
            _bitgen(2, i), N, h, x1, cap
        )
        if N > 3:
            assert core.gamma_n_walk(_bitgen(3, i), N, x1, cap) == _pykernels.gamma_n_walk(_bitgen(3, i), N, x1, cap)


@needs_core
def test_stream_position_parity():
    # After a kernel call both backends must leave the stream at the same place.
    a, b = sampling.RngStream(4, 0), sampling.RngStream(4, 0)
    core.birthday_walk(a.bitgen, 40009, 10**6)
    _pykernels.birthday_walk(b.bitgen, 40009, 10**6)
    assert a.next_u64() == b.next_u64()


@needs_core
@pytest.mark.parametrize("algo", [0, 1, 2])
def test_dlog_walk_parity(algo):
    G, g = zp_group_near(20000, sampling.RngStream(1, 0))
    E, P = curve_group_near(3000, sampling.RngStream(1, 0))
    for i in range(30):
        h = G.pow(g, 1 + i * 31)
        assert core.dlog_walk_zp(G.p, G.order, g, h, i, algo, 10**7) == _pykernels.dlog_walk_zp(
            G.p, G.order, g, h, i, algo, 10**7
        )
        Q = E.pow(P, 1 + i * 31)
        c = E.curve
        assert core.dlog_walk_ec(c.p, c.a, E.order, P, Q, i, algo, 10**7) == _pykernels.dlog_walk_ec(
            c.p, c.a, E.order, P, Q, i, algo, 10**7
        )


@pytest.mark.parametrize("impl", [_pykernels] + ([core] if core else []), ids=lambda m: m.__name__)
def test_count_points(impl):
    assert impl.count_points(5, 1, 1) == 9
    for p, a, b in [(101, 1, 3), (1009, 7, 2), (1013, 0, 5)]:
        assert impl.count_points(p, a, b) == ec_count_points_naive(Curve(p, a, b))


def test_pure_fallback_selected_by_env():
    env = dict(os.environ, SIGFORGE_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import sigforge; print(sigforge.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
