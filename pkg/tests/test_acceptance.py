"""Acceptance gate: one pass/fail line per criterion.

Run on its own with ``pytest tests/test_acceptance.py -v`` (the lines are
printed even under output capture) or ``python3 tests/test_acceptance.py``.
"""
import itertools
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from sigforge import dlog, groups, harness, stats
from sigforge.harness import ExperimentConfig, run_experiment
from sigforge.numtheory import miller_rabin, next_prime
from sigforge.sampling import SETUP_STREAM, RngStream

pytestmark = pytest.mark.slow

N_WALK = 40009


@pytest.fixture
def report(capsys):
    def _report(num, label, ok, detail):
        with capsys.disabled():
            tag = f"criterion {num:>2}" if isinstance(num, int) else num
            print(f"\n[{'PASS' if ok else 'FAIL'}] {tag}: {label}: {detail}")
        assert ok, detail

    return _report


def _walk(variant, samples, **kw):
    return run_experiment(
        ExperimentConfig(kind="walk", variant=variant, modulus=N_WALK, samples=samples, **kw)
    )


def test_c01_birthday_rayleigh(report):
    res = _walk("birthday", 10**5)
    D = res.summary["ks_distance"]
    target = math.sqrt(math.pi * N_WALK / 2)
    rel = abs(res.summary["mean"] / target - 1)
    report(1, "birthday walk vs Rayleigh", D <= 0.02 and rel <= 0.02,
           f"KS={D:.4f} (<=0.02), mean={res.summary['mean']:.2f} vs {target:.2f} ({rel:.2%}, <=2%)")


def test_c02_rho_universality(report):
    res = _walk("rho", 10**5)
    D = res.summary["ks_distance"]
    rel = abs(res.summary["mean"] / (1.6 * math.sqrt(N_WALK)) - 1)
    report(2, "rho walk, uniform (h, x1, key)", D <= 0.02 and rel <= 0.05,
           f"KS={D:.4f} (<=0.02), mean={res.summary['mean']:.2f} vs 320.0 ({rel:.2%}, <=5%)")


def test_c03_decomposition_equivalence(report):
    r = RngStream(harness.DEFAULT_SEED, SETUP_STREAM)
    h, x1 = r.uniform_below(N_WALK), r.uniform_below(N_WALK)
    a = _walk("rho", 10**4, h=h, x1=x1)
    b = _walk("uniform-gamma", 10**4, h=h, x1=x1, seed=harness.DEFAULT_SEED + 1)
    D = stats.ks_two_sample(a.normalized, b.normalized)
    report(3, f"keyed rho vs uniform Gamma_N,h walk (h={h}, x1={x1})", D <= 0.025, f"two-sample KS={D:.4f} (<=0.025)")


def test_c04_gamma_n_universality(report):
    res = _walk("gamma-n", 10**5)
    D = res.summary["ks_distance"]
    report(4, "Gamma_N walk, uniform x1", D <= 0.02, f"KS={D:.4f} (<=0.02)")


def test_c05_prime_generation_signature(report):
    M = math.ceil(math.sqrt(128 * math.log(2)))
    base = dict(kind="primegen", log2_n=128, m_rounds=M, c=1.0, samples=10**4, normalization="eq1")
    u = run_experiment(ExperimentConfig(**base))
    s = run_experiment(ExperimentConfig(mu="sum2", seed=harness.DEFAULT_SEED + 1, **base))
    D_u = u.summary["ks_distance"]
    D_s = s.summary["ks_distance"]
    D_2 = stats.ks_two_sample(u.normalized, s.normalized)
    report(5, f"prime generation N=128, M={M}, vs shifted exponential", D_u <= 0.05 and D_2 <= 0.04,
           f"KS uniform={D_u:.4f} (<=0.05), [sum2 KS={D_s:.4f}], two-sample uniform vs sum2={D_2:.4f} (<=0.04)")


def _composites_in(lo, hi, count, rng):
    """Uniform composites from [lo, hi]; compositeness by vectorized trial division."""
    limit = math.isqrt(hi) + 1
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    primes = np.flatnonzero(sieve).astype(np.int64)
    out = []
    while len(out) < count:
        draw = lo + rng.integers(0, hi - lo + 1, size=int(count * 1.1), dtype=np.int64)
        composite = np.zeros(draw.size, dtype=bool)
        alive = np.arange(draw.size)
        for p in primes:
            hit = draw[alive] % p == 0
            composite[alive[hit]] = True
            alive = alive[~hit]
        out.extend(draw[composite].tolist())
    return out[:count]


def test_c06_miller_rabin_false_pass(report):
    comps = _composites_in(1 << 29, 1 << 30, 10**6, np.random.default_rng(20240601))
    rng = RngStream(harness.DEFAULT_SEED, 6)
    passes = sum(miller_rabin(n, 1, rng)[0] for n in comps)
    frac = passes / len(comps)
    report(6, "one-round MR pass rate on 10^6 composites in [2^29, 2^30]", frac <= 1e-5,
           f"{passes} passes, fraction={frac:.2e} (<=1e-5)")


def test_c07_dlog_correctness(report):
    p = next_prime(10**5, 40, RngStream(0, 0))
    setups = [("zp", 10**5), ("ec", 10**4)]
    bad = []
    counts = []
    for (group, near), algo in itertools.product(setups, dlog.SOLVERS):
        # run_experiment verifies g^x == h for every instance and aborts otherwise
        try:
            res = run_experiment(ExperimentConfig(kind="dlog", group=group, order_near=near, algo=algo, samples=1000))
            counts.append(len(res.raw))
        except harness.SampleError as exc:
            bad.append(f"{group}/{algo}: {exc}")
    ok = not bad and counts == [1000] * 6
    report(7, f"DLOG correctness, 3 solvers on Z/{p}Z* and a prime-order curve near 1e4", ok,
           "6000/6000 verified" if ok else "; ".join(bad))


def test_c08_floyd_at_least_first_collision(report):
    G, g = groups.curve_group_near(10**4, RngStream(harness.DEFAULT_SEED, SETUP_STREAM))
    Z, z = groups.zp_group_near(10**5, RngStream(harness.DEFAULT_SEED, SETUP_STREAM))
    violations = 0
    total = 0
    for i in range(10**4):
        r = RngStream(harness.DEFAULT_SEED, i)
        H, gen = (G, g) if i % 2 else (Z, z)
        h = H.pow(gen, r.uniform_int(1, H.order))
        key = r.next_u64()
        first = dlog._walk(H, gen, h, key, dlog.ALGORITHMS["rho"])[0]
        floyd = dlog._walk(H, gen, h, key, dlog.ALGORITHMS["rho-floyd"])[0]
        violations += floyd < first
        total += 1
    report(8, "Floyd evaluations >= first-collision steps (shared keys)", violations == 0,
           f"{violations} violations in {total} instances")


def test_c09_floyd_signature(report):
    res = run_experiment(ExperimentConfig(kind="dlog", group="ec", order_near=10**4, algo="rho-floyd", samples=10**5))
    D = res.summary["ks_distance"]
    report(9, "rho-Floyd step counts on curve DLOGs vs Rayleigh", D <= 0.03, f"KS={D:.4f} (<=0.03)")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "sigforge.cli", *map(str, args)], capture_output=True, text=True)


def test_c10_rsa_vs_ecc(report, tmp_path):
    # Wall-clock samples are taken by the CLI in fresh processes, as a user would
    # collect them, so heap state left by earlier tests does not leak into the timings.
    rsa, ecc = tmp_path / "rsa", tmp_path / "ecc"
    r1 = _cli("keygen", "--scheme", "rsa", "--x", 2**64, "--kappa", 2, "--samples", 10**4, "--out", rsa)
    r2 = _cli("keygen", "--scheme", "ecc", "--x", 10**4, "--kappa", 2, "--samples", 10**4, "--out", ecc)
    assert r1.returncode == 0 and r2.returncode == 0, r1.stderr + r2.stderr
    r3 = _cli("analyze", rsa / "raw.csv", "--compare", ecc / "raw.csv", "--normalization", "eq1", "--reference", "none")
    assert r3.returncode == 0, r3.stderr
    D = json.loads(r3.stdout)["ks_two_sample"]
    report(10, "RSA vs ECC keygen wall-clock signatures", D >= 0.1, f"two-sample KS={D:.4f} (>=0.1)")


def test_c11_property_suites(report):
    suites = [
        "tests/test_groups.py::test_axioms_nine_point_curve",
        "tests/test_groups.py::test_axioms_zp101",
        "tests/test_stats.py",
        "tests/test_harness.py::test_determinism_and_parallel_soundness",
    ]
    root = Path(__file__).resolve().parent.parent
    rc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *suites], cwd=root).returncode
    report(11, "property suites (group axioms, normalizations, KS oracles, harness determinism)",
           rc == 0, f"pytest exit code {rc}")


def test_fig5_steps_vs_wall(report):
    res = run_experiment(ExperimentConfig(kind="dlog", group="ec", order_near=10**6, algo="rho-floyd", samples=10**4))
    wall = stats.normalize_rayleigh([d[2] for d in res.details])
    D = stats.ks_two_sample(res.normalized, wall)
    report("analyze example", "rho-Floyd steps vs wall clock", D <= 0.05, f"two-sample KS={D:.4f} (<=0.05)")


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
