"""Compiled core vs pure-Python fallback on the hot loops.

    python3 benchmarks/bench_kernels.py [--repeat R]

Each row times the same calls on both backends (identical inputs and RNG
streams, so identical outputs) and reports the best of R repeats.
"""
import argparse
import sys
import time

from sigforge import _pykernels, kernels
from sigforge.groups import curve_group_near, zp_group_near
from sigforge.sampling import RngStream


def _cases():
    N = 40009
    G, g = zp_group_near(10**5, RngStream(1, 0))
    E, P = curve_group_near(10**4, RngStream(1, 0))
    hz = [G.pow(g, 1 + 7919 * i) for i in range(50)]
    he = [E.pow(P, 1 + 7919 * i) for i in range(50)]
    c = E.curve
    cap = 10**8
    return {
        "birthday walk x200": lambda m: [m.birthday_walk(RngStream(2, i).bitgen, N, cap) for i in range(200)],
        "rho walk x200": lambda m: [m.rho_walk(N, i, 3 * i % N, i, cap) for i in range(200)],
        "uniform-gamma walk x200": lambda m: [
            m.uniform_gamma_walk(RngStream(3, i).bitgen, N, 17, i, cap) for i in range(200)
        ],
        "gamma-n walk x200": lambda m: [m.gamma_n_walk(RngStream(4, i).bitgen, N, i, cap) for i in range(200)],
        "zp rho-floyd dlog x50": lambda m: [m.dlog_walk_zp(G.p, G.order, g, h, i, 2, cap) for i, h in enumerate(hz)],
        "ec rho dlog x50": lambda m: [m.dlog_walk_ec(c.p, c.a, E.order, P, h, i, 1, cap) for i, h in enumerate(he)],
        "ec birthday dlog x50": lambda m: [m.dlog_walk_ec(c.p, c.a, E.order, P, h, i, 0, cap) for i, h in enumerate(he)],
        "count points p=100003 x5": lambda m: [m.count_points(100003, 1, b) for b in range(1, 6)],
    }


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    core = kernels.load_compiled()
    if core is None:
        print("compiled core is not built; run `pip install -e . --no-build-isolation` first")
        return 1
    print(f"{'kernel':<28}{'python (s)':>12}{'compiled (s)':>14}{'speedup':>10}")
    for name, fn in _cases().items():
        tp, outp = _best(lambda: fn(_pykernels), args.repeat)
        tc, outc = _best(lambda: fn(core), args.repeat)
        if outp != outc:
            print(f"{name}: backends disagree", file=sys.stderr)
            return 2
        print(f"{name:<28}{tp:>12.4f}{tc:>14.5f}{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
