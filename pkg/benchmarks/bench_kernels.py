"""Compare the compiled kernels with the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]

Times the raw kernels on identical inputs and then one polar-chart
transport through each backend, and checks that both backends agree.
"""

import argparse
import timeit

import numpy as np

from pathkin import kernels
from pathkin.geometry import Path, polar_chart


def _inputs(steps, dim=4, seed=0):
    rng = np.random.default_rng(seed)
    A = np.ascontiguousarray(rng.normal(scale=0.3, size=(2 * steps + 1, dim, dim)))
    G = np.ascontiguousarray(rng.normal(size=(2 * steps + 1, dim, dim, dim)))
    T = np.ascontiguousarray(rng.normal(size=(2 * steps + 1, dim)))
    Z = np.ascontiguousarray(rng.normal(size=(steps + 1, dim, dim)))
    Tn = np.ascontiguousarray(rng.normal(size=(steps + 1, dim)))
    return A, G, T, Z, Tn


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def _transport_job(mod, steps):
    # the same steps ConnectionTransport runs, dispatched to a chosen backend
    path = Path.polynomial([[1.5, 0.2, -0.1], [0.0, 2.0, 0.5]], (0.0, 1.0))
    us = np.linspace(0.0, 1.0, 2 * steps + 1)
    G = np.ascontiguousarray(polar_chart().christoffel_many(path.eval_many(us)))
    T = np.ascontiguousarray(path.tangent_many(us))

    def run():
        A = np.ascontiguousarray(mod.contract_connection(G, T))
        return np.asarray(mod.rk4_propagate(A, 1.0 / steps))

    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--steps", type=int, nargs="+", default=[256, 2048])
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    print(f"backends: {', '.join(sorted(backends))} (default: {kernels.BACKEND})")
    if "cython" not in backends:
        print("compiled extension not built; only the fallback is timed")

    rows = []
    for steps in args.steps:
        A, G, T, Z, Tn = _inputs(steps)
        jobs = {
            "contract_connection": lambda m: m.contract_connection(G, T),
            "rk4_propagate": lambda m: m.rk4_propagate(A, 1.0 / steps),
            "rk4_propagate(keep)": lambda m: m.rk4_propagate(A, 1.0 / steps, False, True),
            "simpson_transported": lambda m: m.simpson_transported(Z, Tn, 1.0 / steps),
        }
        for name, job in jobs.items():
            ref = None
            times = {}
            for bname, mod in sorted(backends.items()):
                out = np.asarray(job(mod))
                if ref is None:
                    ref = out
                elif not np.allclose(out, ref, rtol=1e-12, atol=1e-12):
                    raise SystemExit(f"{name}: backends disagree")
                times[bname] = _time(lambda: job(mod), args.repeat)
            rows.append((f"{name} [{steps}]", times))

        t_times = {}
        for bname, mod in sorted(backends.items()):
            run = _transport_job(mod, steps)
            t_times[bname] = _time(run, args.repeat)
        rows.append((f"polar transport [{steps}]", t_times))

    width = max(len(r[0]) for r in rows)
    names = sorted(backends)
    print(f"{'kernel':<{width}}  " + "  ".join(f"{n:>12}" for n in names) + ("  speedup" if len(names) > 1 else ""))
    for label, times in rows:
        cells = "  ".join(f"{times[n] * 1e3:>10.3f}ms" for n in names)
        extra = ""
        if "cython" in times and "python" in times:
            extra = f"  {times['python'] / times['cython']:6.1f}x" if times["cython"] > 0 else "     inf"
        print(f"{label:<{width}}  {cells}{extra}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
