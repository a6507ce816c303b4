"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from linkstab import kernels


def bench_backend(name, module, repeat):
    rng = np.random.default_rng(0)
    gamma = rng.normal(10.0, 5.0, 1_000_000)
    prr = rng.random(200_000)
    uniforms = rng.random((200_000, 7))
    cases = {
        "ncfsk_prr 1e6": lambda: module.ncfsk_prr(gamma, 800),
        "count_attempts 2e5x7": lambda: module.count_attempts(prr, uniforms, 8),
    }
    out = {}
    for label, fn in cases.items():
        out[label] = min(timeit.repeat(fn, number=1, repeat=repeat))
    return out


SWEEP_SNIPPET = """
import time
from linkstab import preset
from linkstab.montecarlo import SweepScenario, run_prr_sweep
import numpy as np
sc = SweepScenario(preset("indoor"), tuple(np.arange(1.0, 40.5, 0.5)), 1000, 10, seed=1)
best = min(
    (lambda t0: (run_prr_sweep(sc), time.perf_counter() - t0)[1])(time.perf_counter())
    for _ in range({repeat})
)
print(best)
"""


def bench_sweep(pure, repeat):
    env = dict(os.environ)
    env.pop("LINKSTAB_PURE_PYTHON", None)
    if pure:
        env["LINKSTAB_PURE_PYTHON"] = "1"
    res = subprocess.run([sys.executable, "-c", SWEEP_SNIPPET.format(repeat=repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return float(res.stdout.strip())


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = kernels.available_backends()
    results = {name: bench_backend(name, mod, args.repeat) for name, mod in backends.items()}
    labels = next(iter(results.values())).keys()
    print(f"{'kernel':<24}" + "".join(f"{n:>12}" for n in results) + "   speedup")
    for label in labels:
        times = [results[n][label] for n in results]
        speedup = results["numpy"][label] / results["cython"][label] if "cython" in results else 1.0
        print(f"{label:<24}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + f"   {speedup:6.2f}x")

    fast = bench_sweep(False, args.repeat) if "cython" in results else None
    pure = bench_sweep(True, args.repeat)
    line = f"{'prr sweep 79x1000':<24}"
    if fast is not None:
        line += f"{fast * 1e3:>10.2f}ms{pure * 1e3:>10.2f}ms   {pure / fast:6.2f}x"
    else:
        line += f"{pure * 1e3:>10.2f}ms"
    print(line)


if __name__ == "__main__":
    main()
