"""Compare the compiled and NumPy kernel backends.

Run with ``python3 benchmarks/bench_kernels.py [--repeat R]``.  Each kernel is
timed on random in-class brackets of several sizes for the NumPy fallback, the
compiled backend, and the size-routed ``auto`` dispatch used by default; the
last column is the gain of ``auto`` over the fallback.  The wall-clock of a
normalized bracket flow under each backend setting closes the report.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from hcflow import kernels
from hcflow.sampling import random_in_class

FLOW_SNIPPET = (
    "import time; from hcflow.catalog import catalog; from hcflow.algebra import LieAlgebraSpec; "
    "from hcflow.sampling import random_in_class; from hcflow.flows import FlowConfig, normalized_bracket_flow; "
    "import numpy as np; mu = random_in_class({n}, {q}, np.random.default_rng(1)); "
    "spec = LieAlgebraSpec.build('b', mu); t = time.perf_counter(); "
    "normalized_bracket_flow(spec, FlowConfig(t_max=100.0, samples=2)); print(time.perf_counter() - t)"
)


def bench_kernels(repeat):
    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled backend not built; only the fallback is available")
    rng = np.random.default_rng(0)
    backends = dict(backends, auto=kernels)
    print(f"{'kernel':<12}{'n':>3}" + "".join(f"{name:>14}" for name in backends) + f"{'auto gain':>11}")
    for n in (3, 5, 8):
        C = np.ascontiguousarray(random_in_class(n, n // 2, rng).full)
        m = 2 * n
        E = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        Ei = np.linalg.inv(E)
        calls = {
            "pi_full": lambda mod: mod.pi_full(E, C),
            "act_full": lambda mod: mod.act_full(E, Ei, C),
            "theta_form": lambda mod: mod.theta_form(C, n),
            "ricci_form": lambda mod: mod.ricci_form(C, n),
            "norm2": lambda mod: mod.norm2(C),
        }
        for name, call in calls.items():
            times = {}
            for b, mod in backends.items():
                number = 200
                times[b] = min(timeit.repeat(lambda: call(mod), number=number, repeat=repeat)) / number
            cells = "".join(f"{times[b] * 1e6:>11.1f} us" for b in backends)
            speed = times["python"] / times["auto"]
            print(f"{name:<12}{n:>3}{cells}{speed:>10.2f}x")


def bench_flow():
    print("\nnormalized bracket flow to t = 100 (random n=4, q=2 bracket)")
    for choice in ("python", "cython", "auto"):
        env = dict(os.environ, HCFLOW_KERNELS=choice)
        r = subprocess.run([sys.executable, "-c", FLOW_SNIPPET.format(n=4, q=2)],
                           env=env, capture_output=True, text=True)
        if r.returncode != 0:
            print(f"  {choice:<8} unavailable")
            continue
        print(f"  {choice:<8} {float(r.stdout):.3f} s")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--no-flow", action="store_true", help="skip the end-to-end flow timing")
    args = p.parse_args()
    bench_kernels(args.repeat)
    if not args.no_flow:
        bench_flow()


if __name__ == "__main__":
    main()
