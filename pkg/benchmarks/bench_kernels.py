"""Compare the compiled kernels against the pure-numpy fallback.

Runs each workload twice in fresh interpreters, once with numba enabled and
once with ``BETAPOLY_DISABLE_NUMBA=1``, checks that both paths agree, and
prints a timing table. Simulation workloads must match bit for bit; the
quadrature workload is allowed a relative drift of 1e-13 because compiled
transcendental functions round differently from the C library.

Usage::

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _workloads():
    # imports stay inside so the parent process never loads the package
    from betapoly.montecarlo import (
        simulate_expected_external_angle,
        simulate_expected_fvector,
        simulate_poisson_fvector,
        simulate_tangent_civ,
    )
    from betapoly.quadrature import compute_I, compute_I_tilde
    from betapoly.sampling import DistParams, SeededStream

    def quadrature():
        out = []
        for n in (12, 25, 40):
            out.append(compute_I(n, 5, 2.5).value)
            out.append(compute_I_tilde(n, 5, 2.5).value)
        return out

    def hull_fvector():
        est = simulate_expected_fvector(
            DistParams("beta", 3, 0.5), 25, 100, SeededStream(5, 0)
        )
        return [e.mean for e in est]

    def external_angle():
        est = simulate_expected_external_angle(
            DistParams("beta", 3, 0.0), 6, 1, 200, SeededStream(6, 0), inner_samples=512
        )
        return [est.mean, est.std_error]

    def grassmann_civ():
        est = simulate_tangent_civ(
            DistParams("beta", 2, 0.0), 4, 1, 0, 200, SeededStream(7, 0), inner_samples=512
        )
        return [est.mean, est.std_error]

    def poisson_hull():
        est = simulate_poisson_fvector(2, 1.0, 400, SeededStream(8, 0))
        return [e.mean for e in est]

    return {
        "quadrature": quadrature,
        "hull-fvector": hull_fvector,
        "external-angle": external_angle,
        "grassmann-civ": grassmann_civ,
        "poisson-hull": poisson_hull,
    }


# relative agreement bound per workload; 0.0 demands bitwise equality
TOLERANCES = {
    "quadrature": 1e-13,
    "hull-fvector": 0.0,
    "external-angle": 0.0,
    "grassmann-civ": 0.0,
    "poisson-hull": 0.0,
}


def _run_child(repeats: int) -> None:
    from betapoly._accel import USING_NUMBA

    report = {"numba": USING_NUMBA, "results": {}}
    for name, fn in _workloads().items():
        fn()  # warm up: triggers JIT compilation on the numba path
        best = float("inf")
        value = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            value = fn()
            best = min(best, time.perf_counter() - t0)
        report["results"][name] = {"seconds": best, "value": value}
    json.dump(report, sys.stdout)


def _spawn(disable_numba: bool, repeats: int) -> dict:
    env = dict(os.environ)
    env["BETAPOLY_DISABLE_NUMBA"] = "1" if disable_numba else "0"
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--child", "--repeats", str(repeats)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.child:
        _run_child(args.repeats)
        return 0

    fast = _spawn(False, args.repeats)
    slow = _spawn(True, args.repeats)
    if not fast["numba"]:
        print("warning: numba unavailable, both columns use the fallback")

    header = f"{'workload':<16} {'numba':>10} {'numpy':>10} {'speedup':>8}  match"
    print(header)
    print("-" * len(header))
    ok = True
    for name in fast["results"]:
        f, s = fast["results"][name], slow["results"][name]
        tol = TOLERANCES[name]
        if tol == 0.0:
            match = f["value"] == s["value"]
            label = "exact"
        else:
            match = all(
                abs(a - b) <= tol * max(abs(a), abs(b), 1.0)
                for a, b in zip(f["value"], s["value"])
            )
            label = f"rel<={tol:g}"
        ok &= match
        print(
            f"{name:<16} {f['seconds']:>9.4f}s {s['seconds']:>9.4f}s"
            f" {s['seconds'] / f['seconds']:>7.1f}x  {label if match else 'DIFFER'}"
        )
    if not ok:
        print("error: kernel paths disagree", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
