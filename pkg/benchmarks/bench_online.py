"""Throughput comparison of the online-algorithm kernels.

Runs the same DDAA / CNLMS snapshot streams through the compiled
extension (when importable) and the pure-numpy fallback, and reports
snapshots per second for each.  Usage::

    python3 benchmarks/bench_online.py [--iterations N] [--sensors N]
"""

import argparse
import time

import numpy as np

from rzfbeam import covariance, scenarios
from rzfbeam import _kernels
from rzfbeam._kernels import fallback


def _best_time(func, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iterations", type=int, default=50_000)
    parser.add_argument("--sensors", type=int, default=16)
    parser.add_argument("--interferers", type=int, default=7)
    args = parser.parse_args()

    scenario, models = scenarios.build_toy(args.sensors, args.interferers,
                                           rho=0.6)
    block = scenarios.generate_block(scenario, models, args.iterations, 7)
    snapshots = np.ascontiguousarray(block.snapshots.T)
    desired = np.ascontiguousarray(block.sources[0])
    h0 = np.array(scenario.desired_channel)
    h_tilde = np.array(covariance.interference_gram(scenario).normalized_channels)
    w0 = h0 / np.vdot(h0, h0).real

    channels = np.array(scenario.channels)
    targets = np.zeros(channels.shape[1], dtype=complex)
    targets[0] = 1.0
    gram = channels.conj().T @ channels
    pinv = channels @ np.linalg.inv(gram)
    projector = np.eye(args.sensors, dtype=complex) - pinv @ channels.conj().T
    feasible = pinv @ targets

    impls = [("fallback", fallback)]
    if _kernels.backend() == "compiled":
        impls.insert(0, ("compiled", _kernels._impl))
    else:
        print("note: compiled extension not importable; benchmarking "
              "fallback only")

    print(f"{args.iterations} snapshots, N={args.sensors}, "
          f"J={args.interferers}")
    results = {}
    for kind in ("ddaa", "cnlms"):
        for name, impl in impls:
            if kind == "ddaa":
                run = lambda: impl.ddaa_run(w0.copy(), snapshots, desired,
                                            h0, h_tilde, 0.05, 0.1, 0.5)
            else:
                run = lambda: impl.cnlms_run(w0.copy(), snapshots, desired,
                                             channels, targets, projector,
                                             feasible, 0.1, 1e-12)
            elapsed = _best_time(run)
            rate = args.iterations / elapsed
            results[(kind, name)] = rate
            print(f"  {kind:6s} {name:9s} {elapsed * 1e3:9.1f} ms   "
                  f"{rate / 1e6:7.3f} M snapshots/s")
        if len(impls) == 2:
            speedup = (results[(kind, "compiled")]
                       / results[(kind, "fallback")])
            print(f"  {kind:6s} speedup   {speedup:9.1f}x")


if __name__ == "__main__":
    main()
