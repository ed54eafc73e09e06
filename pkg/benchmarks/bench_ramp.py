#!/usr/bin/env python3
"""Benchmark the compiled step-delay kernel against the pure-Python fallback.

    python benchmarks/bench_ramp.py

Also verifies that both paths emit identical delay sequences.
"""

import time

from scanrig import _ramp_py

try:
    from scanrig import _ramp
except ImportError:
    _ramp = None

# (steps, label): a scan transition, a long slew, and a full revolution.
CASES = [
    (1_000, "10 deg scan transition"),
    (9_000, "90 deg slew"),
    (36_000, "full revolution"),
]
STEPS_PER_S = 3_000.0   # 30 deg/s at 0.01 deg/step
STEPS_PER_S2 = 6_000.0  # 60 deg/s^2


def bench(fn, n_steps, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(n_steps, STEPS_PER_S, STEPS_PER_S2)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    if _ramp is None:
        print("compiled kernel not built (python setup.py build_ext --inplace); "
              "benchmarking fallback only")
    print(f"{'case':<24}{'pure python':>14}{'compiled':>14}{'speedup':>10}")
    for n_steps, label in CASES:
        repeats = max(5, 200_000 // n_steps)
        py = bench(_ramp_py.step_delays_us, n_steps, repeats)
        line = f"{label:<24}{py * 1e3:>11.3f} ms"
        if _ramp is not None:
            cy = bench(_ramp.step_delays_us, n_steps, repeats)
            assert _ramp.step_delays_us(n_steps, STEPS_PER_S, STEPS_PER_S2) == \
                _ramp_py.step_delays_us(n_steps, STEPS_PER_S, STEPS_PER_S2)
            line += f"{cy * 1e3:>11.3f} ms{py / cy:>9.1f}x"
        print(line)
    if _ramp is not None:
        print("outputs identical: yes")


if __name__ == "__main__":
    main()
