#!/usr/bin/env python3
"""Compare the filter's state dimensionality against the accumulative and
trailing-window memory baselines on synthetic scenes of increasing density.

Usage: python scripts/bench_dimensionality.py [--frames N] [--window K]
"""

import argparse
import statistics
import time

from geofilter.core import FilterState, default_config
from geofilter.pipeline import baseline_store, step
from geofilter.scene_synth import SceneSpec, generate


def run_one(n_points: int, frames: int, window: int, seed: int = 1):
    config = default_config()
    spec = SceneSpec(n_points=n_points, frames=frames, camera=config.camera,
                     depth_range=(150.0, 2000.0),
                     lateral_range=(-400.0, 400.0))
    truth = generate(seed, spec)
    counts = [len(truth.edges(k)) for k in range(frames)]
    state = FilterState()
    totals = []
    t0 = time.perf_counter()
    for k in range(frames):
        state, rep = step(state, truth.edges(k), truth.imu[k], config,
                          frame_index=k)
        totals.append(rep.total)
    elapsed = time.perf_counter() - t0
    acc = baseline_store("accumulative", counts)
    last = baseline_store("last_k", counts, k=window)
    return counts, totals, acc, last, elapsed


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=100)
    parser.add_argument("--window", type=int, default=8)
    args = parser.parse_args()

    print(f"{'points':>7} {'edges/f':>8} {'filter':>8} {'accum':>10} "
          f"{'last-%d' % args.window:>8} {'sec':>6}")
    for n_points in (150, 400, 1100):
        counts, totals, acc, last, elapsed = run_one(n_points, args.frames,
                                                     args.window)
        print(f"{n_points:>7} {statistics.mean(counts):>8.0f} "
              f"{statistics.mean(totals):>8.0f} {acc[-1]:>10} "
              f"{statistics.mean(last):>8.0f} {elapsed:>6.2f}")


if __name__ == "__main__":
    main()
