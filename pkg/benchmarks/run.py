#!/usr/bin/env python3
# Copyright 2026 The quefrency Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Score the adaptive filter over a seeded velocity sweep.

Every seeded broadband source is flown past the receiver at each
velocity; the direct-only (A) and direct-plus-reflected (B) recordings
are scored against the reference before and after filtering, and the
per-velocity means are checked for the expected improvements.
"""

import argparse
import concurrent.futures
import math
import os
import sys
import time

import numpy as np

import quefrency
from quefrency import motion_sim

DEFAULT_SEEDS = 5
DEFAULT_DURATION = 10.0
DEFAULT_SAMPLE_RATE = 32000

# Bounds on the mean IS reduction of the B variant, in percent.
IS_REDUCTION_RANGE = (10.0, 95.0)

HEADER = (
    'v (m/s)',
    'var',
    'SNR',
    "SNR'",
    'LSD',
    "LSD'",
    'IS',
    "IS'",
    'IS red%',
)
WIDTHS = (8, 4, 9, 9, 9, 9, 11, 11, 8)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument(
        '-n', '--num-seeds', default=DEFAULT_SEEDS, type=int
    )
    parser.add_argument(
        '-d', '--duration', default=DEFAULT_DURATION, type=float
    )
    parser.add_argument(
        '-j', '--jobs', default=min(4, os.cpu_count() or 1), type=int
    )
    parser.add_argument(
        '--real-bins',
        action='store_true',
        help='also score the DC and Nyquist bins',
    )
    parser.add_argument('velocities', nargs='*', type=float)
    args = parser.parse_args()
    real_bins = args.real_bins
    velocities = args.velocities or list(motion_sim.DEFAULT_VELOCITIES)

    scenario = quefrency.MotionScenario()
    cfg = quefrency.PipelineConfig(scenario=scenario)
    items = [
        (seed, v) for seed in range(args.num_seeds) for v in velocities
    ]

    def score(item):
        seed, v = item
        source = quefrency.generate_broadband(
            args.duration, DEFAULT_SAMPLE_RATE, seed
        )
        (triple,) = quefrency.velocity_sweep(source, scenario, [v])
        reference = quefrency.stft(
            triple.reference, cfg.window_size, cfg.hop_size
        )
        first = math.ceil(triple.arrival_sample / cfg.hop_size)
        scores = {}
        for variant, signal in (('A', triple.direct), ('B', triple.combined)):
            test = quefrency.stft(signal, cfg.window_size, cfg.hop_size)
            filtered = quefrency.filter_spectrogram(test, cfg)
            for name, spec in ((variant, test), (variant + "'", filtered)):
                scores[name] = quefrency.evaluate(
                    quefrency.scoring_grid(reference, first, real_bins),
                    quefrency.scoring_grid(spec, first, real_bins),
                )
        return v, scores

    start = time.time()
    with concurrent.futures.ThreadPoolExecutor(args.jobs) as pool:
        results = list(pool.map(score, items))
    elapsed = time.time() - start

    means = {}
    for v in velocities:
        reports = [s for rv, s in results if rv == v]
        means[v] = {
            name: tuple(
                float(np.mean([getattr(r[name], m) for r in reports]))
                for m in ('snr_db', 'lsd', 'is_distance')
            )
            for name in ('A', "A'", 'B', "B'")
        }

    print(
        ' '.join(
            f'{label:>{width}}' for label, width in zip(HEADER, WIDTHS)
        )
    )
    for v in velocities:
        for variant in ('A', 'B'):
            u = means[v][variant]
            f = means[v][variant + "'"]
            print(
                f'{v:8g} {variant:>4} {u[0]:9.3f} {f[0]:9.3f} '
                f'{u[1]:9.5f} {f[1]:9.5f} {u[2]:11.4g} {f[2]:11.4g} '
                f'{100 * (u[2] - f[2]) / u[2]:8.1f}'
            )

    lo, hi = IS_REDUCTION_RANGE
    checks = {
        "SNR(R,B') > SNR(R,B)": all(
            means[v]["B'"][0] > means[v]['B'][0] for v in velocities
        ),
        "LSD and IS of B' below B": all(
            means[v]["B'"][i] < means[v]['B'][i]
            for v in velocities
            for i in (1, 2)
        ),
        f'IS reduction of B within {lo:g}-{hi:g}%': all(
            lo <= 100 * (1 - means[v]["B'"][2] / means[v]['B'][2]) <= hi
            for v in velocities
        ),
        "LSD and IS of A' below A": all(
            means[v]["A'"][i] < means[v]['A'][i]
            for v in velocities
            for i in (1, 2)
        ),
    }
    print()
    for name, ok in checks.items():
        print(f'{"ok  " if ok else "FAIL"} {name}')
    print(
        f'\n{len(items)} recordings of {args.duration:g} s scored in '
        f'{elapsed:.1f} s on {args.jobs} worker(s)'
    )
    return 0 if all(checks.values()) else 1


if __name__ == '__main__':
    sys.exit(main())
