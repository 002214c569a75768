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

"""Two-path propagation of a moving source over a reflecting plane.

A source at height z_s moves in a straight line at speed v_s, its
horizontal range to a receiver at height z_r being r(t) = r0 + v_s*t
(a fly-over therefore starts at negative r0). Sound reaches the receiver
along the direct path and along the path mirrored in the boundary, with
times of arrival sigma_1 and sigma_2 and 1/R spherical spreading.
"""

import dataclasses
import logging
from typing import Callable, List, Sequence

import numpy as np

from .signal_io import TimeSignal


log = logging.getLogger(__name__)

DEFAULT_Z_S = 100.0
DEFAULT_Z_R = 0.5
DEFAULT_SOUND_SPEED = 343.0
DEFAULT_REFLECTION_COEFFICIENT = -1.0
DEFAULT_VELOCITIES = tuple(float(v) for v in range(10, 101, 10))

# Path lengths below this are treated as this, keeping 1/R finite.
REFERENCE_DISTANCE = 1.0

_SNAP_TOLERANCE = 1e-9


@dataclasses.dataclass(frozen=True)
class MotionScenario:
    r0: float = 0.0
    v_s: float = 0.0
    z_s: float = DEFAULT_Z_S
    z_r: float = DEFAULT_Z_R
    c: float = DEFAULT_SOUND_SPEED
    reflection_coefficient: float = DEFAULT_REFLECTION_COEFFICIENT

    def __post_init__(self):
        for name in ('z_s', 'z_r', 'c'):
            if not getattr(self, name) > 0:
                raise ValueError(
                    f'{name} must be positive, got {getattr(self, name)}'
                )
        if not abs(self.reflection_coefficient) <= 1:
            raise ValueError(
                'reflection_coefficient must lie in [-1, 1], got '
                f'{self.reflection_coefficient}'
            )

    def centered(self, velocity: float, duration: float) -> 'MotionScenario':
        """This scenario at ``velocity``, passing closest to the receiver
        halfway through a recording of ``duration`` seconds."""
        return dataclasses.replace(
            self, v_s=velocity, r0=-velocity * duration / 2
        )


@dataclasses.dataclass(frozen=True, eq=False)
class SimulatedTriple:
    """Reference (gain only), direct-path and direct-plus-reflected
    versions of one source under one scenario."""

    reference: TimeSignal
    direct: TimeSignal
    combined: TimeSignal
    scenario: MotionScenario

    def __post_init__(self):
        signals = (self.reference, self.direct, self.combined)
        if len({len(s) for s in signals}) != 1:
            raise ValueError('triple signals must have equal lengths')
        if len({s.sample_rate for s in signals}) != 1:
            raise ValueError('triple signals must share a sample rate')

    @property
    def arrival_sample(self) -> int:
        return arrival_sample(
            self.scenario, self.reference.sample_rate, len(self.reference)
        )


def _horizontal_range(scenario: MotionScenario, t):
    return scenario.r0 + scenario.v_s * t


def direct_delay(scenario: MotionScenario, t):
    """sigma_1(t): time of arrival along the direct path."""
    return (
        np.hypot(_horizontal_range(scenario, t), scenario.z_s - scenario.z_r)
        / scenario.c
    )


def reflected_delay(scenario: MotionScenario, t):
    """sigma_2(t): time of arrival along the boundary-reflected path."""
    return (
        np.hypot(_horizontal_range(scenario, t), scenario.z_s + scenario.z_r)
        / scenario.c
    )


def closest_approach_time(scenario: MotionScenario) -> float:
    if scenario.v_s == 0:
        raise ValueError('a stationary source has no closest approach')
    return -scenario.r0 / scenario.v_s


def arrival_sample(
    scenario: MotionScenario, sample_rate: int, length: int
) -> int:
    """First output sample at which both paths carry source content
    (``length`` if that never happens)."""

    t = np.arange(length) / sample_rate
    arrived = t - reflected_delay(scenario, t) >= 0
    if not np.any(arrived):
        return length
    return int(np.argmax(arrived))


def _lagrange_weights(frac):
    # Cubic Lagrange on the nodes -1, 0, 1, 2.
    fm1 = frac - 1.0
    fm2 = frac - 2.0
    fp1 = frac + 1.0
    return (
        -frac * fm1 * fm2 / 6.0,
        fp1 * fm1 * fm2 / 2.0,
        -fp1 * frac * fm2 / 2.0,
        fp1 * frac * fm1 / 6.0,
    )


def apply_time_varying_delay(
    signal: TimeSignal, delay_fn: Callable[[np.ndarray], np.ndarray]
) -> TimeSignal:
    """out[n] = in(t_n - delay_fn(t_n)), read with cubic Lagrange
    interpolation; reads before the first or after the last input sample
    are zero.

    A delay that changes with time stretches or compresses the signal,
    which is the Doppler shift of a moving source.
    """

    n = len(signal)
    t = signal.times
    delay = np.broadcast_to(np.asarray(delay_fn(t), dtype=np.float64), (n,))
    if not np.all(np.isfinite(delay)):
        raise ValueError('delay must be finite over the whole signal')

    pos = np.arange(n) - delay * signal.sample_rate
    # Whole-sample delays must read samples exactly, not interpolate.
    nearest = np.rint(pos)
    pos = np.where(np.abs(pos - nearest) < _SNAP_TOLERANCE, nearest, pos)
    base = np.floor(pos)
    frac = pos - base
    base = base.astype(np.int64)

    padded = np.concatenate([np.zeros(2), signal.samples, np.zeros(3)])
    out = np.zeros(n)
    inside = (pos >= 0) & (pos <= n - 1)
    for offset, w in zip((-1, 0, 1, 2), _lagrange_weights(frac)):
        idx = np.clip(base + offset + 2, 0, len(padded) - 1)
        out += np.where(inside, w * padded[idx], 0.0)

    if not np.any(inside):
        log.warning('delay exceeds the signal everywhere; output is silent')
    return TimeSignal(out, signal.sample_rate)


def _spreading_gain(path_length):
    return 1.0 / np.maximum(path_length, REFERENCE_DISTANCE)


def synthesize_triple(
    source: TimeSignal, scenario: MotionScenario
) -> SimulatedTriple:
    """The reference R (1/R_1 gain, no delay), direct A and combined B
    versions of ``source``."""

    if len(source) == 0:
        raise ValueError('cannot simulate an empty source')

    t = source.times
    r_1 = scenario.c * direct_delay(scenario, t)
    r_2 = scenario.c * reflected_delay(scenario, t)
    gain_1 = _spreading_gain(r_1)

    reference = source.samples * gain_1
    direct_path = apply_time_varying_delay(
        source, lambda tt: direct_delay(scenario, tt)
    )
    direct = direct_path.samples * gain_1
    if scenario.reflection_coefficient == 0:
        combined = direct.copy()
    else:
        reflected = apply_time_varying_delay(
            source, lambda tt: reflected_delay(scenario, tt)
        )
        combined = direct + (
            scenario.reflection_coefficient
            * reflected.samples
            * _spreading_gain(r_2)
        )

    rate = source.sample_rate
    return SimulatedTriple(
        reference=TimeSignal(reference, rate),
        direct=TimeSignal(direct, rate),
        combined=TimeSignal(combined, rate),
        scenario=scenario,
    )


def velocity_sweep(
    source: TimeSignal,
    base: MotionScenario,
    velocities: Sequence[float] = DEFAULT_VELOCITIES,
    centered: bool = True,
) -> List[SimulatedTriple]:
    """One triple per velocity.

    With ``centered`` the closest approach falls mid-recording
    (r0 = -v * duration / 2); otherwise base.r0 is kept.
    """

    if not velocities:
        raise ValueError('velocity sweep needs at least one velocity')
    triples = []
    for v in velocities:
        if centered:
            scenario = base.centered(v, source.duration)
        else:
            scenario = dataclasses.replace(base, v_s=v)
        log.info('simulating v_s = %g m/s (r0 = %g m)', v, scenario.r0)
        triples.append(synthesize_triple(source, scenario))
    return triples
