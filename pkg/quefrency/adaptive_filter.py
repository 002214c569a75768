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

"""Single-pole IIR filters and the amplitude-adaptive band-stop filter.

All filters here run along the time axis of a quefrency track, so their
"sample rate" is the cepstrogram frame rate. The smoothing coefficient is
used literally as a = 2*pi*f_c/f_r and must stay in (0, 1].

The step functions take scalars or numpy arrays for both the state and
the input. With arrays every element is an independent track advanced in
lock-step; the arithmetic is elementwise and identical to the scalar
case, so batching tracks does not change a single bit of the output.
"""

import dataclasses
import logging
import math
from typing import Any, List, Optional, Tuple

import numpy as np
from scipy import signal as sp_signal

from .cepstral import Cepstrogram, QuefrencyBand


log = logging.getLogger(__name__)

# Used for I_mid when the in-band region of the input is identically zero.
I_MID_FALLBACK = 1e-12


@dataclasses.dataclass(frozen=True, eq=False)
class LowPassState:
    """One single-pole low-pass filter: its corner and last output."""

    corner_frequency: Any
    sample_rate: float
    previous_output: Any = 0.0

    @property
    def coefficient(self):
        return 2 * math.pi * self.corner_frequency / self.sample_rate


def _checked_coefficient(state: LowPassState):
    a = state.coefficient
    if not np.all((a > 0) & (a <= 1)):
        raise ValueError(
            f'unstable low-pass: 2*pi*f_c/f_r must be in (0, 1], got '
            f'f_c={state.corner_frequency} at f_r={state.sample_rate}'
        )
    return a


def lpf_step(state: LowPassState, x_t) -> Tuple[LowPassState, Any]:
    a = _checked_coefficient(state)
    y_t = a * x_t + (1.0 - a) * state.previous_output
    return dataclasses.replace(state, previous_output=y_t), y_t


def hpf_step(state: LowPassState, x_t) -> Tuple[LowPassState, Any]:
    state, low = lpf_step(state, x_t)
    return state, x_t - low


def bsf_step(
    state1: LowPassState, state2: LowPassState, x_t
) -> Tuple[Tuple[LowPassState, LowPassState], Any]:
    """x + LPF1(x) - LPF2(x): passes below f_c1 and above f_c2."""

    if np.any(state1.corner_frequency > state2.corner_frequency):
        raise ValueError(
            'band-stop needs f_c1 <= f_c2, got '
            f'{state1.corner_frequency} > {state2.corner_frequency}'
        )
    state1, y1 = lpf_step(state1, x_t)
    state2, y2 = lpf_step(state2, x_t)
    return (state1, state2), x_t + y1 - y2


def bsf_response(f_c1, f_c2, frame_rate, freqs) -> np.ndarray:
    """Complex frequency response of the fixed band-stop filter at
    ``freqs`` (Hz)."""

    def lowpass(f_c):
        a = 2 * math.pi * f_c / frame_rate
        _, h = sp_signal.freqz([a], [1.0, a - 1.0], worN=freqs, fs=frame_rate)
        return h

    return 1.0 + lowpass(f_c1) - lowpass(f_c2)


@dataclasses.dataclass(frozen=True)
class AdaptiveBandStopConfig:
    """Corner ranges and adaptation parameters of the adaptive filter.

    The low branch corner moves within [f_min1, f_max1] and the high
    branch corner within [f_min2, f_max2]; both move outward (widening
    the stop band) as the smoothed track amplitude grows relative to
    I_mid. ``i_mid=None`` means "use the median in-band magnitude".
    """

    f_min1: float = 0.05
    f_max1: float = 0.5
    f_min2: float = 2.0
    f_max2: float = 15.0
    i_mid: Optional[float] = None
    f_pre: float = 1.0

    def __post_init__(self):
        if not 0 < self.f_min1 <= self.f_max1:
            raise ValueError(
                f'need 0 < f_min1 <= f_max1, got {self.f_min1}, {self.f_max1}'
            )
        if not self.f_min2 <= self.f_max2:
            raise ValueError(
                f'need f_min2 <= f_max2, got {self.f_min2}, {self.f_max2}'
            )
        if not self.f_max1 < self.f_min2:
            raise ValueError(
                'the stop band is ill-formed unless f_max1 < f_min2, got '
                f'{self.f_max1} >= {self.f_min2}'
            )
        if self.i_mid is not None and not self.i_mid > 0:
            raise ValueError(f'i_mid must be positive, got {self.i_mid}')
        if not self.f_pre > 0:
            raise ValueError(f'f_pre must be positive, got {self.f_pre}')

    @classmethod
    def fixed(cls, f_c1, f_c2, f_pre=1.0, i_mid=None):
        """A configuration whose corners never move: the plain BSF."""
        return cls(
            f_min1=f_c1,
            f_max1=f_c1,
            f_min2=f_c2,
            f_max2=f_c2,
            i_mid=i_mid,
            f_pre=f_pre,
        )

    @property
    def is_fixed(self) -> bool:
        return self.f_min1 == self.f_max1 and self.f_min2 == self.f_max2

    def check_stable(self, frame_rate: float) -> None:
        limit = frame_rate / (2 * math.pi)
        for name in ('f_max1', 'f_max2', 'f_pre'):
            if getattr(self, name) > limit:
                raise ValueError(
                    f'{name} = {getattr(self, name):g} Hz is unstable at a '
                    f'frame rate of {frame_rate:g} Hz (limit {limit:.4g} Hz)'
                )


@dataclasses.dataclass(frozen=True, eq=False)
class AdaptiveBandStopState:
    config: AdaptiveBandStopConfig
    pre_filter: LowPassState
    branch1: LowPassState
    branch2: LowPassState
    frame_rate: float


def initial_state(
    config: AdaptiveBandStopConfig, frame_rate: float, x_0
) -> AdaptiveBandStopState:
    """A filter that has been fed x_0 forever.

    Starting every low-pass at the first value (|x_0| for the
    pre-smoother) keeps frame 0 free of a start-up transient.
    """

    if config.i_mid is None:
        raise ValueError('i_mid must be resolved before filtering')
    config.check_stable(frame_rate)
    return AdaptiveBandStopState(
        config=config,
        pre_filter=LowPassState(config.f_pre, frame_rate, np.abs(x_0)),
        branch1=LowPassState(config.f_max1, frame_rate, x_0),
        branch2=LowPassState(config.f_min2, frame_rate, x_0),
        frame_rate=frame_rate,
    )


def adaptation_state(y_1t, i_mid: float):
    """Naka-Rushton transform y / (y + I_mid) of a non-negative
    intensity."""

    if np.any(y_1t < 0):
        raise ValueError('adaptation input must be rectified (>= 0)')
    return y_1t / (y_1t + i_mid)


def adaptive_corners(i_nr, config: AdaptiveBandStopConfig):
    if np.any((i_nr < 0) | (i_nr > 1)):
        raise ValueError('adaptation state must lie in [0, 1]')
    f_m1 = config.f_max1 - (config.f_max1 - config.f_min1) * i_nr
    f_m2 = (config.f_max2 - config.f_min2) * i_nr + config.f_min2
    # Rounding must not push a corner out of its range.
    f_m1 = np.clip(f_m1, config.f_min1, config.f_max1)
    f_m2 = np.clip(f_m2, config.f_min2, config.f_max2)
    return f_m1, f_m2


def adaptive_bsf_step(
    state: AdaptiveBandStopState, x_t
) -> Tuple[AdaptiveBandStopState, Any]:
    config = state.config
    pre_filter, y_1t = lpf_step(state.pre_filter, np.abs(x_t))
    i_nr = adaptation_state(y_1t, config.i_mid)
    f_m1, f_m2 = adaptive_corners(i_nr, config)
    (branch1, branch2), y_t = bsf_step(
        dataclasses.replace(state.branch1, corner_frequency=f_m1),
        dataclasses.replace(state.branch2, corner_frequency=f_m2),
        x_t,
    )
    state = dataclasses.replace(
        state, pre_filter=pre_filter, branch1=branch1, branch2=branch2
    )
    return state, y_t


def filter_track(
    track, config: AdaptiveBandStopConfig, frame_rate: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run one track through a fresh filter, one scalar at a time.

    Returns the output and the (f_m1, f_m2) corner trajectory.
    """

    track = [float(x) for x in track]
    state = initial_state(config, frame_rate, track[0])
    out, f_m1, f_m2 = [], [], []
    for x in track:
        state, y = adaptive_bsf_step(state, x)
        out.append(y)
        f_m1.append(state.branch1.corner_frequency)
        f_m2.append(state.branch2.corner_frequency)
    return np.array(out), np.array(f_m1), np.array(f_m2)


class CornerTrace:
    """Collects the corner trajectory of every in-band track."""

    def __init__(self):
        self.bins: Optional[np.ndarray] = None
        self._f_m1: List[np.ndarray] = []
        self._f_m2: List[np.ndarray] = []

    def record(self, f_m1, f_m2) -> None:
        self._f_m1.append(np.array(f_m1, dtype=np.float64))
        self._f_m2.append(np.array(f_m2, dtype=np.float64))

    @property
    def num_frames(self) -> int:
        return len(self._f_m1)

    def rows(self):
        """Yield (frame, bin, f_m1, f_m2) in frame-major order."""
        for t, (f1, f2) in enumerate(zip(self._f_m1, self._f_m2)):
            for b, c1, c2 in zip(self.bins, f1, f2):
                yield t, int(b), float(c1), float(c2)


def resolve_i_mid(
    config: AdaptiveBandStopConfig, tracks: np.ndarray
) -> AdaptiveBandStopConfig:
    if config.i_mid is not None:
        return config
    i_mid = float(np.median(np.abs(tracks))) if tracks.size else 0.0
    if i_mid <= 0:
        log.warning(
            'in-band cepstrum is all zero; using I_mid = %g', I_MID_FALLBACK
        )
        i_mid = I_MID_FALLBACK
    log.debug('auto I_mid = %g', i_mid)
    return dataclasses.replace(config, i_mid=i_mid)


def filter_quefrency_band(
    ceps: Cepstrogram,
    band: QuefrencyBand,
    config: AdaptiveBandStopConfig,
    trace: Optional[CornerTrace] = None,
) -> Cepstrogram:
    """Adaptive band-stop filter every in-band quefrency track in time.

    Each bin in [tau_min, tau_max] gets its own filter chain; bins
    outside the band are copied through untouched.
    """

    band.check_within(ceps)
    config.check_stable(ceps.frame_rate)

    bins = ceps.band_bins(band)
    out = ceps.values.copy()
    tracks = ceps.values[bins]
    if trace is not None:
        trace.bins = np.arange(ceps.num_quefrency_bins)[bins]
    if tracks.shape[0] == 0:
        return ceps.with_values(out)

    config = resolve_i_mid(config, tracks)
    state = initial_state(config, ceps.frame_rate, tracks[:, 0])
    for t in range(ceps.num_frames):
        state, y = adaptive_bsf_step(state, tracks[:, t])
        out[bins, t] = y
        if trace is not None:
            trace.record(
                state.branch1.corner_frequency, state.branch2.corner_frequency
            )
    log.debug(
        'filtered %d quefrency bins over %d frames',
        tracks.shape[0],
        ceps.num_frames,
    )
    return ceps.with_values(out)
