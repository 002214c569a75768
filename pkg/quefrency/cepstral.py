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

"""Cepstrograms: per-frame real cepstra of a spectrogram, and back.

Log-magnitude spectra are real and even, so the inverse DFT of a
one-sided spectrum of F bins reduces to a type-I DCT over the same F
points; `scipy.fft.dct(type=1)` scaled by 1/(2(F-1)) is the real cepstrum
and `idct(type=1)` undoes it exactly.
"""

import dataclasses
import math

import numpy as np
from scipy import fft as sp_fft

from .motion_sim import MotionScenario
from .spectral import Spectrogram


DEFAULT_LOG_FLOOR = 1e-10
DEFAULT_TAU_MIN_BINS = 2

# Band edges that land within this many bins of a bin centre snap to it.
_BIN_TOLERANCE = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class Cepstrogram:
    """Real cepstral values indexed [quefrency_bin][frame].

    Quefrency bin q corresponds to a delay of q * quefrency_step seconds,
    with quefrency_step = 1 / sample_rate.
    """

    values: np.ndarray
    window_size: int
    hop_size: int
    sample_rate: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError('values must be a 2-D [quefrency][frame] grid')
        object.__setattr__(self, 'values', values)

    @property
    def num_quefrency_bins(self) -> int:
        return self.values.shape[0]

    @property
    def num_frames(self) -> int:
        return self.values.shape[1]

    @property
    def quefrency_step(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def frame_rate(self) -> float:
        return self.sample_rate / self.hop_size

    @property
    def max_quefrency(self) -> float:
        return (self.num_quefrency_bins - 1) * self.quefrency_step

    def band_bins(self, band: 'QuefrencyBand') -> slice:
        """The bins q with tau_min <= q * quefrency_step <= tau_max."""
        lo = math.ceil(band.tau_min / self.quefrency_step - _BIN_TOLERANCE)
        hi = math.floor(band.tau_max / self.quefrency_step + _BIN_TOLERANCE)
        lo = max(lo, 0)
        hi = min(hi, self.num_quefrency_bins - 1)
        if hi < lo:
            return slice(lo, lo)
        return slice(lo, hi + 1)

    def with_values(self, values: np.ndarray) -> 'Cepstrogram':
        return dataclasses.replace(self, values=values)


@dataclasses.dataclass(frozen=True)
class QuefrencyBand:
    """The quefrency range [tau_min, tau_max] (seconds) to be filtered."""

    tau_min: float
    tau_max: float

    def __post_init__(self):
        if not 0 < self.tau_min < self.tau_max:
            raise ValueError(
                'quefrency band needs 0 < tau_min < tau_max, got '
                f'[{self.tau_min}, {self.tau_max}]'
            )

    def check_within(self, ceps: Cepstrogram) -> None:
        if self.tau_max > ceps.max_quefrency * (1 + _BIN_TOLERANCE):
            raise ValueError(
                f'tau_max {self.tau_max:g} s is beyond the largest '
                f'quefrency {ceps.max_quefrency:g} s of the cepstrogram'
            )


def cepstrogram_forward(
    spec: Spectrogram, log_floor: float = DEFAULT_LOG_FLOOR
) -> Cepstrogram:
    """q(tau) = IDFT[log max(|X(f)|, log_floor)], frame by frame."""

    if log_floor <= 0:
        raise ValueError(f'log_floor must be positive, got {log_floor}')
    if spec.num_frames == 0 or spec.num_bins < 2:
        raise ValueError('cannot take the cepstrum of an empty spectrogram')

    log_mag = np.log(np.maximum(spec.magnitude, log_floor))
    n = 2 * (spec.num_bins - 1)
    values = sp_fft.dct(log_mag, type=1, axis=0) / n
    return Cepstrogram(
        values=values,
        window_size=spec.window_size,
        hop_size=spec.hop_size,
        sample_rate=spec.sample_rate,
    )


def cepstrogram_inverse(ceps: Cepstrogram) -> Spectrogram:
    """|X(f)| = exp(DFT[q(tau)]), frame by frame; the result has no
    phase."""

    if not np.all(np.isfinite(ceps.values)):
        raise ValueError('cepstrogram contains non-finite values')

    n = 2 * (ceps.num_quefrency_bins - 1)
    log_mag = sp_fft.idct(ceps.values * n, type=1, axis=0)
    return Spectrogram(
        magnitude=np.exp(log_mag),
        window_size=ceps.window_size,
        hop_size=ceps.hop_size,
        sample_rate=ceps.sample_rate,
    )


def default_band(
    scenario: MotionScenario, ceps: Cepstrogram
) -> QuefrencyBand:
    """The band a source moving past the receiver can produce.

    The path difference peaks at the closest point of approach, where it
    is 2 * min(z_s, z_r) / c; tau_min excludes the first two quefrency
    bins, which belong to the source rather than the channel.
    """

    z_s, z_r, c = scenario.z_s, scenario.z_r, scenario.c
    if z_s <= 0 or z_r <= 0 or c <= 0:
        raise ValueError('scenario geometry must be positive')

    tau_max = ((z_s + z_r) - abs(z_s - z_r)) / c
    tau_max = min(tau_max, ceps.max_quefrency)
    tau_min = min(DEFAULT_TAU_MIN_BINS * ceps.quefrency_step, tau_max / 2)
    return QuefrencyBand(tau_min, tau_max)
