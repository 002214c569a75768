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

"""Spectrogram in, spectrogram (and audio) out.

The chain is STFT -> cepstrogram -> temporal band-stop filtering of the
in-band quefrency tracks -> inverse cepstrogram -> overlap-add with the
input phase.
"""

import dataclasses
import logging
from typing import Optional, Tuple

import numpy as np

from .adaptive_filter import (
    AdaptiveBandStopConfig,
    CornerTrace,
    filter_quefrency_band,
)
from .cepstral import (
    DEFAULT_LOG_FLOOR,
    DEFAULT_TAU_MIN_BINS,
    Cepstrogram,
    QuefrencyBand,
    cepstrogram_forward,
    cepstrogram_inverse,
    default_band,
)
from .motion_sim import MotionScenario
from .signal_io import TimeSignal
from .spectral import Spectrogram, istft, stft


log = logging.getLogger(__name__)

DEFAULT_WINDOW = 1024
DEFAULT_HOP = 256

# Reconstructed cells this close (relative) to the log floor become 0.
FLOOR_TOLERANCE = 1e-6


@dataclasses.dataclass(frozen=True)
class PipelineConfig:
    """Parameters of one filtering run.

    The quefrency band is ``[tau_min, tau_max]`` when ``tau_max`` is
    given, and otherwise derived from ``scenario``; an explicit
    ``tau_min`` overrides the derived lower edge.
    """

    window_size: int = DEFAULT_WINDOW
    hop_size: int = DEFAULT_HOP
    log_floor: float = DEFAULT_LOG_FLOOR
    tau_min: Optional[float] = None
    tau_max: Optional[float] = None
    scenario: Optional[MotionScenario] = None
    filter: AdaptiveBandStopConfig = dataclasses.field(
        default_factory=AdaptiveBandStopConfig
    )
    reconstruct_audio: bool = True

    def __post_init__(self):
        if self.hop_size <= 0 or self.window_size < self.hop_size:
            raise ValueError(
                'need window >= hop > 0, got '
                f'{self.window_size}/{self.hop_size}'
            )
        if self.window_size % 2:
            raise ValueError(f'window must be even, got {self.window_size}')
        if not self.log_floor > 0:
            raise ValueError(
                f'log_floor must be positive, got {self.log_floor}'
            )
        if self.tau_max is None and self.scenario is None:
            raise ValueError(
                'the quefrency band needs tau_max or a scenario to derive '
                'it from'
            )

    def quefrency_band(self, ceps: Cepstrogram) -> QuefrencyBand:
        if self.tau_max is None:
            band = default_band(self.scenario, ceps)
            if self.tau_min is None:
                return band
            return QuefrencyBand(self.tau_min, band.tau_max)
        tau_min = self.tau_min
        if tau_min is None:
            tau_min = min(
                DEFAULT_TAU_MIN_BINS * ceps.quefrency_step, self.tau_max / 2
            )
        return QuefrencyBand(tau_min, self.tau_max)

    def check(self, sample_rate: int) -> QuefrencyBand:
        """Raise ValueError unless the band and the filter can be used on
        audio at ``sample_rate``; returns the band."""

        empty = Cepstrogram(
            values=np.zeros((self.window_size // 2 + 1, 0)),
            window_size=self.window_size,
            hop_size=self.hop_size,
            sample_rate=sample_rate,
        )
        band = self.quefrency_band(empty)
        band.check_within(empty)
        self.filter.check_stable(empty.frame_rate)
        return band


def filter_spectrogram(
    spec: Spectrogram,
    cfg: PipelineConfig,
    trace: Optional[CornerTrace] = None,
) -> Spectrogram:
    """Remove the time-varying in-band cepstral content of ``spec``.

    The result has the shape of ``spec`` and carries its phase, if any.
    Cells that come back at the log floor are set to exactly zero.
    """

    ceps = cepstrogram_forward(spec, cfg.log_floor)
    band = cfg.quefrency_band(ceps)
    log.info(
        'filtering quefrencies %.4g..%.4g s at %.4g frames/s',
        band.tau_min,
        band.tau_max,
        ceps.frame_rate,
    )
    filtered = filter_quefrency_band(ceps, band, cfg.filter, trace)
    magnitude = cepstrogram_inverse(filtered).magnitude
    floored = np.abs(magnitude - cfg.log_floor) <= (
        FLOOR_TOLERANCE * cfg.log_floor
    )
    magnitude[floored] = 0.0
    return spec.with_magnitude(magnitude)


def filter_audio(
    signal: TimeSignal,
    cfg: PipelineConfig,
    trace: Optional[CornerTrace] = None,
) -> Tuple[Optional[TimeSignal], Spectrogram, Spectrogram]:
    """Filter ``signal`` and resynthesize it with its own phase.

    Returns (audio, spectrogram before, spectrogram after); audio is None
    when ``cfg.reconstruct_audio`` is false. The audio has the length of
    ``signal``.
    """

    before = stft(signal, cfg.window_size, cfg.hop_size)
    after = filter_spectrogram(before, cfg, trace)
    if not cfg.reconstruct_audio:
        return None, before, after
    return istft(after, length=len(signal)), before, after
