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

"""Short-time Fourier analysis and overlap-add resynthesis."""

import dataclasses
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import fft as sp_fft
from scipy import signal as sp_signal

from .signal_io import TimeSignal


WINDOW = 'hann'


@dataclasses.dataclass(frozen=True, eq=False)
class Spectrogram:
    """Magnitude (and optionally phase) indexed [frequency_bin][frame]."""

    magnitude: np.ndarray
    window_size: int
    hop_size: int
    sample_rate: int
    phase: Optional[np.ndarray] = None

    def __post_init__(self):
        magnitude = np.asarray(self.magnitude, dtype=np.float64)
        if magnitude.ndim != 2:
            raise ValueError('magnitude must be a 2-D [bin][frame] grid')
        if magnitude.shape[0] != self.window_size // 2 + 1:
            raise ValueError(
                f'{magnitude.shape[0]} bins do not match a one-sided '
                f'spectrum of window {self.window_size}'
            )
        if np.any(magnitude < 0):
            raise ValueError('magnitudes must be non-negative')
        object.__setattr__(self, 'magnitude', magnitude)
        if self.phase is not None:
            phase = np.asarray(self.phase, dtype=np.float64)
            if phase.shape != magnitude.shape:
                raise ValueError(
                    f'phase shape {phase.shape} does not match '
                    f'magnitude shape {magnitude.shape}'
                )
            object.__setattr__(self, 'phase', phase)

    @property
    def num_bins(self) -> int:
        return self.magnitude.shape[0]

    @property
    def num_frames(self) -> int:
        return self.magnitude.shape[1]

    @property
    def bin_spacing(self) -> float:
        return self.sample_rate / self.window_size

    @property
    def frame_rate(self) -> float:
        return self.sample_rate / self.hop_size

    def with_magnitude(self, magnitude: np.ndarray) -> 'Spectrogram':
        """The same grid with new magnitudes and the original phase."""
        return dataclasses.replace(self, magnitude=magnitude)

    def frames(self, start: int, stop: Optional[int] = None) -> 'Spectrogram':
        sl = slice(start, stop)
        return dataclasses.replace(
            self,
            magnitude=self.magnitude[:, sl],
            phase=None if self.phase is None else self.phase[:, sl],
        )


def analysis_window(window_size: int) -> np.ndarray:
    # Periodic Hann; it overlap-adds to a constant for hop = window/k.
    return sp_signal.get_window(WINDOW, window_size, fftbins=True)


def num_frames(length: int, window_size: int, hop_size: int) -> int:
    if length < window_size:
        return 0
    return (length - window_size) // hop_size + 1


def stft(
    signal: TimeSignal, window_size: int = 1024, hop_size: int = 256
) -> Spectrogram:
    """Hann-windowed one-sided STFT.

    Frame t covers samples [t*hop, t*hop + window); trailing samples that
    do not fill a whole window are dropped.
    """

    if hop_size <= 0 or window_size < hop_size:
        raise ValueError(
            f'need window_size >= hop_size > 0, got {window_size}/{hop_size}'
        )
    if window_size % 2:
        raise ValueError(f'window_size must be even, got {window_size}')
    if len(signal) < window_size:
        raise ValueError(
            f'signal of {len(signal)} samples is shorter than one '
            f'window ({window_size})'
        )

    frames = sliding_window_view(signal.samples, window_size)[::hop_size]
    spectrum = sp_fft.rfft(frames * analysis_window(window_size), axis=1).T
    return Spectrogram(
        magnitude=np.abs(spectrum),
        phase=np.angle(spectrum),
        window_size=window_size,
        hop_size=hop_size,
        sample_rate=signal.sample_rate,
    )


def istft(spec: Spectrogram, length: Optional[int] = None) -> TimeSignal:
    """Weighted overlap-add inverse of ``stft()``.

    The result has (T-1)*hop + window samples, or exactly ``length`` when
    given (zero-padded or truncated), so a filtered recording can keep the
    length of its input.
    """

    if spec.phase is None:
        raise ValueError('istft needs a spectrogram with phase')
    window = analysis_window(spec.window_size)
    if not sp_signal.check_COLA(
        window, spec.window_size, spec.window_size - spec.hop_size
    ):
        raise ValueError(
            f'hop {spec.hop_size} does not satisfy constant overlap-add '
            f'for a {spec.window_size}-sample Hann window'
        )

    spectrum = spec.magnitude * np.exp(1j * spec.phase)
    frames = sp_fft.irfft(spectrum, n=spec.window_size, axis=0).T * window

    n_out = (spec.num_frames - 1) * spec.hop_size + spec.window_size
    out = np.zeros(n_out)
    norm = np.zeros(n_out)
    w2 = window**2
    for t, frame in enumerate(frames):
        start = t * spec.hop_size
        out[start : start + spec.window_size] += frame
        norm[start : start + spec.window_size] += w2
    nonzero = norm > np.finfo(norm.dtype).tiny
    out[nonzero] /= norm[nonzero]

    if length is not None:
        if length > n_out:
            out = np.concatenate([out, np.zeros(length - n_out)])
        out = out[:length]
    return TimeSignal(out, spec.sample_rate)
