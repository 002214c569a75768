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

"""Loading, saving, resampling and synthesizing time-domain audio."""

import dataclasses
import io
import logging
import math
import os
from typing import IO, Union

import numpy as np
from scipy import signal as sp_signal
import soundfile


log = logging.getLogger(__name__)

# Polyphase branches of the resampling filter carry this many taps.
RESAMPLE_TAPS_PER_BRANCH = 64
RESAMPLE_KAISER_BETA = 8.6

_READABLE_SUBTYPES = ('PCM_16', 'FLOAT')


@dataclasses.dataclass(frozen=True, eq=False)
class TimeSignal:
    """Uniformly sampled, real-valued mono audio."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(
                f'sample_rate must be positive, got {self.sample_rate}'
            )
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError('samples must be one-dimensional')
        samples.flags.writeable = False
        object.__setattr__(self, 'samples', samples)

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) / self.sample_rate


def load_wav(path: Union[str, os.PathLike, IO]) -> TimeSignal:
    """Read a 16-bit PCM or 32-bit float WAV file.

    Multi-channel files are reduced to channel 0. Integer samples are
    scaled by 1/32768, so +32767 reads as 32767/32768.
    """

    if isinstance(path, (str, os.PathLike)):
        if not os.path.exists(path):
            raise FileNotFoundError(f'no such file: {os.fspath(path)}')
        with open(path, 'rb') as fp:
            return loads_wav(fp.read())
    return loads_wav(path.read())


def loads_wav(data: bytes) -> TimeSignal:
    """Decode WAV bytes. See ``load_wav()``."""

    try:
        with soundfile.SoundFile(io.BytesIO(data)) as f:
            if f.format not in ('WAV', 'WAVEX'):
                raise ValueError(f'not a WAV file (format {f.format})')
            if f.subtype not in _READABLE_SUBTYPES:
                raise ValueError(
                    f'unsupported WAV sample format {f.subtype}; '
                    'expected PCM_16 or FLOAT'
                )
            samples = f.read(dtype='float64', always_2d=True)
            sample_rate = f.samplerate
    except RuntimeError as e:
        # libsndfile reports malformed headers as a RuntimeError subclass.
        raise ValueError(f'malformed WAV data: {e}') from None

    if samples.shape[0] == 0:
        raise ValueError('WAV file contains no audio')
    if samples.shape[1] > 1:
        log.debug('keeping channel 0 of %d', samples.shape[1])
    return TimeSignal(samples[:, 0].copy(), sample_rate)


def save_wav(signal: TimeSignal, path: Union[str, os.PathLike, IO]) -> None:
    """Write ``signal`` as a 32-bit float mono WAV file.

    Amplitudes are clipped to [-1, 1] first.
    """

    data = dumps_wav(signal)
    if isinstance(path, (str, os.PathLike)):
        with open(path, 'wb') as fp:
            fp.write(data)
    else:
        path.write(data)


def dumps_wav(signal: TimeSignal) -> bytes:
    """Encode ``signal`` as 32-bit float mono WAV bytes."""

    if len(signal) == 0:
        raise ValueError('cannot save an empty signal')
    clipped = np.clip(signal.samples, -1.0, 1.0).astype(np.float32)
    buf = io.BytesIO()
    soundfile.write(
        buf, clipped, signal.sample_rate, format='WAV', subtype='FLOAT'
    )
    return buf.getvalue()


def resample(signal: TimeSignal, target_rate: int) -> TimeSignal:
    """Band-limited (Kaiser-windowed sinc) polyphase resampling.

    The output has round(len * target_rate / sample_rate) samples.
    """

    if target_rate <= 0:
        raise ValueError(f'target_rate must be positive, got {target_rate}')
    if int(target_rate) != target_rate:
        raise ValueError(
            f'target_rate must be a whole number of Hz, got {target_rate}'
        )
    target_rate = int(target_rate)
    if target_rate == signal.sample_rate:
        return signal

    g = math.gcd(target_rate, signal.sample_rate)
    up = target_rate // g
    down = signal.sample_rate // g
    max_rate = max(up, down)
    taps = sp_signal.firwin(
        RESAMPLE_TAPS_PER_BRANCH * max_rate + 1,
        1.0 / max_rate,
        window=('kaiser', RESAMPLE_KAISER_BETA),
    )
    out = sp_signal.resample_poly(signal.samples, up, down, window=taps)

    length = round(len(signal) * target_rate / signal.sample_rate)
    if len(out) < length:
        out = np.concatenate([out, np.zeros(length - len(out))])
    log.debug(
        'resampled %d Hz -> %d Hz (%d/%d)',
        signal.sample_rate,
        target_rate,
        up,
        down,
    )
    return TimeSignal(out[:length], target_rate)


def generate_broadband(
    duration: float, sample_rate: int, seed: int
) -> TimeSignal:
    """Seeded Gaussian white noise with unit target variance."""

    if duration <= 0:
        raise ValueError(f'duration must be positive, got {duration}')
    n = int(round(duration * sample_rate))
    rng = np.random.default_rng(seed)
    return TimeSignal(rng.standard_normal(n), sample_rate)
