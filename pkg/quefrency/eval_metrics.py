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

"""Distances between a reference spectrogram R and a test spectrogram N.

SNR is in decibels (base-10 log); LSD and Itakura-Saito use natural
logs. Both grids are floored away from zero before any log or ratio.
"""

import dataclasses
import math

import numpy as np

from .spectral import Spectrogram


DEFAULT_FLOOR = 1e-10
LSD_FORMS = ('printed', 'conventional')


@dataclasses.dataclass(frozen=True)
class MetricReport:
    snr_db: float
    lsd: float
    is_distance: float
    num_bins: int
    num_frames: int


def _grids(reference, test):
    r = getattr(reference, 'magnitude', reference)
    n = getattr(test, 'magnitude', test)
    r = np.asarray(r, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    if r.shape != n.shape:
        raise ValueError(
            f'spectrogram shapes differ: {r.shape} vs {n.shape}'
        )
    return r, n


def scoring_grid(
    spec: Spectrogram, first_frame: int = 0, real_bins: bool = False
) -> np.ndarray:
    """The magnitudes a recording is scored on.

    Frames before ``first_frame`` are dropped, and so are the DC and
    Nyquist rows unless ``real_bins`` is set. Those two bins are real
    valued, so their magnitude crosses zero with non-vanishing density
    and one such cell can outweigh every other term of an IS sum.
    """

    magnitude = spec.magnitude[:, first_frame:]
    if real_bins:
        return magnitude
    return magnitude[1:-1]


def snr(reference: Spectrogram, test: Spectrogram) -> float:
    """10 log10(sum R^2 / sum (N - R)^2); +inf when N equals R."""

    r, n = _grids(reference, test)
    signal_energy = np.sum(r**2)
    if signal_energy == 0:
        raise ValueError('reference spectrogram is identically zero')
    noise_energy = np.sum((n - r) ** 2)
    if noise_energy == 0:
        return math.inf
    return float(10 * np.log10(signal_energy / noise_energy))


def lsd(
    reference: Spectrogram,
    test: Spectrogram,
    log_floor: float = DEFAULT_FLOOR,
    form: str = 'printed',
) -> float:
    """Log-spectral distance.

    The 'printed' form divides the root-sum-square by F*T outside the
    root; 'conventional' is the per-cell RMS, sqrt(mean(d^2)).
    """

    if form not in LSD_FORMS:
        raise ValueError(f'unknown LSD form {form!r}')
    r, n = _grids(reference, test)
    d = np.log(np.maximum(n, log_floor)) - np.log(np.maximum(r, log_floor))
    if form == 'conventional':
        return float(np.sqrt(np.mean(d**2)))
    return float(np.sqrt(np.sum(d**2)) / d.size)


def itakura_saito(
    reference: Spectrogram, test: Spectrogram, floor: float = DEFAULT_FLOOR
) -> float:
    """sum of R^2/N^2 - log(R^2/N^2) - 1 over every cell."""

    r, n = _grids(reference, test)
    ratio = (np.maximum(r, floor) / np.maximum(n, floor)) ** 2
    return float(np.sum(ratio - np.log(ratio) - 1))


def evaluate(
    reference: Spectrogram,
    test: Spectrogram,
    floor: float = DEFAULT_FLOOR,
    lsd_form: str = 'printed',
) -> MetricReport:
    r, _ = _grids(reference, test)
    return MetricReport(
        snr_db=snr(reference, test),
        lsd=lsd(reference, test, floor, lsd_form),
        is_distance=itakura_saito(reference, test, floor),
        num_bins=r.shape[0],
        num_frames=r.shape[1],
    )
