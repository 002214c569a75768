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

"""CSV and PNG encodings of grids, corner traces and metric tables.

Every function returns text or bytes; writing them is the caller's job.
"""

import csv
import io
from typing import Iterable, Sequence

from matplotlib import image as mpl_image
from matplotlib.figure import Figure
import numpy as np

from .adaptive_filter import CornerTrace
from .cepstral import Cepstrogram
from .spectral import Spectrogram


# Images show this many decibels below the loudest cell.
DYNAMIC_RANGE_DB = 100.0
PNG_FLOOR = 1e-10

CORNER_COLUMNS = ('frame', 'bin', 'f_m1', 'f_m2')
METRIC_COLUMNS = (
    'source_id',
    'velocity',
    'variant',
    'filtered',
    'snr_db',
    'lsd',
    'is',
    'F',
    'T',
)
SUMMARY_COLUMNS = (
    'velocity',
    'variant',
    'filtered',
    'snr_db',
    'lsd',
    'is',
    'num_sources',
)
REDUCTION_COLUMNS = (
    'velocity',
    'variant',
    'snr_gain_db',
    'lsd_reduction_pct',
    'is_reduction_pct',
)


def table_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(columns)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def read_table(text: str) -> list:
    """The rows of a CSV written by ``table_csv`` as dicts."""
    return list(csv.DictReader(io.StringIO(text)))


def grid_csv(values: np.ndarray) -> str:
    """One row per bin (ascending), one column per frame."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    for row in np.asarray(values, dtype=np.float64):
        w.writerow(row.tolist())
    return buf.getvalue()


def spectrogram_csv(spec: Spectrogram) -> str:
    return grid_csv(spec.magnitude)


def cepstrogram_csv(ceps: Cepstrogram) -> str:
    return grid_csv(ceps.values)


def grid_png(values: np.ndarray, floor: float = PNG_FLOOR) -> bytes:
    """Grayscale PNG of 20*log10(|values|), low bins at the bottom."""

    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError('cannot render an empty grid')
    db = 20 * np.log10(np.maximum(np.abs(values), floor))
    vmax = float(db.max())
    buf = io.BytesIO()
    mpl_image.imsave(
        buf,
        db,
        cmap='gray',
        origin='lower',
        vmin=vmax - DYNAMIC_RANGE_DB,
        vmax=vmax,
        format='png',
    )
    return buf.getvalue()


def spectrogram_png(spec: Spectrogram) -> bytes:
    return grid_png(spec.magnitude)


def cepstrogram_png(ceps: Cepstrogram) -> bytes:
    return grid_png(ceps.values)


def corners_csv(trace: CornerTrace) -> str:
    return table_csv(CORNER_COLUMNS, trace.rows())


def curves_png(summary: Sequence[dict]) -> bytes:
    """SNR, LSD and IS against velocity for each (variant, filtered)
    series of a summary table."""

    fig = Figure(figsize=(12, 3.6))
    axes = fig.subplots(1, 3)
    series = sorted({(r['variant'], r['filtered']) for r in summary})
    for ax, column, label in zip(
        axes, ('snr_db', 'lsd', 'is'), ('SNR (dB)', 'LSD', 'IS')
    ):
        for variant, filtered in series:
            rows = [
                r
                for r in summary
                if r['variant'] == variant and r['filtered'] == filtered
            ]
            ax.plot(
                [float(r['velocity']) for r in rows],
                [float(r[column]) for r in rows],
                marker='o',
                linestyle='-' if int(filtered) else '--',
                label=variant + ("'" if int(filtered) else ''),
            )
        ax.set_xlabel('velocity (m/s)')
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    axes[0].legend()
    fig.tight_layout()
    buf = io.BytesIO()
    fig.savefig(buf, format='png')
    return buf.getvalue()
