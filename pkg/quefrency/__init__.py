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

"""Cepstral filtering of Lloyd's mirror interference in spectrograms."""

from .adaptive_filter import (
    AdaptiveBandStopConfig,
    CornerTrace,
    LowPassState,
    adaptive_bsf_step,
    bsf_response,
    bsf_step,
    filter_quefrency_band,
    filter_track,
    hpf_step,
    lpf_step,
)
from .cepstral import (
    Cepstrogram,
    QuefrencyBand,
    cepstrogram_forward,
    cepstrogram_inverse,
    default_band,
)
from .config import ConfigError
from .eval_metrics import (
    MetricReport,
    evaluate,
    itakura_saito,
    lsd,
    scoring_grid,
    snr,
)
from .motion_sim import (
    MotionScenario,
    SimulatedTriple,
    apply_time_varying_delay,
    direct_delay,
    reflected_delay,
    synthesize_triple,
    velocity_sweep,
)
from .pipeline import PipelineConfig, filter_audio, filter_spectrogram
from .signal_io import (
    TimeSignal,
    dumps_wav,
    generate_broadband,
    load_wav,
    loads_wav,
    resample,
    save_wav,
)
from .spectral import Spectrogram, istft, stft
from .version import __version__, VERSION


__all__ = [
    '__version__',
    'VERSION',
    'AdaptiveBandStopConfig',
    'Cepstrogram',
    'ConfigError',
    'CornerTrace',
    'LowPassState',
    'MetricReport',
    'MotionScenario',
    'PipelineConfig',
    'QuefrencyBand',
    'SimulatedTriple',
    'Spectrogram',
    'TimeSignal',
    'adaptive_bsf_step',
    'apply_time_varying_delay',
    'bsf_response',
    'bsf_step',
    'cepstrogram_forward',
    'cepstrogram_inverse',
    'default_band',
    'direct_delay',
    'dumps_wav',
    'evaluate',
    'filter_audio',
    'filter_quefrency_band',
    'filter_spectrogram',
    'filter_track',
    'generate_broadband',
    'hpf_step',
    'istft',
    'itakura_saito',
    'load_wav',
    'loads_wav',
    'lpf_step',
    'lsd',
    'reflected_delay',
    'resample',
    'save_wav',
    'scoring_grid',
    'snr',
    'stft',
    'synthesize_triple',
    'velocity_sweep',
]
