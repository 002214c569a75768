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

"""Reading and writing the flat `key = value` run configuration.

The format is small:

    # comments run to the end of the line
    window = 1024
    hop = 256          # trailing comments are fine too
    i_mid = auto-median

`loads()` returns the raw strings in file order; the `*_config()`
builders below turn them into the typed objects the library consumes.
"""

import dataclasses
import logging
import re
from typing import IO, Any, Dict, List, Mapping, Optional, Tuple

from . import adaptive_filter
from . import cepstral
from . import eval_metrics
from . import motion_sim
from . import pipeline


log = logging.getLogger(__name__)

_KEY_RE = re.compile(r'^[a-z_][a-z0-9_]*$')

AUTO_MEDIAN = 'auto-median'
CENTERED = 'centered'

DEFAULT_SAMPLE_RATE = 32000
DEFAULT_DURATION = 10.0
DEFAULT_SOURCES = 'noise:0'

PIPELINE_KEYS = (
    'window',
    'hop',
    'log_floor',
    'tau_min',
    'tau_max',
    'f_pre',
    'i_mid',
    'f_min1',
    'f_max1',
    'f_min2',
    'f_max2',
    'filter_mode',
    'f_c1',
    'f_c2',
    'reconstruct_audio',
)
SCENARIO_KEYS = (
    'r0',
    'v_s',
    'z_s',
    'z_r',
    'c',
    'reflection_coefficient',
)
EXPERIMENT_KEYS = (
    'sources',
    'duration',
    'sample_rate',
    'velocities',
    'metric_floor',
    'lsd_form',
    'trim_arrival',
    'score_real_bins',
)
KNOWN_KEYS = frozenset(PIPELINE_KEYS + SCENARIO_KEYS + EXPERIMENT_KEYS)


class ConfigError(ValueError):
    """A configuration file or command line that cannot be used as given."""


def load(
    fp: IO,
    *,
    source: Optional[str] = None,
    allow_duplicate_keys: bool = False,
) -> Dict[str, str]:
    """Read a configuration from ``fp`` (a ``.read()``-supporting file-like
    object). See ``loads()``."""

    if source is None:
        source = getattr(fp, 'name', '<stream>')
    return loads(
        fp.read(), source=source, allow_duplicate_keys=allow_duplicate_keys
    )


def loads(
    s: str,
    *,
    source: str = '<string>',
    allow_duplicate_keys: bool = False,
) -> Dict[str, str]:
    """Parse ``s`` into an insertion-ordered dict of raw string values.

    Unless ``allow_duplicate_keys`` is true, a key given twice is an
    error rather than a silent override. Keys that no builder knows are
    kept but logged, since they are usually typos.
    """

    if isinstance(s, bytes):
        s = s.decode('utf-8')

    cfg: Dict[str, str] = {}
    for lineno, raw in enumerate(s.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        key = key.strip()
        value = value.strip()
        if not sep:
            raise ConfigError(f'{source}:{lineno} expected "key = value"')
        if not _KEY_RE.match(key):
            raise ConfigError(f'{source}:{lineno} bad key "{key}"')
        if not value:
            raise ConfigError(f'{source}:{lineno} no value for "{key}"')
        if key in cfg and not allow_duplicate_keys:
            raise ConfigError(
                f'{source}:{lineno} duplicate key "{key}" found'
            )
        if key not in KNOWN_KEYS:
            log.warning('%s:%d unknown config key "%s"', source, lineno, key)
        cfg[key] = value
    return cfg


def dump(obj: Mapping[str, Any], fp: IO) -> None:
    """Serialize ``obj`` to ``fp`` in the format ``load()`` reads."""
    fp.write(dumps(obj))


def dumps(obj: Mapping[str, Any]) -> str:
    """Serialize a flat mapping, one ``key = value`` line per entry.

    Floats use ``repr`` so values read back bit-identically; sequences
    are comma-joined the way ``velocities`` and ``sources`` are written.
    """

    lines = []
    for key, value in obj.items():
        if not isinstance(key, str) or not _KEY_RE.match(key):
            raise TypeError(f'invalid key {key!r}')
        s = _format_value(value)
        if '\n' in s or '#' in s:
            raise ValueError(f'value for "{key}" cannot be written: {s!r}')
        lines.append(f'{key} = {s}\n')
    return ''.join(lines)


def _format_value(value: Any) -> str:
    if value is True:
        return 'true'
    if value is False:
        return 'false'
    if isinstance(value, float):
        return float.__repr__(value)
    if isinstance(value, (list, tuple)):
        return ', '.join(_format_value(v) for v in value)
    return str(value)


def _get_float(cfg: Mapping[str, str], key: str, default=None):
    if key not in cfg:
        return default
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError(
            f'bad value for "{key}": {cfg[key]!r} is not a number'
        ) from None


def _get_int(cfg: Mapping[str, str], key: str, default=None):
    if key not in cfg:
        return default
    try:
        return int(cfg[key])
    except ValueError:
        raise ConfigError(
            f'bad value for "{key}": {cfg[key]!r} is not an integer'
        ) from None


def _get_bool(cfg: Mapping[str, str], key: str, default: bool) -> bool:
    if key not in cfg:
        return default
    v = cfg[key].lower()
    if v in ('true', 'yes', 'on', '1'):
        return True
    if v in ('false', 'no', 'off', '0'):
        return False
    raise ConfigError(f'bad value for "{key}": {cfg[key]!r} is not a flag')


def _get_choice(cfg, key, choices, default):
    v = cfg.get(key, default)
    if v not in choices:
        raise ConfigError(
            f'bad value for "{key}": {v!r} is not one of '
            + ', '.join(choices)
        )
    return v


def has_geometry(cfg: Mapping[str, str]) -> bool:
    return 'z_s' in cfg or 'z_r' in cfg


def scenario_config(cfg: Mapping[str, str]) -> motion_sim.MotionScenario:
    """Build the base MotionScenario; `r0 = centered` (the default) is
    stored as 0 and resolved per velocity by the experiment."""

    r0 = cfg.get('r0', CENTERED)
    try:
        return motion_sim.MotionScenario(
            r0=0.0 if r0 == CENTERED else _get_float(cfg, 'r0'),
            v_s=_get_float(cfg, 'v_s', 0.0),
            z_s=_get_float(cfg, 'z_s', motion_sim.DEFAULT_Z_S),
            z_r=_get_float(cfg, 'z_r', motion_sim.DEFAULT_Z_R),
            c=_get_float(cfg, 'c', motion_sim.DEFAULT_SOUND_SPEED),
            reflection_coefficient=_get_float(
                cfg,
                'reflection_coefficient',
                motion_sim.DEFAULT_REFLECTION_COEFFICIENT,
            ),
        )
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e)) from None


def filter_config(
    cfg: Mapping[str, str],
) -> adaptive_filter.AdaptiveBandStopConfig:
    defaults = adaptive_filter.AdaptiveBandStopConfig()
    i_mid_str = cfg.get('i_mid', AUTO_MEDIAN)
    i_mid = None if i_mid_str == AUTO_MEDIAN else _get_float(cfg, 'i_mid')
    f_pre = _get_float(cfg, 'f_pre', defaults.f_pre)
    mode = _get_choice(cfg, 'filter_mode', ('adaptive', 'fixed'), 'adaptive')
    try:
        if mode == 'fixed':
            f_max1 = _get_float(cfg, 'f_max1', defaults.f_max1)
            f_min2 = _get_float(cfg, 'f_min2', defaults.f_min2)
            return adaptive_filter.AdaptiveBandStopConfig.fixed(
                _get_float(cfg, 'f_c1', f_max1),
                _get_float(cfg, 'f_c2', f_min2),
                f_pre=f_pre,
                i_mid=i_mid,
            )
        return adaptive_filter.AdaptiveBandStopConfig(
            f_min1=_get_float(cfg, 'f_min1', defaults.f_min1),
            f_max1=_get_float(cfg, 'f_max1', defaults.f_max1),
            f_min2=_get_float(cfg, 'f_min2', defaults.f_min2),
            f_max2=_get_float(cfg, 'f_max2', defaults.f_max2),
            i_mid=i_mid,
            f_pre=f_pre,
        )
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e)) from None


def pipeline_config(
    cfg: Mapping[str, str],
    scenario: Optional[motion_sim.MotionScenario] = None,
    sample_rate: Optional[int] = None,
) -> pipeline.PipelineConfig:
    """Build a PipelineConfig.

    The quefrency band is explicit when `tau_max` is present; otherwise
    it is derived from ``scenario``. With neither, `tau_max` is reported
    as missing: there is no default that covers the whole axis. When
    ``sample_rate`` is known the band and the filter are checked
    against it as well (see ``check_pipeline()``).
    """

    tau_max = _get_float(cfg, 'tau_max')
    tau_min = _get_float(cfg, 'tau_min')
    if tau_max is None and scenario is None:
        raise ConfigError('missing config key "tau_max"')
    try:
        p = pipeline.PipelineConfig(
            window_size=_get_int(cfg, 'window', pipeline.DEFAULT_WINDOW),
            hop_size=_get_int(cfg, 'hop', pipeline.DEFAULT_HOP),
            log_floor=_get_float(cfg, 'log_floor', cepstral.DEFAULT_LOG_FLOOR),
            tau_min=tau_min,
            tau_max=tau_max,
            scenario=scenario,
            filter=filter_config(cfg),
            reconstruct_audio=_get_bool(cfg, 'reconstruct_audio', True),
        )
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e)) from None
    if sample_rate is not None:
        check_pipeline(p, sample_rate)
    return p


def check_pipeline(p: pipeline.PipelineConfig, sample_rate: int) -> None:
    """Reject a band or filter that cannot run on audio at
    ``sample_rate``: an inverted band, a tau_max beyond the
    quefrency axis, or a corner above frame_rate / (2 pi)."""

    try:
        p.check(sample_rate)
    except ValueError as e:
        raise ConfigError(f'{e} (sample rate {sample_rate} Hz)') from None


def _split_list(value: str) -> List[str]:
    return [v.strip() for v in value.split(',') if v.strip()]


def parse_source(desc: str) -> Tuple[str, str]:
    """Split a source descriptor into (kind, argument).

    `noise:<seed>` names a seeded broadband generator; anything else is
    a WAV path.
    """

    if desc.startswith('noise:'):
        seed = desc[len('noise:') :]
        try:
            int(seed)
        except ValueError:
            raise ConfigError(
                f'bad value for "sources": {desc!r} has a non-integer seed'
            ) from None
        return 'noise', seed
    return 'wav', desc


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """Everything a simulate/evaluate/sweep-all run needs."""

    sources: List[str]
    scenario: motion_sim.MotionScenario
    centered: bool
    velocities: List[float]
    pipeline: pipeline.PipelineConfig
    duration: float
    sample_rate: int
    metric_floor: float
    lsd_form: str
    trim_arrival: bool
    score_real_bins: bool = False

    def settings(self) -> Dict[str, Any]:
        """The effective configuration, defaults included, in the form
        ``dumps()`` writes and ``experiment_config()`` reads back."""

        s = self.scenario
        p = self.pipeline
        f = p.filter
        d: Dict[str, Any] = {
            'sources': self.sources,
            'duration': self.duration,
            'sample_rate': self.sample_rate,
            'velocities': self.velocities,
            'r0': CENTERED if self.centered else s.r0,
            'z_s': s.z_s,
            'z_r': s.z_r,
            'c': s.c,
            'reflection_coefficient': s.reflection_coefficient,
            'window': p.window_size,
            'hop': p.hop_size,
            'log_floor': p.log_floor,
        }
        if p.tau_min is not None:
            d['tau_min'] = p.tau_min
        if p.tau_max is not None:
            d['tau_max'] = p.tau_max
        if f.is_fixed:
            d['filter_mode'] = 'fixed'
            d['f_c1'] = f.f_max1
            d['f_c2'] = f.f_min2
        else:
            d['filter_mode'] = 'adaptive'
            d['f_min1'] = f.f_min1
            d['f_max1'] = f.f_max1
            d['f_min2'] = f.f_min2
            d['f_max2'] = f.f_max2
        d['f_pre'] = f.f_pre
        d['i_mid'] = AUTO_MEDIAN if f.i_mid is None else f.i_mid
        d['reconstruct_audio'] = p.reconstruct_audio
        d['metric_floor'] = self.metric_floor
        d['lsd_form'] = self.lsd_form
        d['trim_arrival'] = self.trim_arrival
        d['score_real_bins'] = self.score_real_bins
        return d


def experiment_config(cfg: Mapping[str, str]) -> ExperimentConfig:
    sources = _split_list(cfg.get('sources', DEFAULT_SOURCES))
    if not sources:
        raise ConfigError('bad value for "sources": no sources given')
    for s in sources:
        parse_source(s)

    if 'velocities' in cfg:
        try:
            velocities = [float(v) for v in _split_list(cfg['velocities'])]
        except ValueError:
            raise ConfigError(
                f'bad value for "velocities": {cfg["velocities"]!r}'
            ) from None
    else:
        velocities = list(motion_sim.DEFAULT_VELOCITIES)
    if not velocities or any(v <= 0 for v in velocities):
        raise ConfigError(
            'bad value for "velocities": need one or more positive speeds'
        )

    duration = _get_float(cfg, 'duration', DEFAULT_DURATION)
    if duration <= 0:
        raise ConfigError('bad value for "duration": must be positive')
    sample_rate = _get_int(cfg, 'sample_rate', DEFAULT_SAMPLE_RATE)
    if sample_rate <= 0:
        raise ConfigError('bad value for "sample_rate": must be positive')
    metric_floor = _get_float(cfg, 'metric_floor', eval_metrics.DEFAULT_FLOOR)
    if metric_floor <= 0:
        raise ConfigError('bad value for "metric_floor": must be positive')

    scenario = scenario_config(cfg)
    return ExperimentConfig(
        sources=sources,
        scenario=scenario,
        centered=cfg.get('r0', CENTERED) == CENTERED,
        velocities=velocities,
        pipeline=pipeline_config(cfg, scenario, sample_rate),
        duration=duration,
        sample_rate=sample_rate,
        metric_floor=metric_floor,
        lsd_form=_get_choice(
            cfg, 'lsd_form', eval_metrics.LSD_FORMS, 'printed'
        ),
        trim_arrival=_get_bool(cfg, 'trim_arrival', True),
        score_real_bins=_get_bool(cfg, 'score_real_bins', False),
    )
