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

"""Simulate, filter and score multipath-corrupted recordings.

Usage:

    $ quefrency simulate --config run.cfg --out sim/
    $ quefrency evaluate --manifest sim/manifest.csv --config run.cfg \
          --out sim/metrics.csv
    $ quefrency filter --in boat.wav --config run.cfg --out boat_clean.wav
    $ quefrency sweep-all --config run.cfg --out sweep/

The worker pool size comes from $QUEFRENCY_WORKERS.
"""

import concurrent.futures
import logging
import math
import os
import sys

import numpy as np

from . import arg_parser
from . import config
from . import eval_metrics
from . import export
from . import motion_sim
from . import pipeline
from . import signal_io
from . import spectral
from .adaptive_filter import CornerTrace
from .cepstral import cepstrogram_forward
from .host import Host
from .version import __version__


WORKERS_ENV = 'QUEFRENCY_WORKERS'
MAX_DEFAULT_WORKERS = 4
MANIFEST_NAME = 'manifest.csv'
MANIFEST_COLUMNS = (
    'source_id',
    'velocity',
    'r0',
    'arrival_sample',
    'reference',
    'direct',
    'combined',
)
VARIANTS = ('A', 'B')

log = logging.getLogger(__name__)


def main(argv=None, host=None):
    host = host or Host()

    parser = _make_parser(host)
    args = parser.parse_args(argv)

    if parser.exit_status is not None:
        return parser.exit_status

    if args.version:
        host.print_(__version__)
        return 0

    if args.command is None:
        parser.error('a command is required', bailout=False)
        return parser.exit_status

    logger = logging.getLogger('quefrency')
    handler = logging.StreamHandler(host.stderr)
    handler.setFormatter(
        logging.Formatter('quefrency: %(levelname)s: %(message)s')
    )
    saved = logger.level, logger.propagate
    logger.addHandler(handler)
    logger.setLevel(_log_level(args.verbose))
    logger.propagate = False
    try:
        return args.func(host, args)
    except config.ConfigError as e:
        host.print_(f'quefrency: error: {e}', stream=host.stderr)
        return 2
    except (ValueError, OSError) as e:
        host.print_(f'quefrency: error: {e}', stream=host.stderr)
        return 1
    finally:
        logger.removeHandler(handler)
        logger.setLevel(saved[0])
        logger.propagate = saved[1]


def _make_parser(host):
    parser = arg_parser.ArgumentParser(host, prog='quefrency', desc=__doc__)
    parser.add_argument(
        '-V',
        '--version',
        action='store_true',
        help=f'print quefrency version ({__version__})',
    )
    parser.add_argument(
        '-v',
        '--verbose',
        action='count',
        default=0,
        help='log progress (-v) or details (-vv) to stderr',
    )
    subs = parser.add_subcommands(dest='command', metavar='COMMAND')

    sp = subs.add_parser(
        'simulate', help='write R/A/B triples for every source and velocity'
    )
    sp.add_argument('--config', required=True, metavar='FILE')
    sp.add_argument('--out', required=True, metavar='DIR')
    sp.set_defaults(func=_cmd_simulate)

    sp = subs.add_parser('filter', help='filter one recording')
    sp.add_argument('--in', dest='inp', required=True, metavar='WAV')
    sp.add_argument('--config', required=True, metavar='FILE')
    sp.add_argument('--out', required=True, metavar='WAV')
    sp.add_argument(
        '--corners',
        metavar='CSV',
        help='also write the corner trajectory of every in-band track',
    )
    sp.add_argument(
        '--cepstrograms',
        action='store_true',
        help='also write before/after cepstrogram CSV and PNG files',
    )
    sp.set_defaults(func=_cmd_filter)

    sp = subs.add_parser(
        'evaluate', help='score unfiltered and filtered triples against R'
    )
    sp.add_argument('--manifest', required=True, metavar='CSV')
    sp.add_argument('--config', required=True, metavar='FILE')
    sp.add_argument('--out', required=True, metavar='CSV')
    sp.set_defaults(func=_cmd_evaluate)

    sp = subs.add_parser(
        'sweep-all', help='simulate, evaluate and plot in one directory'
    )
    sp.add_argument('--config', required=True, metavar='FILE')
    sp.add_argument('--out', required=True, metavar='DIR')
    sp.set_defaults(func=_cmd_sweep_all)
    return parser


def _log_level(verbose):
    if verbose >= 2:
        return logging.DEBUG
    if verbose == 1:
        return logging.INFO
    return logging.WARNING


def _read_config(host, path):
    return config.loads(host.read_text_file(path), source=path)


def _workers(host):
    value = host.getenv(WORKERS_ENV)
    if value is None:
        return min(MAX_DEFAULT_WORKERS, host.cpu_count())
    try:
        n = int(value)
    except ValueError:
        n = 0
    if n < 1:
        raise config.ConfigError(
            f'bad value for ${WORKERS_ENV}: {value!r} is not a positive '
            'integer'
        )
    return n


def _map(host, fn, items):
    """fn over items on the worker pool; results in item order."""
    with concurrent.futures.ThreadPoolExecutor(_workers(host)) as pool:
        return list(pool.map(fn, items))


def _stem(path):
    return os.path.splitext(path)[0]


def _source_id(desc):
    kind, arg = config.parse_source(desc)
    if kind == 'noise':
        return f'noise{arg}'
    return os.path.splitext(os.path.basename(arg))[0]


def _load_sources(host, exp):
    sources = []
    seen = set()
    for desc in exp.sources:
        source_id = _source_id(desc)
        if source_id in seen:
            raise config.ConfigError(
                f'bad value for "sources": {source_id!r} appears twice'
            )
        seen.add(source_id)
        kind, arg = config.parse_source(desc)
        if kind == 'noise':
            signal = signal_io.generate_broadband(
                exp.duration, exp.sample_rate, int(arg)
            )
        else:
            signal = signal_io.resample(
                signal_io.loads_wav(host.read_binary_file(arg)),
                exp.sample_rate,
            )
        sources.append((source_id, signal))
    return sources


def _simulate(host, exp, out_dir):
    sources = _load_sources(host, exp)
    items = [
        (source_id, signal, v)
        for source_id, signal in sources
        for v in exp.velocities
    ]

    def synthesize(item):
        _, signal, v = item
        (triple,) = motion_sim.velocity_sweep(
            signal, exp.scenario, [v], centered=exp.centered
        )
        return triple

    triples = _map(host, synthesize, items)

    host.maybe_mkdir(out_dir)
    rows = []
    for (source_id, _, v), triple in zip(items, triples):
        names = []
        for suffix, sig in (
            ('ref', triple.reference),
            ('direct', triple.direct),
            ('combined', triple.combined),
        ):
            name = f'{source_id}_v{v:g}_{suffix}.wav'
            host.write_binary_file(
                host.join(out_dir, name), signal_io.dumps_wav(sig)
            )
            names.append(name)
        rows.append(
            [
                source_id,
                f'{v:g}',
                repr(triple.scenario.r0),
                triple.arrival_sample,
            ]
            + names
        )
    manifest = host.join(out_dir, MANIFEST_NAME)
    host.write_text_file(manifest, export.table_csv(MANIFEST_COLUMNS, rows))
    log.info('wrote %d triples to %s', len(rows), out_dir)
    return manifest


def _cmd_simulate(host, args):
    exp = config.experiment_config(_read_config(host, args.config))
    _simulate(host, exp, args.out)
    return 0


def _cmd_filter(host, args):
    cfg = _read_config(host, args.config)
    scenario = None
    if config.has_geometry(cfg):
        scenario = config.scenario_config(cfg)
    pcfg = config.pipeline_config(cfg, scenario)

    signal = signal_io.loads_wav(host.read_binary_file(args.inp))
    config.check_pipeline(pcfg, signal.sample_rate)
    trace = CornerTrace() if args.corners else None
    audio, before, after = pipeline.filter_audio(signal, pcfg, trace)

    stem = _stem(args.out)
    out_dir = host.dirname(args.out)
    if out_dir:
        host.maybe_mkdir(out_dir)
    if audio is not None:
        host.write_binary_file(args.out, signal_io.dumps_wav(audio))
    for label, spec in (('before', before), ('after', after)):
        host.write_text_file(
            f'{stem}_{label}.csv', export.spectrogram_csv(spec)
        )
        host.write_binary_file(
            f'{stem}_{label}.png', export.spectrogram_png(spec)
        )
        if args.cepstrograms:
            ceps = cepstrogram_forward(spec, pcfg.log_floor)
            host.write_text_file(
                f'{stem}_{label}_ceps.csv', export.cepstrogram_csv(ceps)
            )
            host.write_binary_file(
                f'{stem}_{label}_ceps.png', export.cepstrogram_png(ceps)
            )
    if trace is not None:
        host.write_text_file(args.corners, export.corners_csv(trace))
    return 0


def _read_manifest(host, path):
    rows = export.read_table(host.read_text_file(path))
    missing = [c for c in MANIFEST_COLUMNS if rows and c not in rows[0]]
    if missing:
        raise ValueError(
            f'{path}: manifest lacks column(s) ' + ', '.join(missing)
        )
    return rows


def _score_entry(host, exp, base_dir, entry):
    def spectrogram(column):
        sig = signal_io.loads_wav(
            host.read_binary_file(host.join(base_dir, entry[column]))
        )
        return spectral.stft(
            sig, exp.pipeline.window_size, exp.pipeline.hop_size
        )

    reference = spectrogram('reference')
    first = 0
    if exp.trim_arrival:
        first = math.ceil(int(entry['arrival_sample']) / reference.hop_size)
        if first >= reference.num_frames:
            raise ValueError(
                f'{entry["source_id"]} at {entry["velocity"]} m/s: no frame '
                'starts after the reflected path arrives'
            )

    rows = []
    for variant, column in zip(VARIANTS, ('direct', 'combined')):
        test = spectrogram(column)
        if test.magnitude.shape != reference.magnitude.shape:
            raise ValueError(
                f'{entry[column]}: spectrogram shape {test.magnitude.shape} '
                f'differs from the reference {reference.magnitude.shape}'
            )
        filtered = pipeline.filter_spectrogram(test, exp.pipeline)
        for flag, spec in ((0, test), (1, filtered)):
            report = eval_metrics.evaluate(
                eval_metrics.scoring_grid(
                    reference, first, exp.score_real_bins
                ),
                eval_metrics.scoring_grid(spec, first, exp.score_real_bins),
                exp.metric_floor,
                exp.lsd_form,
            )
            rows.append(
                [
                    entry['source_id'],
                    entry['velocity'],
                    variant,
                    flag,
                    report.snr_db,
                    report.lsd,
                    report.is_distance,
                    report.num_bins,
                    report.num_frames,
                ]
            )
    log.info('scored %s at %s m/s', entry['source_id'], entry['velocity'])
    return rows


def _summarize(rows):
    groups = {}
    for row in rows:
        key = (float(row[1]), row[2], row[3])
        groups.setdefault(key, []).append(row)
    summary = []
    for (v, variant, flag), group in sorted(groups.items()):
        summary.append(
            [
                f'{v:g}',
                variant,
                flag,
                float(np.mean([r[4] for r in group])),
                float(np.mean([r[5] for r in group])),
                float(np.mean([r[6] for r in group])),
                len(group),
            ]
        )
    return summary


def _reduction_pct(before, after):
    if before == 0:
        return 0.0
    return 100.0 * (before - after) / before


def _reductions(summary):
    by_key = {(r[0], r[1], r[2]): r for r in summary}
    rows = []
    for v, variant, flag, *_ in summary:
        if flag != 0 or (v, variant, 1) not in by_key:
            continue
        u = by_key[(v, variant, 0)]
        f = by_key[(v, variant, 1)]
        rows.append(
            [
                v,
                variant,
                f[3] - u[3],
                _reduction_pct(u[4], f[4]),
                _reduction_pct(u[5], f[5]),
            ]
        )
    return rows


def _evaluate(host, exp, manifest, out):
    entries = _read_manifest(host, manifest)
    if not entries:
        raise ValueError(f'{manifest}: manifest has no entries')
    base_dir = host.dirname(manifest)
    results = _map(
        host, lambda e: _score_entry(host, exp, base_dir, e), entries
    )
    rows = [row for entry_rows in results for row in entry_rows]
    summary = _summarize(rows)

    stem = _stem(out)
    out_dir = host.dirname(out)
    if out_dir:
        host.maybe_mkdir(out_dir)
    host.write_text_file(out, export.table_csv(export.METRIC_COLUMNS, rows))
    host.write_text_file(
        f'{stem}_summary.csv',
        export.table_csv(export.SUMMARY_COLUMNS, summary),
    )
    host.write_text_file(
        f'{stem}_reduction.csv',
        export.table_csv(export.REDUCTION_COLUMNS, _reductions(summary)),
    )
    return summary


def _cmd_evaluate(host, args):
    exp = config.experiment_config(_read_config(host, args.config))
    _evaluate(host, exp, args.manifest, args.out)
    return 0


def _cmd_sweep_all(host, args):
    exp = config.experiment_config(_read_config(host, args.config))
    host.maybe_mkdir(args.out)
    host.write_text_file(
        host.join(args.out, 'config.txt'), config.dumps(exp.settings())
    )
    manifest = _simulate(host, exp, args.out)
    summary = _evaluate(
        host, exp, manifest, host.join(args.out, 'metrics.csv')
    )
    curves = [dict(zip(export.SUMMARY_COLUMNS, row)) for row in summary]
    host.write_binary_file(
        host.join(args.out, 'curves.png'), export.curves_png(curves)
    )
    return 0


if __name__ == '__main__':  # pragma: no cover
    sys.exit(main())
