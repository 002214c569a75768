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

import unittest

import numpy as np

from quefrency import config
from quefrency import export
from quefrency import signal_io
from quefrency import tool
from quefrency.version import __version__

from .host_fake import FakeHost


# Small enough to run in a unit test: 1 s at 4 kHz, 125 frames/s.
SMALL_RUN = """\
sources = noise:0, noise:1
duration = 1.0
sample_rate = 4000
velocities = 20, 40
window = 256
hop = 32
"""

SIMULATE = ['simulate', '--config', 'run.cfg', '--out', 'sim']
EVALUATE = [
    'evaluate',
    '--manifest',
    'sim/manifest.csv',
    '--config',
    'run.cfg',
    '--out',
    'sim/metrics.csv',
]
SWEEP = ['sweep-all', '--config', 'run.cfg', '--out', 'sweep']


class CheckMixin:
    def _write_files(self, host, files):
        for path, contents in list(files.items()):
            if isinstance(contents, bytes):
                host.write_binary_file(path, contents)
            else:
                host.write_text_file(path, contents)

    def check_cmd(
        self,
        args,
        files=None,
        env=None,
        before=None,
        returncode=None,
        out=None,
        err=None,
    ):
        """Run ``args`` in a fresh temporary directory.

        Commands in ``before`` run first and must succeed. Returns the
        exit code, stdout, stderr and the files written, keyed by their
        path relative to the temporary directory.
        """

        host = self._host(env)
        orig_wd, tmpdir = None, None
        try:
            orig_wd = host.getcwd()
            tmpdir = host.mkdtemp()
            host.chdir(tmpdir)
            if files:
                self._write_files(host, files)
            for cmd in before or []:
                self.assertEqual(tool.main(cmd, host), 0, cmd)
            rv = self._call(host, args, returncode, out, err)
            actual_ret, actual_out, actual_err = rv
            written = {
                path[len(tmpdir) + 1 :]: contents
                for path, contents in host.written_files.items()
                if path.startswith(tmpdir + '/')
            }
        finally:
            if tmpdir:
                host.rmtree(tmpdir)
            if orig_wd:
                host.chdir(orig_wd)

        return actual_ret, actual_out, actual_err, written


class UnitTestMixin:
    def _host(self, env=None):
        return FakeHost(env=env)

    def _call(self, host, args, returncode=None, out=None, err=None):
        actual_ret = tool.main(args, host)
        actual_out = host.stdout.getvalue()
        actual_err = host.stderr.getvalue()
        if returncode is not None:
            self.assertEqual(returncode, actual_ret, actual_err)
        if out is not None:
            self.assertEqual(out, actual_out)
        if err is not None:
            self.assertEqual(err, actual_err)
        return actual_ret, actual_out, actual_err


class ToolTest(UnitTestMixin, CheckMixin, unittest.TestCase):
    maxDiff = None

    def test_help(self):
        _, out, _, _ = self.check_cmd(['--help'], returncode=0)
        self.assertTrue(out.startswith('usage: quefrency'))
        self.assertIn('sweep-all', out)

    def test_subcommand_help(self):
        _, out, _, _ = self.check_cmd(['filter', '--help'], returncode=0)
        self.assertIn('--corners', out)

    def test_version(self):
        self.check_cmd(['-V'], returncode=0, out=__version__ + '\n')
        self.check_cmd(['--version'], returncode=0, out=__version__ + '\n')

    def test_no_command(self):
        _, _, err, _ = self.check_cmd([], returncode=2)
        self.assertIn('a command is required', err)

    def test_unknown_switch(self):
        self.check_cmd(['--bogus'], returncode=2)

    def test_missing_required_argument(self):
        _, _, err, _ = self.check_cmd(['simulate'], returncode=2)
        self.assertIn('--config', err)

    def test_missing_config_file(self):
        _, _, err, _ = self.check_cmd(SIMULATE, returncode=1)
        self.assertIn('run.cfg', err)


class SimulateTest(UnitTestMixin, CheckMixin, unittest.TestCase):
    maxDiff = None

    def test_writes_triples_and_manifest(self):
        _, _, _, files = self.check_cmd(
            SIMULATE, files={'run.cfg': SMALL_RUN}, returncode=0
        )
        wavs = sorted(p for p in files if p.endswith('.wav'))
        self.assertEqual(len(wavs), 12)
        self.assertIn('sim/noise1_v40_combined.wav', wavs)

        rows = export.read_table(files['sim/manifest.csv'])
        self.assertEqual(
            [(r['source_id'], r['velocity']) for r in rows],
            [
                ('noise0', '20'),
                ('noise0', '40'),
                ('noise1', '20'),
                ('noise1', '40'),
            ],
        )
        self.assertEqual(rows[0]['r0'], '-10.0')
        self.assertEqual(rows[1]['r0'], '-20.0')
        self.assertEqual(rows[0]['reference'], 'noise0_v20_ref.wav')
        arrival = int(rows[0]['arrival_sample'])
        self.assertGreater(arrival, 0)
        self.assertLess(arrival, 4000)

        ref = signal_io.loads_wav(files['sim/noise0_v20_ref.wav'])
        self.assertEqual(ref.sample_rate, 4000)
        self.assertEqual(len(ref), 4000)

    def test_verbose(self):
        _, _, err, _ = self.check_cmd(
            ['-v'] + SIMULATE, files={'run.cfg': SMALL_RUN}, returncode=0
        )
        self.assertIn('quefrency: INFO: wrote 4 triples to sim', err)

    def test_no_sources(self):
        self.check_cmd(
            SIMULATE,
            files={'run.cfg': 'sources = ,\n'},
            returncode=2,
            err='quefrency: error: bad value for "sources": no sources '
            'given\n',
        )

    def test_bad_worker_count(self):
        for value in ('zero', '0', '-3'):
            with self.subTest(value=value):
                _, _, err, _ = self.check_cmd(
                    SIMULATE,
                    files={'run.cfg': SMALL_RUN},
                    env={tool.WORKERS_ENV: value},
                    returncode=2,
                )
                self.assertIn(tool.WORKERS_ENV, err)


class FilterTest(UnitTestMixin, CheckMixin, unittest.TestCase):
    maxDiff = None

    def _silence(self):
        return signal_io.dumps_wav(
            signal_io.TimeSignal(np.zeros(8192), 32000)
        )

    def test_silence(self):
        _, _, _, files = self.check_cmd(
            [
                'filter',
                '--in',
                'quiet.wav',
                '--config',
                'run.cfg',
                '--out',
                'clean.wav',
                '--corners',
                'corners.csv',
                '--cepstrograms',
            ],
            files={
                'quiet.wav': self._silence(),
                'run.cfg': 'tau_max = 0.002\n',
            },
            returncode=0,
        )
        audio = signal_io.loads_wav(files['clean.wav'])
        self.assertEqual(len(audio), 8192)
        self.assertTrue(np.all(audio.samples == 0))
        for name in (
            'clean_before.csv',
            'clean_after.csv',
            'clean_before_ceps.csv',
            'clean_after_ceps.csv',
        ):
            self.assertIn(name, files)
        for name in (
            'clean_before.png',
            'clean_after.png',
            'clean_before_ceps.png',
            'clean_after_ceps.png',
        ):
            self.assertTrue(files[name].startswith(b'\x89PNG'))

        after = files['clean_after.csv'].splitlines()
        self.assertEqual(len(after), 513)
        self.assertEqual(len(after[0].split(',')), 29)

        corners = export.read_table(files['corners.csv'])
        # 29 frames of the 63 bins from 2 to 64.
        self.assertEqual(len(corners), 29 * 63)
        self.assertEqual(corners[0]['bin'], '2')
        self.assertEqual(corners[-1]['bin'], '64')
        self.assertEqual(corners[-1]['frame'], '28')

    def test_no_audio(self):
        _, _, _, files = self.check_cmd(
            [
                'filter',
                '--in',
                'quiet.wav',
                '--config',
                'run.cfg',
                '--out',
                'out/clean.wav',
            ],
            files={
                'quiet.wav': self._silence(),
                'run.cfg': 'z_s = 10\nreconstruct_audio = false\n',
            },
            returncode=0,
        )
        self.assertNotIn('out/clean.wav', files)
        self.assertIn('out/clean_after.png', files)

    def test_missing_tau_max(self):
        self.check_cmd(
            [
                'filter',
                '--in',
                'quiet.wav',
                '--config',
                'run.cfg',
                '--out',
                'clean.wav',
            ],
            files={'run.cfg': ''},
            returncode=2,
            err='quefrency: error: missing config key "tau_max"\n',
        )

    def test_missing_input(self):
        _, _, err, _ = self.check_cmd(
            [
                'filter',
                '--in',
                'nope.wav',
                '--config',
                'run.cfg',
                '--out',
                'clean.wav',
            ],
            files={'run.cfg': 'tau_max = 0.002\n'},
            returncode=1,
        )
        self.assertIn('nope.wav', err)

    def test_band_unusable_at_input_rate(self):
        for cfg, message in (
            ('tau_min = 0.01\ntau_max = 0.001\n', 'tau_min < tau_max'),
            ('tau_max = 0.1\n', 'beyond the largest quefrency'),
            ('tau_max = 0.002\nhop = 1024\n', 'f_max2 = 15 Hz'),
        ):
            with self.subTest(cfg=cfg):
                _, _, err, files = self.check_cmd(
                    [
                        'filter',
                        '--in',
                        'quiet.wav',
                        '--config',
                        'run.cfg',
                        '--out',
                        'clean.wav',
                    ],
                    files={'quiet.wav': self._silence(), 'run.cfg': cfg},
                    returncode=2,
                )
                self.assertIn(message, err)
                self.assertIn('(sample rate 32000 Hz)', err)
                self.assertNotIn('clean.wav', files)


class EvaluateTest(UnitTestMixin, CheckMixin, unittest.TestCase):
    maxDiff = None

    def test_scores_every_triple(self):
        _, _, _, files = self.check_cmd(
            EVALUATE,
            files={'run.cfg': SMALL_RUN},
            before=[SIMULATE],
            returncode=0,
        )
        rows = export.read_table(files['sim/metrics.csv'])
        self.assertEqual(len(rows), 16)
        self.assertEqual(list(rows[0]), list(export.METRIC_COLUMNS))
        self.assertEqual(
            [(r['variant'], r['filtered']) for r in rows[:4]],
            [('A', '0'), ('A', '1'), ('B', '0'), ('B', '1')],
        )
        for r in rows:
            # DC and Nyquist are left out of the score by default.
            self.assertEqual(r['F'], '127')
            self.assertLess(int(r['T']), 118)
            for column in ('snr_db', 'lsd', 'is'):
                self.assertTrue(np.isfinite(float(r[column])), r)

        summary = export.read_table(files['sim/metrics_summary.csv'])
        self.assertEqual(len(summary), 8)
        self.assertEqual({r['num_sources'] for r in summary}, {'2'})
        self.assertEqual(
            [r['velocity'] for r in summary], ['20'] * 4 + ['40'] * 4
        )
        reduction = export.read_table(files['sim/metrics_reduction.csv'])
        self.assertEqual(
            [(r['velocity'], r['variant']) for r in reduction],
            [('20', 'A'), ('20', 'B'), ('40', 'A'), ('40', 'B')],
        )

    def test_untrimmed_scores_every_frame(self):
        _, _, _, files = self.check_cmd(
            EVALUATE,
            files={'run.cfg': SMALL_RUN + 'trim_arrival = false\n'},
            before=[SIMULATE],
            returncode=0,
        )
        rows = export.read_table(files['sim/metrics.csv'])
        self.assertEqual({r['T'] for r in rows}, {'118'})

    def test_real_bins_scored_on_request(self):
        _, _, _, files = self.check_cmd(
            EVALUATE,
            files={'run.cfg': SMALL_RUN + 'score_real_bins = true\n'},
            before=[SIMULATE],
            returncode=0,
        )
        rows = export.read_table(files['sim/metrics.csv'])
        self.assertEqual({r['F'] for r in rows}, {'129'})

    def test_missing_manifest(self):
        self.check_cmd(EVALUATE, files={'run.cfg': SMALL_RUN}, returncode=1)


class SweepAllTest(UnitTestMixin, CheckMixin, unittest.TestCase):
    maxDiff = None

    def test_outputs(self):
        _, _, _, files = self.check_cmd(
            SWEEP, files={'run.cfg': SMALL_RUN}, returncode=0
        )
        for name in (
            'sweep/manifest.csv',
            'sweep/metrics.csv',
            'sweep/metrics_summary.csv',
            'sweep/metrics_reduction.csv',
        ):
            self.assertIn(name, files)
        self.assertTrue(files['sweep/curves.png'].startswith(b'\x89PNG'))

        written = config.loads(files['sweep/config.txt'])
        self.assertEqual(written['window'], '256')
        self.assertEqual(written['i_mid'], 'auto-median')
        exp = config.experiment_config(config.loads(SMALL_RUN))
        self.assertEqual(
            config.experiment_config(written).settings(), exp.settings()
        )

    def test_deterministic_across_worker_counts(self):
        results = []
        for workers in ('1', '3'):
            _, _, _, files = self.check_cmd(
                SWEEP,
                files={'run.cfg': SMALL_RUN},
                env={tool.WORKERS_ENV: workers},
                returncode=0,
            )
            results.append(files['sweep/metrics.csv'])
        self.assertEqual(results[0], results[1])

    def test_unstable_filter_fails_before_simulating(self):
        # 4000 / 256 = 15.6 frames/s puts f_max2 = 15 Hz above the limit.
        _, _, err, files = self.check_cmd(
            SWEEP,
            files={'run.cfg': SMALL_RUN.replace('hop = 32', 'hop = 256')},
            returncode=2,
        )
        self.assertIn('f_max2 = 15 Hz is unstable', err)
        self.assertEqual(list(files), ['run.cfg'])

    def test_band_beyond_axis_fails_before_simulating(self):
        _, _, err, files = self.check_cmd(
            SWEEP,
            files={'run.cfg': SMALL_RUN + 'tau_max = 0.05\n'},
            returncode=2,
        )
        self.assertIn('beyond the largest quefrency', err)
        self.assertEqual(list(files), ['run.cfg'])


if __name__ == '__main__':
    unittest.main()
