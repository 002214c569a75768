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

import io
import unittest

from quefrency import config
from quefrency.adaptive_filter import AdaptiveBandStopConfig
from quefrency.motion_sim import DEFAULT_VELOCITIES


class LoadsTest(unittest.TestCase):
    maxDiff = None

    def check(self, s, obj):
        self.assertEqual(config.loads(s), obj)

    def check_fail(self, s, err=None, **kwargs):
        try:
            config.loads(s, **kwargs)
            self.fail()  # pragma: no cover
        except config.ConfigError as e:
            if err is not None:
                self.assertEqual(err, str(e))

    def test_empty(self):
        self.check('', {})
        self.check('\n\n# only a comment\n', {})

    def test_key_value(self):
        self.check(
            'window = 1024\nhop=256\n', {'window': '1024', 'hop': '256'}
        )

    def test_comments(self):
        self.check('hop = 128   # quarter window\n', {'hop': '128'})

    def test_order_is_kept(self):
        cfg = config.loads('z_s = 1\nc = 2\nwindow = 3\n')
        self.assertEqual(list(cfg), ['z_s', 'c', 'window'])

    def test_errors_name_the_line(self):
        self.check_fail(
            'window = 8\njunk\n', '<string>:2 expected "key = value"'
        )
        self.check_fail('Window = 8\n', '<string>:1 bad key "Window"')
        self.check_fail('hop =\n', '<string>:1 no value for "hop"')
        self.check_fail(
            'hop = 1\nhop = 2\n', '<string>:2 duplicate key "hop" found'
        )

    def test_duplicate_keys_can_be_allowed(self):
        self.assertEqual(
            config.loads('hop = 1\nhop = 2\n', allow_duplicate_keys=True),
            {'hop': '2'},
        )

    def test_unknown_key_is_a_warning(self):
        with self.assertLogs('quefrency.config', level='WARNING') as cm:
            cfg = config.loads('windw = 1024\n', source='run.cfg')
        self.assertEqual(cfg, {'windw': '1024'})
        self.assertIn('run.cfg:1 unknown config key "windw"', cm.output[0])

    def test_load(self):
        fp = io.StringIO('hop = 64\n')
        self.assertEqual(config.load(fp), {'hop': '64'})

    def test_bytes(self):
        self.check(b'hop = 64\n', {'hop': '64'})


class DumpsTest(unittest.TestCase):
    maxDiff = None

    def test_values(self):
        self.assertEqual(
            config.dumps(
                {
                    'hop': 256,
                    'log_floor': 1e-10,
                    'trim_arrival': False,
                    'velocities': [10.0, 20.5],
                    'lsd_form': 'printed',
                }
            ),
            'hop = 256\n'
            'log_floor = 1e-10\n'
            'trim_arrival = false\n'
            'velocities = 10.0, 20.5\n'
            'lsd_form = printed\n',
        )

    def test_round_trip(self):
        d = {'sources': 'noise:0, noise:1', 'tau_max': '0.0029154518950437317'}
        self.assertEqual(config.loads(config.dumps(d)), d)

    def test_dump(self):
        fp = io.StringIO()
        config.dump({'hop': 8}, fp)
        self.assertEqual(fp.getvalue(), 'hop = 8\n')

    def test_bad_keys_and_values(self):
        self.assertRaises(TypeError, config.dumps, {1: 2})
        self.assertRaises(TypeError, config.dumps, {'Bad': 2})
        self.assertRaises(ValueError, config.dumps, {'sources': 'a#b'})


class BuildersTest(unittest.TestCase):
    maxDiff = None

    def check_fail(self, fn, s, err):
        with self.assertRaises(config.ConfigError) as cm:
            fn(config.loads(s))
        self.assertEqual(err, str(cm.exception))

    def test_pipeline_defaults(self):
        p = config.pipeline_config(config.loads('tau_max = 0.002\n'))
        self.assertEqual(p.window_size, 1024)
        self.assertEqual(p.hop_size, 256)
        self.assertEqual(p.log_floor, 1e-10)
        self.assertIsNone(p.tau_min)
        self.assertEqual(p.tau_max, 0.002)
        self.assertIsNone(p.scenario)
        self.assertEqual(p.filter, AdaptiveBandStopConfig())
        self.assertIsNone(p.filter.i_mid)
        self.assertTrue(p.reconstruct_audio)

    def test_missing_tau_max(self):
        self.check_fail(
            config.pipeline_config,
            'window = 512\n',
            'missing config key "tau_max"',
        )

    def test_scenario_supplies_the_band(self):
        cfg = config.loads('z_s = 50\n')
        self.assertTrue(config.has_geometry(cfg))
        scenario = config.scenario_config(cfg)
        p = config.pipeline_config(cfg, scenario)
        self.assertIsNone(p.tau_max)
        self.assertEqual(p.scenario.z_s, 50.0)

    def test_bad_numbers_name_the_key(self):
        self.check_fail(
            config.pipeline_config,
            'tau_max = 0.002\nhop = many\n',
            'bad value for "hop": \'many\' is not an integer',
        )
        self.check_fail(
            config.pipeline_config,
            'tau_max = soon\n',
            'bad value for "tau_max": \'soon\' is not a number',
        )
        self.check_fail(
            config.pipeline_config,
            'tau_max = 0.002\nreconstruct_audio = maybe\n',
            'bad value for "reconstruct_audio": \'maybe\' is not a flag',
        )

    def test_invalid_filter_is_a_config_error(self):
        with self.assertRaises(config.ConfigError):
            config.pipeline_config(
                config.loads('tau_max = 0.002\nf_max1 = 3\nf_min2 = 2\n')
            )

    def test_checked_against_the_sample_rate(self):
        def build(s):
            return config.pipeline_config(config.loads(s), None, 32000)

        p = build('tau_max = 0.002\n')
        self.assertEqual(p.tau_max, 0.002)

        self.check_fail(
            build,
            'tau_min = 0.01\ntau_max = 0.001\n',
            'quefrency band needs 0 < tau_min < tau_max, got '
            '[0.01, 0.001] (sample rate 32000 Hz)',
        )
        self.check_fail(
            build,
            'tau_max = 0.02\n',
            'tau_max 0.02 s is beyond the largest quefrency 0.016 s of '
            'the cepstrogram (sample rate 32000 Hz)',
        )
        self.check_fail(
            build,
            'tau_max = 0.002\nf_pre = 25\n',
            'f_pre = 25 Hz is unstable at a frame rate of 125 Hz '
            '(limit 19.89 Hz) (sample rate 32000 Hz)',
        )

    def test_experiment_checks_the_filter_at_its_sample_rate(self):
        # 8000 / 256 = 31.25 frames/s: f_max2 = 15 Hz is above 4.97 Hz.
        with self.assertRaises(config.ConfigError) as cm:
            config.experiment_config(config.loads('sample_rate = 8000\n'))
        self.assertIn('f_max2 = 15 Hz is unstable', str(cm.exception))

        exp = config.experiment_config(
            config.loads('sample_rate = 8000\nhop = 64\n')
        )
        self.assertEqual(exp.pipeline.hop_size, 64)

    def test_fixed_filter_mode(self):
        f = config.filter_config(
            config.loads('filter_mode = fixed\nf_c1 = 0.3\nf_c2 = 4\n')
        )
        self.assertTrue(f.is_fixed)
        self.assertEqual((f.f_min1, f.f_max1), (0.3, 0.3))
        self.assertEqual((f.f_min2, f.f_max2), (4.0, 4.0))

        f = config.filter_config(config.loads('filter_mode = fixed\n'))
        self.assertEqual((f.f_max1, f.f_min2), (0.5, 2.0))

        self.check_fail(
            config.filter_config,
            'filter_mode = sometimes\n',
            'bad value for "filter_mode": \'sometimes\' is not one of '
            'adaptive, fixed',
        )

    def test_explicit_i_mid(self):
        f = config.filter_config(config.loads('i_mid = 0.25\n'))
        self.assertEqual(f.i_mid, 0.25)

    def test_scenario(self):
        s = config.scenario_config(config.loads('r0 = -120\nv_s = 30\n'))
        self.assertEqual(s.r0, -120.0)
        self.assertEqual(s.v_s, 30.0)
        self.assertEqual((s.z_s, s.z_r, s.c), (100.0, 0.5, 343.0))
        self.assertEqual(s.reflection_coefficient, -1.0)

        self.check_fail(
            config.scenario_config,
            'reflection_coefficient = 2\n',
            'reflection_coefficient must lie in [-1, 1], got 2.0',
        )

    def test_parse_source(self):
        self.assertEqual(config.parse_source('noise:7'), ('noise', '7'))
        self.assertEqual(config.parse_source('a/b.wav'), ('wav', 'a/b.wav'))
        self.assertRaises(config.ConfigError, config.parse_source, 'noise:x')

    def test_experiment_defaults(self):
        exp = config.experiment_config({})
        self.assertEqual(exp.sources, ['noise:0'])
        self.assertTrue(exp.centered)
        self.assertEqual(exp.velocities, list(DEFAULT_VELOCITIES))
        self.assertEqual(exp.duration, 10.0)
        self.assertEqual(exp.sample_rate, 32000)
        self.assertEqual(exp.metric_floor, 1e-10)
        self.assertEqual(exp.lsd_form, 'printed')
        self.assertTrue(exp.trim_arrival)
        self.assertIs(exp.pipeline.scenario, exp.scenario)

    def test_experiment_lists(self):
        exp = config.experiment_config(
            config.loads(
                'sources = noise:1, noise:2, x.wav\n'
                'velocities = 20, 40\n'
                'r0 = -50\n'
            )
        )
        self.assertEqual(exp.sources, ['noise:1', 'noise:2', 'x.wav'])
        self.assertEqual(exp.velocities, [20.0, 40.0])
        self.assertFalse(exp.centered)
        self.assertEqual(exp.scenario.r0, -50.0)

    def test_experiment_errors(self):
        self.check_fail(
            config.experiment_config,
            'sources = ,\n',
            'bad value for "sources": no sources given',
        )
        self.check_fail(
            config.experiment_config,
            'velocities = 10, -5\n',
            'bad value for "velocities": need one or more positive speeds',
        )
        self.check_fail(
            config.experiment_config,
            'duration = 0\n',
            'bad value for "duration": must be positive',
        )
        self.check_fail(
            config.experiment_config,
            'lsd_form = fancy\n',
            'bad value for "lsd_form": \'fancy\' is not one of '
            'printed, conventional',
        )

    def test_settings_read_back(self):
        exp = config.experiment_config(
            config.loads('sources = noise:3\nvelocities = 30\ni_mid = 0.5\n')
        )
        settings = exp.settings()
        self.assertEqual(settings['i_mid'], 0.5)
        self.assertEqual(settings['r0'], 'centered')
        again = config.experiment_config(
            config.loads(config.dumps(settings))
        )
        self.assertEqual(again, exp)


if __name__ == '__main__':  # pragma: no cover
    unittest.main()
