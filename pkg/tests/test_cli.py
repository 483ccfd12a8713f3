import argparse
import contextlib
import importlib
import io
import json
import logging
import os
import unittest
from unittest import mock

from dirac_series.config import DiracScreenConfig
from scripts import dirac_screen


def run(argv):
    parser = dirac_screen.add_args(argparse.ArgumentParser())
    args = parser.parse_args(argv + ['--quiet'])
    stream = io.StringIO()
    code = dirac_screen.main(args, stream)
    return code, stream.getvalue()


class TestCommands(unittest.TestCase):
    def test_chambers(self):
        code, out = run(['chambers'])
        self.assertEqual(code, dirac_screen.EXIT_OK)
        records = json.loads(out)
        self.assertEqual(len(records), 72)
        self.assertEqual(records[0]['rho_n_varpi'], ['0', '0', '0', '0', '0', '0', '10'])

    def test_chambers_csv(self):
        code, out = run(['chambers', '--format', 'csv'])
        lines = out.strip().split('\n')
        self.assertEqual(lines[0], 'j,length,rho_n_ambient,rho_n_varpi')
        self.assertEqual(len(lines), 73)

    def test_norm(self):
        code, out = run(['norm', '--ktype', '0,1,0,1,0,0,8'])
        self.assertEqual(code, dirac_screen.EXIT_OK)
        record = json.loads(out)
        self.assertEqual(record['spin_norm_sq'], '42')
        self.assertTrue(record['usmall'])

    def test_norm_plain(self):
        code, out = run(['norm', '--ktype', '[0,0,0,0,0,0,0]', '--format', 'plain'])
        self.assertIn('spin_norm_sq: 399/2  (norm sqrt(399/2))', out.split('\n'))

    def test_usmall(self):
        code, out = run(['usmall', '--ktype', '0,0,0,0,0,0,22'])
        self.assertFalse(json.loads(out)['usmall'])
        code, out = run(['usmall', '--caps'])
        self.assertEqual(len(json.loads(out)['caps']), 7)

    def test_screen(self):
        code, out = run(['screen', '--ktype', '0,1,0,1,0,0,8', '--inf-char', '1,0,0,1,0,1,0'])
        self.assertEqual(json.loads(out)['status'], 'PassesEquality')

    def test_screen_pencil_violation(self):
        code, out = run(['screen', '--ktype', '0,0,0,0,0,0,0', '--inf-char', '1,1,1,1,1,1,0'])
        self.assertEqual(code, dirac_screen.EXIT_OK)
        record = json.loads(out)
        self.assertEqual(record['status'], 'FailsDiracInequality')
        self.assertEqual(record['witness']['n'], '3')
        self.assertEqual(record['witness']['spin_norm_sq'], '231/2')

    def test_screen_inconclusive(self):
        code, out = run(['screen', '--ktype', '0,0,0,0,0,0,0', '--inf-char', '1,1,1,0,1,1,1', '--cap', '0'])
        self.assertEqual(code, dirac_screen.EXIT_INCONCLUSIVE)
        self.assertEqual(json.loads(out)['status'], 'Inconclusive')

    def test_pencil_cap_zero(self):
        code, out = run(['pencil', '--ktype', '0,0,0,0,0,0,0', '--inf-char', '1,1,1,0,1,1,1', '--cap', '0',
                         '--full-scan'])
        self.assertEqual(code, dirac_screen.EXIT_OK)
        self.assertEqual(json.loads(out)['profile'], ['399/2'])

    def test_pencil(self):
        code, out = run(['pencil', '--ktype', '0,0,0,0,0,0,0', '--inf-char', '1,1,1,0,1,1,1', '--cap', '20'])
        self.assertEqual(code, dirac_screen.EXIT_OK)
        self.assertEqual(json.loads(out)['equality_ns'], ['3', '4', '5', '6'])

    def test_pencil_inconclusive(self):
        code, out = run(['pencil', '--ktype', '0,0,0,0,0,0,0', '--inf-char', '1,1,1,0,1,1,1', '--cap', '2'])
        self.assertEqual(code, dirac_screen.EXIT_INCONCLUSIVE)
        self.assertFalse(json.loads(out)['conclusive'])

    def test_enumerate_phi(self):
        code, out = run(['enumerate-phi', '--max-coord', '1'])
        self.assertEqual(len(json.loads(out)), 35)
        code, out = run(['enumerate-phi', '--max-coord', '1', '--counts'])
        self.assertEqual(json.loads(out)['counts'], {'1': '35'})

    def test_dirac_candidates(self):
        code, out = run(['dirac-candidates', '--inf-char', '1,0,0,1,0,1,0', '--gamma', '0,0,0,0,0,0,0'])
        candidates = json.loads(out)
        self.assertEqual(len(candidates), 1)
        self.assertEqual(len(candidates[0]['lengths']), 16)
        self.assertEqual(candidates[0]['parity'], '-1')

    def test_dirac_candidates_from_spin_lkts(self):
        lkts = '2,0,2,1,0,2,2;1,0,3,0,1,2,1;1,1,1,1,1,1,3;0,1,2,0,2,1,2'
        code, out = run(['dirac-candidates', '--inf-char', '1,0,0,1,0,1,0', '--spin-lkts', lkts])
        self.assertEqual(code, dirac_screen.EXIT_OK)
        candidates = json.loads(out)
        self.assertEqual([c['gamma'] for c in candidates], [['0'] * 7])
        self.assertEqual(sorted(candidates[0]['lengths'], key=int), ['7', '8', '8', '9'])
        self.assertEqual(sorted(candidates[0]['parities'], key=int), ['-1', '-1', '1', '1'])

    def test_tensor(self):
        code, out = run(['tensor', '--small', '1,0,0,0,0,0,0', '--other', '0,0,0,0,0,0,1'])
        record = json.loads(out)
        self.assertEqual(record['dimension'], '64')
        self.assertEqual(len(record['terms']), 2)

    def test_verify_stats(self):
        code, out = run(['verify', '--only', 'stats'])
        self.assertEqual(code, dirac_screen.EXIT_OK)
        self.assertTrue(json.loads(out)[0]['passed'])

    def test_verify_cancellation(self):
        code, out = run(['verify', '--only', 'cancellation'])
        self.assertEqual(code, dirac_screen.EXIT_OK)


class TestExitCodes(unittest.TestCase):
    def test_bad_ktype(self):
        self.assertEqual(dirac_screen.cli_main(['norm', '--ktype', '1,2,3', '--quiet']), dirac_screen.EXIT_INVALID)

    def test_not_dominant(self):
        argv = ['screen', '--ktype', '0,0,0,0,0,0,0', '--inf-char', '1,-1,0,0,0,0,0', '--quiet']
        self.assertEqual(dirac_screen.cli_main(argv), dirac_screen.EXIT_INVALID)

    def test_missing_dataset(self):
        argv = ['verify', '--only', 'stats', '--dataset', os.path.join('no', 'such', 'file.json'), '--quiet']
        self.assertEqual(dirac_screen.cli_main(argv), dirac_screen.EXIT_INVALID)

    def test_not_spin_lkt(self):
        argv = ['dirac-candidates', '--inf-char', '1,0,0,1,0,1,0', '--spin-lkts', '0,0,0,0,1,2,7', '--quiet']
        self.assertEqual(dirac_screen.cli_main(argv), dirac_screen.EXIT_INVALID)


class TestLogging(unittest.TestCase):
    def test_import_leaves_logging_alone(self):
        with mock.patch('logging.basicConfig') as basic_config:
            importlib.reload(dirac_screen)
        basic_config.assert_not_called()

    def test_cli_configures_logging(self):
        with mock.patch('logging.basicConfig') as basic_config, contextlib.redirect_stdout(io.StringIO()):
            self.assertEqual(dirac_screen.cli_main(['chambers', '--quiet']), dirac_screen.EXIT_OK)
        basic_config.assert_called_once_with(level=logging.WARNING)


class TestConfig(unittest.TestCase):
    def test_defaults(self):
        config = DiracScreenConfig(threads=2)
        self.assertEqual(config.output_format, 'json')
        self.assertEqual(config.pencil_cap, 50)
        self.assertIsNone(config.dataset_path)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            DiracScreenConfig(output_format='xml')
        with self.assertRaises(ValueError):
            DiracScreenConfig(threads=0)
        with self.assertRaises(ValueError):
            DiracScreenConfig(threads=1, pencil_cap=-1)
        self.assertEqual(DiracScreenConfig(threads=1, pencil_cap=0).pencil_cap, 0)

    def test_threads_from_environment(self):
        previous = os.environ.get('DIRAC_SCREEN_THREADS')
        try:
            os.environ['DIRAC_SCREEN_THREADS'] = '3'
            self.assertEqual(DiracScreenConfig().threads, 3)
            os.environ['DIRAC_SCREEN_THREADS'] = 'many'
            with self.assertRaises(ValueError):
                DiracScreenConfig()
        finally:
            if previous is None:
                os.environ.pop('DIRAC_SCREEN_THREADS', None)
            else:
                os.environ['DIRAC_SCREEN_THREADS'] = previous


if __name__ == '__main__':
    unittest.main()
