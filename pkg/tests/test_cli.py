import io
import os
import shutil
import logging
import tempfile
import unittest
from contextlib import redirect_stdout, redirect_stderr

import numpy as np
import tables as tb
from sympy import primerange

from eulerkronecker import cli
from eulerkronecker import stieltjes
from eulerkronecker.scans.ek_scan import COLUMNS, SCAN_DTYPE, summarize_scan, format_rows


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


class TestCommands(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self._env = os.environ.pop('EK_CACHE_DIR', None)

    def tearDown(self):
        root = logging.getLogger()
        for handler in list(root.handlers):
            if isinstance(handler, logging.FileHandler):
                root.removeHandler(handler)
                handler.close()
        shutil.rmtree(self.tmp)
        if self._env is not None:
            os.environ['EK_CACHE_DIR'] = self._env

    def test_compute(self):
        code, out, _ = run('compute', 3)
        self.assertEqual(code, 0)
        self.assertIn('ek = 0.945497280871', out)
        self.assertIn('mq_even = 0.000000000000000', out)

    def test_compute_digits(self):
        code, out, _ = run('compute', 5, '--digits', 6)
        self.assertEqual(code, 0)
        self.assertIn('ek = 1.720624', out.splitlines())

    def test_compute_both(self):
        code, out, _ = run('compute', 101, '--method', 'both')
        self.assertEqual(code, 0)
        line = [l for l in out.splitlines() if l.startswith('method_discrepancy')][0]
        self.assertLessEqual(float(line.split('=')[1]), 1e-8)

    def test_not_prime(self):
        code, _, err = run('compute', 9)
        self.assertEqual(code, 2)
        self.assertIn('not an odd prime', err)

    def test_bad_flag(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                cli.main(['compute', '7', '--method', 'x'])
        self.assertEqual(cm.exception.code, 2)

    def test_scan_csv(self):
        path = os.path.join(self.tmp, 'scan.csv')
        code, _, _ = run('scan', 3, 60, '--out', path, '--with-vq')
        self.assertEqual(code, 0)
        with open(path) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], 'q,ek,ek_plus,ek_diff,mq,mq_odd,mq_even,ek_norm,ek_plus_norm,mq_norm,v_q')
        self.assertEqual([int(l.split(',')[0]) for l in lines[1:]], list(primerange(3, 61)))
        for field in lines[1].split(',')[1:]:
            self.assertEqual(len(field.split('.')[1]), 15)
        self.assertTrue(lines[1].startswith('3,0.945497280871'))

    def test_scan_deterministic(self):
        one, two = os.path.join(self.tmp, 'one.csv'), os.path.join(self.tmp, 'two.csv')
        self.assertEqual(run('scan', 3, 100, '--out', one, '--threads', 1)[0], 0)
        self.assertEqual(run('scan', 3, 100, '--out', two, '--threads', 3)[0], 0)
        with open(one) as f1, open(two) as f2:
            self.assertEqual(f1.read(), f2.read())

    def test_scan_without_vq(self):
        code, out, _ = run('scan', 3, 7)
        self.assertEqual(code, 0)
        self.assertTrue(out.splitlines()[1].endswith(','))

    def test_scan_h5(self):
        h5 = os.path.join(self.tmp, 'run', 'scan.h5')
        code, _, _ = run('scan', 3, 30, '--h5', h5, '--out', os.path.join(self.tmp, 'scan.csv'))
        self.assertEqual(code, 0)
        with tb.open_file(h5) as f:
            results = f.root.results[:]
            self.assertEqual(f.root.results.attrs.scan_id, 'ek_scan')
            self.assertEqual(results['q'].tolist(), list(primerange(3, 31)))
        self.assertTrue(os.path.exists(os.path.join(self.tmp, 'run', 'scan.log')))

    def test_scan_empty_range(self):
        self.assertEqual(run('scan', 5, 3)[0], 2)

    def test_cache_workflow(self):
        self.assertEqual(run('precompute', 101, '--tag', 'S_PAIR', '--range', 0, 25, '--part', 0,
                             '--cache', self.tmp)[0], 0)
        self.assertEqual(run('precompute', 101, '--tag', 'S_PAIR', '--range', 25, 50, '--part', 1,
                             '--cache', self.tmp)[0], 0)
        code, out, _ = run('checksum', 101, '--tag', 'S_PAIR', '--cache', self.tmp)
        self.assertEqual(code, 0)
        self.assertIn('residual=', out)

        merged = os.path.join(self.tmp, 'merged', 'S_PAIR_q101_part0.ekc')
        self.assertEqual(run('merge', 101, '--tag', 'S_PAIR', '--cache', self.tmp, '--out', merged)[0], 0)
        self.assertTrue(os.path.exists(merged))

        code, out, _ = run('compute', 101, '--cache', self.tmp)
        self.assertEqual(code, 0)
        self.assertIn('ek = 5.297012891', out)

    def test_cache_from_environment(self):
        os.environ['EK_CACHE_DIR'] = self.tmp
        try:
            self.assertEqual(run('precompute', 13, '--tag', 'T', '--threads', 2)[0], 0)
        finally:
            del os.environ['EK_CACHE_DIR']
        self.assertEqual(sorted(os.listdir(self.tmp)), ['T_q13_part0.ekc', 'T_q13_part1.ekc'])

    def test_cache_errors(self):
        self.assertEqual(run('checksum', 101, '--tag', 'T', '--cache', self.tmp)[0], 1)
        self.assertEqual(run('precompute', 101, '--tag', 'T')[0], 2)
        self.assertEqual(run('precompute', 101, '--tag', 'T', '--range', 0, 200, '--cache', self.tmp)[0], 2)
        with open(os.path.join(self.tmp, 'T_q101_part0.ekc'), 'w') as f:
            f.write('garbage\n')
        self.assertEqual(run('merge', 101, '--tag', 'T', '--cache', self.tmp)[0], 1)

    def test_gamma_n(self):
        code, out, _ = run('gamma-n', 10)
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith('0.000205332814909'))
        self.assertEqual(run('gamma-n', 40)[0], 2)

    def test_stieltjes(self):
        code, out, _ = run('stieltjes', 0, 1, 1)
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith('0.577215664901533'))
        self.assertEqual(run('stieltjes', 0, 5, 3)[0], 2)

    def test_stieltjes_table(self):
        code, out, _ = run('stieltjes-table', 2, 3, '--digits', 14)
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], 'k,a,gamma_k')
        self.assertEqual(len(lines), 1 + 3 * 3)
        rows = [line.split(',') for line in lines[1:]]
        self.assertEqual([(int(k), int(a)) for k, a, _ in rows[:3]], [(0, 1), (0, 2), (0, 3)])
        self.assertAlmostEqual(float(rows[2][2]), stieltjes.gamma0_aq(3, 3), delta=1e-13)
        self.assertAlmostEqual(sum(float(v) for k, _, v in rows if k == '0'), 0.5772156649015329, delta=1e-12)
        self.assertEqual(run('stieltjes-table', 21, 3)[0], 2)

    def test_gamma01(self):
        code, out, _ = run('gamma01', 13, '--digits', 14, '--cache', self.tmp)
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], 'a,gamma_0,gamma_1')
        self.assertEqual(len(lines), 1 + 13)
        for line in lines[1:]:
            a, g0, g1 = line.split(',')
            self.assertAlmostEqual(float(g0), stieltjes.gamma0_aq(int(a), 13), delta=1e-13)
            self.assertAlmostEqual(float(g1), stieltjes.gamma1_aq(int(a), 13), delta=1e-12)
        self.assertEqual(sorted(os.listdir(self.tmp)), ['PSI_q13_part0.ekc', 'T_q13_part0.ekc'])

    def test_offsets(self):
        code, out, _ = run('offsets', 3)
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], '0 2 6')

    def test_vq(self):
        code, out, _ = run('vq', 964477901, '--digits', 7)
        self.assertEqual(code, 0)
        self.assertAlmostEqual(float(out), 1.2369344, delta=1e-6)

    def test_candidates(self):
        code, out, _ = run('candidates', 964477900, 964477902, '--threshold', 1.2)
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith('964477901,1.236934'))


class TestSummary(unittest.TestCase):
    def setUp(self):
        self.rows = np.zeros(4, dtype=SCAN_DTYPE)
        self.rows['q'] = [3, 5, 7, 11]
        self.rows['ek_norm'] = [0.8, 1.1, 0.5, 1.0]
        self.rows['ek_plus_norm'] = [0.5, 0.9, 1.0, 1.1]
        self.rows['mq_norm'] = [3.0, 1.5, 1.0, 0.9]
        self.rows['mq_odd'] = [1.0, 1.0, 0.5, 0.7]
        self.rows['mq_even'] = [0.0, 0.5, 0.6, 0.6]
        self.rows['v_q'] = [0.1, 0.7, 1.3, 0.95]

    def test_extremes(self):
        summary = summarize_scan(self.rows)
        self.assertEqual(summary['n_rows'], 4)
        self.assertEqual(summary['ek_norm'], ((0.5, 7), (1.1, 5)))
        self.assertEqual(summary['mq_norm'][0], (0.9, 11))
        self.assertEqual(summary['n_mq_odd'], 3)

    def test_v_classes(self):
        shares = summarize_scan(self.rows)['v_classes']
        self.assertEqual(list(shares.values()), [0.25, 0.25, 0.25, 0.25])
        self.rows['v_q'] = np.nan
        self.assertNotIn('v_classes', summarize_scan(self.rows))

    def test_format(self):
        lines = format_rows(self.rows[:1], digits=3)
        self.assertEqual(lines[0], ','.join(COLUMNS))
        self.assertEqual(lines[1], '3,0.000,0.000,0.000,0.000,1.000,0.000,0.800,0.500,3.000,0.100')

    def test_empty(self):
        self.assertEqual(summarize_scan(np.zeros(0, dtype=SCAN_DTYPE)), {'n_rows': 0, 'n_mq_odd': 0})


if __name__ == '__main__':
    unittest.main()
