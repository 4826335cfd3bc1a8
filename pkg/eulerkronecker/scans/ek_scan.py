# coding: utf-8

import math
import logging
from functools import partial

import numpy as np

from eulerkronecker import specfun
from eulerkronecker import ek
from eulerkronecker import offsets
from eulerkronecker.multgroup import build_context
from eulerkronecker.scan_base import ScanBase
from eulerkronecker.analysis_utils import imap_bar
from sympy import primerange

logging.basicConfig(
    format="%(asctime)s - [%(name)-8s] - %(levelname)-7s %(message)s")
loglevel = logging.INFO

COLUMNS = ('q', 'ek', 'ek_plus', 'ek_diff', 'mq', 'mq_odd', 'mq_even', 'ek_norm', 'ek_plus_norm', 'mq_norm', 'v_q')
SCAN_DTYPE = np.dtype([('q', '<i8')] + [(name, '<f8') for name in COLUMNS[1:]])

# Lower edges of the v(q) classes
V_CLASSES = ((0.0, 'v<0.6'), (0.6, '0.6<=v<0.9'), (0.9, '0.9<=v<1.2'), (1.2, 'v>=1.2'))


def compute_row(q, method=ek.Method.S, cfg=specfun.DEFAULT_CONFIG, cache_dir=None, with_vq=False,
                imag_tolerance=ek.IMAG_TOLERANCE):
    ''' One scan row for prime q; v_q is nan unless requested. '''
    ctx = build_context(q)
    caches = ek.build_caches(ctx, method, cfg, cache_dir=cache_dir, threads=1)
    res = ek.compute_ek(ctx, caches, method, imag_tolerance=imag_tolerance)
    v_q = offsets.v_of_q(q) if with_vq else float('nan')
    return (res.q, res.ek, res.ek_plus, res.ek_diff, res.mq, res.mq_odd, res.mq_even,
            res.ek_norm, res.ek_plus_norm, res.mq_norm, v_q)


class EKScan(ScanBase):
    scan_id = 'ek_scan'

    def scan(self, q_min=3, q_max=300, method='s', cfg=None, cache_dir=None, threads=1, with_vq=False,
             imag_tolerance=ek.IMAG_TOLERANCE, progress=False):
        q_min, q_max = int(q_min), int(q_max)
        if q_min > q_max:
            raise ValueError('Empty range [{}, {}]'.format(q_min, q_max))
        cfg = specfun.DEFAULT_CONFIG if cfg is None else cfg
        primes = list(primerange(max(3, q_min), q_max + 1))
        self.logger.info('Scanning {:d} primes in [{:d}, {:d}] with method {:s}'.format(
            len(primes), q_min, q_max, ek.Method(method).value))

        func = partial(compute_row, method=ek.Method(method), cfg=cfg, cache_dir=cache_dir, with_vq=with_vq,
                       imag_tolerance=imag_tolerance)
        rows = imap_bar(func, primes, n_processes=threads, desc=self.scan_id, disable=not progress)
        self.rows = np.array(rows, dtype=SCAN_DTYPE)
        return self.rows

    def analyze(self, rows=None):
        rows = self.rows if rows is None else rows
        summary = summarize_scan(rows)
        for name in ('ek_norm', 'ek_plus_norm', 'mq_norm'):
            if name in summary:
                (lo, q_lo), (hi, q_hi) = summary[name]
                self.logger.info('{:s}: min {:.6f} at q={:d}, max {:.6f} at q={:d}'.format(name, lo, q_lo, hi, q_hi))
        self.logger.info('M_q attained at an odd character for {:d} of {:d} primes'.format(
            summary['n_mq_odd'], summary['n_rows']))
        for label, share in summary.get('v_classes', {}).items():
            self.logger.info('{:s}: {:.1%}'.format(label, share))
        return summary


def summarize_scan(rows):
    ''' Extremes of the normalised columns (value, q), the number of rows with
        M_q^odd > M_q^even and, when v_q is present, the share of each v(q) class.
    '''
    rows = np.asarray(rows, dtype=SCAN_DTYPE)
    summary = {'n_rows': int(rows.shape[0]), 'n_mq_odd': int(np.count_nonzero(rows['mq_odd'] > rows['mq_even']))}
    if rows.shape[0] == 0:
        return summary
    for name in ('ek_norm', 'ek_plus_norm', 'mq_norm'):
        i_lo, i_hi = int(np.argmin(rows[name])), int(np.argmax(rows[name]))
        summary[name] = ((float(rows[name][i_lo]), int(rows['q'][i_lo])),
                         (float(rows[name][i_hi]), int(rows['q'][i_hi])))

    v = rows['v_q']
    if np.all(np.isfinite(v)):
        edges = [edge for edge, _ in V_CLASSES[1:]]
        counts = np.bincount(np.digitize(v, edges), minlength=len(V_CLASSES))
        summary['v_classes'] = {label: counts[i] / float(v.shape[0]) for i, (_, label) in enumerate(V_CLASSES)}
    return summary


def format_rows(rows, digits=15):
    ''' CSV lines (header first) with `digits` decimals; v_q is empty when not computed. '''
    lines = [','.join(COLUMNS)]
    for row in np.asarray(rows, dtype=SCAN_DTYPE):
        fields = [str(int(row['q']))]
        for name in COLUMNS[1:]:
            value = float(row[name])
            fields.append('' if math.isnan(value) else '{:.{}f}'.format(value, digits))
        lines.append(','.join(fields))
    return lines


if __name__ == "__main__":
    scan = EKScan()
    scan.start(q_min=3, q_max=300)
    scan.analyze()
