# coding: utf-8

import numpy as np

from eulerkronecker import offsets
from eulerkronecker.scan_base import ScanBase

CANDIDATE_DTYPE = np.dtype([('q', '<i8'), ('v_q', '<f8')])


class CandidateScan(ScanBase):
    ''' Primes in a range whose v(q) exceeds a threshold. '''
    scan_id = 'candidate_scan'

    def scan(self, q_min, q_max, threshold=1.2, threads=1, progress=False):
        found = offsets.scan_candidates(q_min, q_max, threshold, threads=threads, progress=progress)
        for q, v in found:
            self.logger.info('q={:d}: v(q)={:.7f}'.format(q, v))
        return np.array(found, dtype=CANDIDATE_DTYPE)


if __name__ == "__main__":
    scan = CandidateScan()
    scan.start(q_min=964477900, q_max=964477902, threshold=1.2)
