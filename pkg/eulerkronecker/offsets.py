''' Greedy sequence of prime offsets and the score v(q).

    b(1) = 0 and b(n) is the smallest integer above b(n-1) such that
    {b(1), ..., b(n)} still misses a residue class modulo every prime.
    v(q) sums 1/b(i), i >= 2, over the offsets with b(i) q + 1 prime; large v(q)
    goes with small Euler-Kronecker constants.
'''
import logging
import functools
from functools import partial

import numpy as np
import numba
from dataclasses import dataclass
from sympy import primerange

from eulerkronecker.multgroup import is_prime
from eulerkronecker.analysis_utils import compensated_sum, imap_bar

logger = logging.getLogger(__name__)

MAX_COUNT = 2089
PRIMALITY_LIMIT = 2 ** 64


class OffsetOverflowError(OverflowError):
    pass


@numba.njit(cache=True)
def _greedy_kernel(count, primes):
    ''' cover[i, c] counts the elements congruent to c modulo primes[i]. '''
    n_primes = primes.shape[0]
    cover = np.zeros((n_primes, primes[-1]), dtype=np.int32)
    n_covered = np.zeros(n_primes, dtype=np.int64)
    out = np.zeros(count, dtype=np.int64)

    for i in range(n_primes):
        cover[i, 0] = 1
        n_covered[i] = 1

    candidate = 0
    for n in range(2, count + 1):
        while True:
            candidate += 1
            ok = True
            for i in range(n_primes):
                r = primes[i]
                if r > n:
                    break
                if cover[i, candidate % r] == 0 and n_covered[i] == r - 1:
                    ok = False
                    break
            if ok:
                break
        out[n - 1] = candidate
        for i in range(n_primes):
            c = candidate % primes[i]
            if cover[i, c] == 0:
                n_covered[i] += 1
            cover[i, c] += 1
    return out


@dataclass(frozen=True, eq=False)
class OffsetSequence(object):
    b: np.ndarray

    @property
    def count(self):
        return self.b.shape[0]

    def __len__(self):
        return self.count

    def prefix(self, n):
        return OffsetSequence(b=self.b[:n])


def greedy_offsets(count):
    count = int(count)
    if not 1 <= count <= MAX_COUNT:
        raise ValueError('count must lie in [1, {}], got {}'.format(MAX_COUNT, count))
    primes = np.array(list(primerange(2, MAX_COUNT + 1)), dtype=np.int64)
    b = _greedy_kernel(count, primes)
    b.setflags(write=False)
    logger.debug('Greedy offsets: %d terms, last %d', count, b[-1])
    return OffsetSequence(b=b)


@functools.lru_cache(maxsize=1)
def default_offsets():
    return greedy_offsets(MAX_COUNT)


def is_admissible(values):
    ''' True when the residues of `values` omit a class modulo every prime. Only
        primes r <= len(values) can be fully covered.
    '''
    values = [int(v) for v in values]
    for r in primerange(2, len(values) + 1):
        if len({v % r for v in values}) == r:
            return False
    return True


def _reciprocal_sum(b):
    ''' Compensated sum of 1/b, largest b first. '''
    b = np.sort(np.asarray(b, dtype=np.float64))[::-1]
    return compensated_sum(np.ascontiguousarray(1.0 / b))


def offsets_sum(seq):
    ''' m(C) = sum_{i >= 2} 1/b(i) '''
    return _reciprocal_sum(seq.b[1:])


def v_of_q(q, seq=None):
    q = int(q)
    if q < 3:
        raise ValueError('v(q) needs q >= 3, got {}'.format(q))
    seq = default_offsets() if seq is None else seq
    hits = []
    for b in seq.b[1:]:
        n = int(b) * q + 1
        if n >= PRIMALITY_LIMIT:
            raise OffsetOverflowError('b={} times q={} plus 1 exceeds the 64-bit primality range'.format(b, q))
        if is_prime(n):
            hits.append(int(b))
    if not hits:
        return 0.0
    return _reciprocal_sum(hits)


def scan_candidates(q_min, q_max, threshold, seq=None, threads=1, progress=False):
    ''' (q, v(q)) for all primes q_min <= q <= q_max with v(q) > threshold, ascending in q. '''
    q_min, q_max = int(q_min), int(q_max)
    if q_min > q_max:
        raise ValueError('Empty range [{}, {}]'.format(q_min, q_max))
    seq = default_offsets() if seq is None else seq
    primes = list(primerange(max(3, q_min), q_max + 1))
    values = imap_bar(partial(v_of_q, seq=seq), primes, n_processes=threads, desc='v(q)', disable=not progress)
    found = [(q, v) for q, v in zip(primes, values) if v > threshold]
    logger.info('%d of %d primes in [%d, %d] have v(q) > %s', len(found), len(primes), q_min, q_max, threshold)
    return found
