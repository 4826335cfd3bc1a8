''' Precomputed special-function tables indexed by k (argument a_k / q), their
    text format on disk and the closed-form checksums guarding them.

    File layout::

        EKCACHE 1 q=<q> g=<g> tag=<tag> k0=<k0> k1=<k1> digits=<d>
        <k> <value>
        ...
        SUM <partial_sum> COUNT <n>
'''
import os
import re
import enum
import glob
import math
import logging
from functools import partial

import numpy as np
from dataclasses import dataclass

from eulerkronecker import specfun
from eulerkronecker.analysis_utils import fsum, imap_bar

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
DEFAULT_DIGITS = 19

_HEADER = re.compile(r'^EKCACHE (\d+) q=(\d+) g=(\d+) tag=(\S+) k0=(\d+) k1=(\d+) digits=(\d+)$')
_TRAILER = re.compile(r'^SUM (\S+) COUNT (\d+)$')
_PART = re.compile(r'_part(\d+)\.ekc$')


class CacheFormatError(ValueError):
    pass


class CacheMismatchError(ValueError):
    pass


class ChecksumMismatchError(ArithmeticError):
    pass


class FunctionTag(enum.Enum):
    LOGGAMMA = 'LOGGAMMA'
    S_PAIR = 'S_PAIR'
    T = 'T'
    PSI = 'PSI'


def full_length(tag, q):
    ''' S_PAIR tables hold one value per pair {a, q-a}, the others one per a. '''
    return (q - 1) // 2 if FunctionTag(tag) is FunctionTag.S_PAIR else q - 1


@dataclass(frozen=True, eq=False)
class ValueTable(object):
    q: int
    g: int
    tag: FunctionTag
    k_lo: int
    k_hi: int
    values: np.ndarray
    digits: int = DEFAULT_DIGITS
    partial_sum: float = 0.0

    def __post_init__(self):
        if self.k_hi - self.k_lo != self.values.shape[0]:
            raise CacheMismatchError('Range [{}, {}) does not match {} values'.format(
                self.k_lo, self.k_hi, self.values.shape[0]))
        if not 0 <= self.k_lo <= self.k_hi <= full_length(self.tag, self.q):
            raise CacheMismatchError('Range [{}, {}) invalid for tag {} and q={}'.format(
                self.k_lo, self.k_hi, self.tag.value, self.q))

    @property
    def k_range(self):
        return (self.k_lo, self.k_hi)

    @property
    def is_full(self):
        return self.k_lo == 0 and self.k_hi == full_length(self.tag, self.q)

    def file_name(self, part=0):
        return cache_file_name(self.tag, self.q, part)


def cache_file_name(tag, q, part=0):
    return '{}_q{}_part{}.ekc'.format(FunctionTag(tag).value, q, part)


def evaluate(tag, x, cfg=specfun.DEFAULT_CONFIG):
    tag = FunctionTag(tag)
    if tag is FunctionTag.LOGGAMMA:
        return specfun.log_gamma(x)
    if tag is FunctionTag.S_PAIR:
        return specfun.s_pair(x, cfg)
    if tag is FunctionTag.T:
        return specfun.t_function(x, cfg)
    return specfun.digamma(x)


def precompute(ctx, tag, k_range=None, cfg=specfun.DEFAULT_CONFIG, digits=DEFAULT_DIGITS):
    ''' Table of f(a_k / q) for k in k_range. For S_PAIR the entry k is
        S(a_k/q) + S(a_{k+m}/q), since a_{k+m} = q - a_k.
    '''
    tag = FunctionTag(tag)
    if k_range is None:
        k_range = (0, full_length(tag, ctx.q))
    k_lo, k_hi = int(k_range[0]), int(k_range[1])
    if not 0 <= k_lo <= k_hi <= full_length(tag, ctx.q):
        raise ValueError('Range [{}, {}) invalid for tag {} and q={}'.format(k_lo, k_hi, tag.value, ctx.q))

    if k_hi == k_lo:
        values = np.empty(0)
    else:
        x = ctx.a_seq[k_lo:k_hi] / float(ctx.q)
        values = np.asarray(evaluate(tag, x, cfg), dtype=np.float64)
    values.setflags(write=False)
    return ValueTable(q=ctx.q, g=ctx.g, tag=tag, k_lo=k_lo, k_hi=k_hi, values=values,
                      digits=digits, partial_sum=fsum(values))


def split_range(length, n_parts):
    edges = np.linspace(0, length, max(1, n_parts) + 1).astype(np.int64)
    return [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:])]


def precompute_chunked(ctx, tag, cfg=specfun.DEFAULT_CONFIG, n_parts=1, threads=1, digits=DEFAULT_DIGITS,
                       progress=False):
    ''' Full table computed as contiguous parts in worker processes.

        The parts are computed independently and merged in order, so the result
        is identical for every worker count.
    '''
    tag = FunctionTag(tag)
    ranges = split_range(full_length(tag, ctx.q), n_parts)
    func = partial(precompute, ctx, tag, cfg=cfg, digits=digits)
    parts = imap_bar(func, ranges, n_processes=threads, desc='{} q={}'.format(tag.value, ctx.q),
                     disable=not progress)
    return parts


def merge(parts):
    if not parts:
        raise ValueError('Nothing to merge')
    first = parts[0]
    previous = first
    for part in parts[1:]:
        for name in ('q', 'g', 'tag', 'digits'):
            if getattr(part, name) != getattr(first, name):
                raise CacheMismatchError('{} mismatch at k={}: {} != {}'.format(
                    name, part.k_lo, getattr(part, name), getattr(first, name)))
        if part.k_lo > previous.k_hi:
            raise CacheMismatchError('Gap at k={} (next part starts at k={})'.format(previous.k_hi, part.k_lo))
        if part.k_lo < previous.k_hi:
            raise CacheMismatchError('Overlap at k={} (previous part ends at k={})'.format(part.k_lo, previous.k_hi))
        previous = part

    values = np.concatenate([p.values for p in parts])
    values.setflags(write=False)
    return ValueTable(q=first.q, g=first.g, tag=first.tag, k_lo=first.k_lo, k_hi=parts[-1].k_hi,
                      values=values, digits=first.digits, partial_sum=fsum([p.partial_sum for p in parts]))


# Closed forms of the full sums over a = 1, ..., q-1

def expected_sum(tag, q):
    tag = FunctionTag(tag)
    log_q = math.log(q)
    if tag is FunctionTag.S_PAIR:
        return -specfun.CONSTANTS.zeta_second_deriv_at_0 * (q - 1) - log_q * specfun.LOG_2PI - log_q ** 2 / 2.
    if tag is FunctionTag.T:
        return q / 2. * log_q ** 2 + specfun.CONSTANTS.euler_gamma * q * log_q
    if tag is FunctionTag.LOGGAMMA:
        return (q - 1) / 2. * specfun.LOG_2PI - log_q / 2.
    return -(q - 1) * specfun.CONSTANTS.euler_gamma - q * log_q


def checksum_residual(table):
    if not table.is_full:
        raise ValueError('Checksum needs the full range, table covers [{}, {})'.format(table.k_lo, table.k_hi))
    return abs(table.partial_sum - expected_sum(table.tag, table.q))


def checksum_tolerance(table, cfg=specfun.DEFAULT_CONFIG):
    ''' 10 (q-1) target_abs_error, scaled by the largest magnitude in the table. '''
    scale = max(1.0, float(np.max(np.abs(table.values)))) if table.values.size else 1.0
    return 10. * (table.q - 1) * cfg.target_abs_error * scale


def save(table, path):
    d = table.digits
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(directory):
        os.makedirs(directory)
    with open(path, 'w') as f:
        f.write('EKCACHE {} q={} g={} tag={} k0={} k1={} digits={}\n'.format(
            FORMAT_VERSION, table.q, table.g, table.tag.value, table.k_lo, table.k_hi, d))
        for k, value in zip(range(table.k_lo, table.k_hi), table.values):
            f.write('{} {:.{}e}\n'.format(k, value, d - 1))
        f.write('SUM {:.{}e} COUNT {}\n'.format(table.partial_sum, d - 1, table.values.shape[0]))
    logger.debug('Wrote %s', path)
    return path


def load(path, cfg=specfun.DEFAULT_CONFIG, verify=True):
    with open(path) as f:
        lines = [line.rstrip('\n') for line in f if line.strip()]
    if not lines:
        raise CacheFormatError('{}: empty file'.format(path))

    header = _HEADER.match(lines[0])
    if header is None:
        raise CacheFormatError('{}: malformed header'.format(path))
    version, q, g, tag, k_lo, k_hi, digits = header.groups()
    if int(version) != FORMAT_VERSION:
        raise CacheFormatError('{}: unsupported format version {}'.format(path, version))
    try:
        tag = FunctionTag(tag)
    except ValueError:
        raise CacheFormatError('{}: unknown function tag {}'.format(path, tag))
    q, g, k_lo, k_hi, digits = int(q), int(g), int(k_lo), int(k_hi), int(digits)

    trailer = _TRAILER.match(lines[-1])
    if trailer is None:
        raise CacheFormatError('{}: missing trailer'.format(path))
    stored_sum, count = float(trailer.group(1)), int(trailer.group(2))
    body = lines[1:-1]
    if count != len(body) or count != k_hi - k_lo:
        raise CacheFormatError('{}: COUNT {} but {} values for range [{}, {})'.format(path, count, len(body), k_lo, k_hi))

    values = np.empty(count)
    for i, line in enumerate(body):
        fields = line.split()
        if len(fields) != 2 or int(fields[0]) != k_lo + i:
            raise CacheFormatError('{}: bad value line at k={}'.format(path, k_lo + i))
        values[i] = float(fields[1])
    values.setflags(write=False)

    total = fsum(values)
    slack = 10. ** (2 - digits) * max(1.0, float(np.sum(np.abs(values))))
    if verify and abs(total - stored_sum) > slack:
        raise ChecksumMismatchError('{}: stored SUM {!r} differs from the values ({!r})'.format(path, stored_sum, total))

    table = ValueTable(q=q, g=g, tag=tag, k_lo=k_lo, k_hi=k_hi, values=values, digits=digits, partial_sum=total)
    if verify and table.is_full:
        residual = checksum_residual(table)
        if residual > checksum_tolerance(table, cfg):
            raise ChecksumMismatchError('{}: closed-form checksum residual {:.3e} exceeds {:.3e}'.format(
                path, residual, checksum_tolerance(table, cfg)))
    return table


class CacheDirectory(object):
    ''' Part files <tag>_q<q>_part<i>.ekc below one directory. '''

    def __init__(self, directory, cfg=specfun.DEFAULT_CONFIG):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.directory = directory
        self.cfg = cfg

    def part_files(self, tag, q):
        pattern = os.path.join(self.directory, '{}_q{}_part*.ekc'.format(FunctionTag(tag).value, q))
        files = glob.glob(pattern)
        return sorted(files, key=lambda name: int(_PART.search(name).group(1)))

    def has(self, tag, q):
        return len(self.part_files(tag, q)) > 0

    def load(self, tag, q):
        files = self.part_files(tag, q)
        if not files:
            raise IOError('No {} cache for q={} in {}'.format(FunctionTag(tag).value, q, self.directory))
        self.logger.info('Loading %d part(s) of %s for q=%d', len(files), FunctionTag(tag).value, q)
        table = merge([load(name, self.cfg) for name in files])
        if table.is_full:
            residual = checksum_residual(table)
            if residual > checksum_tolerance(table, self.cfg):
                raise ChecksumMismatchError('Merged {} cache for q={}: residual {:.3e}'.format(
                    table.tag.value, q, residual))
        return table

    def save(self, table, part=0):
        path = os.path.join(self.directory, table.file_name(part))
        self.logger.info('Saving %s', path)
        return save(table, path)
