''' Generalized Euler constants in arithmetic progressions

        gamma_k(a, q) = lim_N ( sum_{m <= N, m = a mod q} log(m)^k / m - log(N)^(k+1) / (q (k+1)) )
                      = -(1/q) ( log(q)^(k+1) / (k+1) + sum_{n=0}^{k} binom(k, n) log(q)^(k-n) psi_n(a/q) )

    with psi_n(1) = -gamma_n.
'''
import math
import logging
from functools import partial

import mpmath
import numpy as np
from dataclasses import dataclass

from eulerkronecker import specfun
from eulerkronecker.cache import FunctionTag
from eulerkronecker.analysis_utils import fsum, imap_bar

logger = logging.getLogger(__name__)

K_MAX = 20
Q_MAX = 100
ROW_TOLERANCE = 1e-9


class RangeError(ValueError):
    pass


class RowIdentityError(ArithmeticError):
    pass


def _check_cell(a, q, k=None, q_max=None):
    if int(a) != a or int(q) != q:
        raise RangeError('a and q must be integers, got a={}, q={}'.format(a, q))
    a, q = int(a), int(q)
    if q < 1 or not 1 <= a <= q:
        raise RangeError('Need 1 <= a <= q, got a={}, q={}'.format(a, q))
    if q_max is not None and q > q_max:
        raise RangeError('q={} exceeds the supported {}'.format(q, q_max))
    if k is not None and not 0 <= int(k) <= K_MAX:
        raise RangeError('Need 0 <= k <= {}, got k={}'.format(K_MAX, k))
    return a, q


def gamma0_aq(a, q):
    a, q = _check_cell(a, q)
    log_q = math.log(q)
    if a == q:
        return (specfun.EULER_GAMMA - log_q) / q
    return -(log_q + specfun.digamma(a / float(q))) / q


def gamma1_aq(a, q, cfg=specfun.DEFAULT_CONFIG):
    a, q = _check_cell(a, q)
    log_q = math.log(q)
    if a == q:
        return (specfun.GAMMA1 + specfun.EULER_GAMMA * log_q - log_q ** 2 / 2.) / q
    x = a / float(q)
    return (specfun.GAMMA1 - log_q ** 2 / 2. - log_q * specfun.digamma(x) - specfun.t_function(x, cfg)) / q


def _terms(k, a, q, cfg):
    ''' mpf terms of the binomial formula; their sum is -q gamma_k(a, q). '''
    k = int(k)
    with mpmath.workdps(cfg.precision_dps):
        log_q = mpmath.log(q)
        if a == q:
            psi = [-specfun.gamma_n_mpf(n, cfg) for n in range(k + 1)]
        else:
            x = mpmath.mpf(a) / q
            psi = [specfun.psi_n_mpf(n, x, cfg) for n in range(k + 1)]
        terms = [log_q ** (k + 1) / (k + 1)]
        terms += [mpmath.binomial(k, n) * log_q ** (k - n) * psi[n] for n in range(k + 1)]
    return terms


def _value(terms, q, cfg):
    with mpmath.workdps(cfg.precision_dps):
        return float(-mpmath.fsum(terms) / q)


def gammak_aq(k, a, q, cfg=specfun.DEFAULT_CONFIG):
    a, q = _check_cell(a, q, k=k, q_max=Q_MAX)
    return _value(_terms(int(k), a, q, cfg), q, cfg)


@dataclass(frozen=True, eq=False)
class StieltjesTable(object):
    ''' values[k, a-1] = gamma_k(a, q) for 0 <= k <= k_max and 1 <= a <= q. '''
    q: int
    k_max: int
    values: np.ndarray

    def __getitem__(self, key):
        k, a = key
        _check_cell(a, self.q)
        if not 0 <= k <= self.k_max:
            raise RangeError('Table holds k <= {}, got k={}'.format(self.k_max, k))
        return float(self.values[k, a - 1])

    def row_sums(self):
        return np.array([fsum(row) for row in self.values])


def _row(k, q, cfg):
    terms = [_terms(k, a, q, cfg) for a in range(1, q + 1)]
    values = np.array([_value(t, q, cfg) for t in terms])
    scale = sum(float(abs(term)) for t in terms for term in t) / q
    return values, scale


def build_table(q, k_max, cfg=specfun.DEFAULT_CONFIG, threads=1, progress=False):
    ''' All gamma_k(a, q) for k <= k_max, one row per worker task.

        Every row must satisfy sum_a gamma_k(a, q) = gamma_k.
    '''
    _check_cell(1, q, k=k_max, q_max=Q_MAX)
    rows = imap_bar(partial(_row, q=int(q), cfg=cfg), range(int(k_max) + 1), n_processes=threads,
                    desc='gamma_k(a, {})'.format(q), disable=not progress)
    table = StieltjesTable(q=int(q), k_max=int(k_max), values=np.vstack([values for values, _ in rows]))
    for k, total in enumerate(table.row_sums()):
        expected = specfun.gamma_n(k, cfg)
        residual = abs(total - expected)
        # the binomial terms cancel heavily for large k, so the bound follows their size
        tolerance = ROW_TOLERANCE * max(1.0, rows[k][1])
        logger.debug('q=%d k=%d: row identity residual %.3e (tolerance %.3e)', q, k, residual, tolerance)
        if residual > tolerance:
            raise RowIdentityError('q={} k={}: sum over a is {!r}, gamma_k is {!r}'.format(q, k, total, expected))
    return table


def gamma01_from_tables(ctx, psi_table, t_table):
    ''' gamma_0(a, q) and gamma_1(a, q) for a = 1, ..., q (index a-1) from full
        digamma and T tables.
    '''
    for table, tag in ((psi_table, FunctionTag.PSI), (t_table, FunctionTag.T)):
        if table.tag is not tag or table.q != ctx.q or table.g != ctx.g or not table.is_full:
            raise ValueError('Need a full {} table for q={}, g={}'.format(tag.value, ctx.q, ctx.g))
    q = ctx.q
    log_q = math.log(q)
    psi = np.empty(q - 1)
    t = np.empty(q - 1)
    psi[ctx.a_seq - 1] = psi_table.values
    t[ctx.a_seq - 1] = t_table.values

    g0 = np.empty(q)
    g1 = np.empty(q)
    g0[:-1] = -(log_q + psi) / q
    g1[:-1] = (specfun.GAMMA1 - log_q ** 2 / 2. - log_q * psi - t) / q
    g0[-1] = gamma0_aq(q, q)
    g1[-1] = gamma1_aq(q, q)
    return g0, g1
