''' Euler-Kronecker constants of the q-th cyclotomic field and of its maximal
    real subfield, and the maximum M_q of |L'/L(1, chi)| over chi != chi_0.

    Characters are labelled by their exponent j: chi_j(g^k) = e(j k / (q-1)).
    chi_j is even iff j is even. With a_k = g^k mod q,

        dft(f(a_k/q), -1)[j] = sum_a conj(chi_j(a)) f(a/q),
        dft(f(a_k/q), +1)[j] = sum_a chi_j(a) f(a/q).

    Method S (logGamma and S tables)
        odd chi:   L'/L(1, chi) = gamma + log 2pi + sum conj(chi) logGamma / B_{1, conj(chi)}
        even chi:  L'/L(1, chi) = gamma + log 2pi - 1/2 sum conj(chi) S / sum conj(chi) logGamma
    Method T (T and digamma tables)
        L'/L(1, chi) = -log q - sum chi T / sum chi psi
'''
import enum
import math
import logging

import numpy as np
from dataclasses import dataclass, asdict

from eulerkronecker import specfun
from eulerkronecker import cache as cache_mod
from eulerkronecker.cache import FunctionTag
from eulerkronecker.fft import dft, dif_split, twiddles
from eulerkronecker.analysis_utils import fsum

logger = logging.getLogger(__name__)

# Exponent sign making bin j of the S pipeline belong to chi_j (calibrated against explicit characters at q=5).
CHARACTER_SIGN = -1
ZERO_TOLERANCE = 1e-12
IMAG_TOLERANCE = 1e-10

GAMMA_PLUS_LOG_2PI = specfun.EULER_GAMMA + specfun.LOG_2PI


class NearZeroDivisionError(ArithmeticError):
    pass


class ImaginaryResidueError(ArithmeticError):
    pass


class Method(enum.Enum):
    S = 's'
    T = 't'
    BOTH = 'both'


@dataclass(frozen=True)
class EKResult(object):
    q: int
    ek: float
    ek_plus: float
    ek_diff: float
    mq_odd: float
    mq_even: float
    mq: float
    ek_norm: float
    ek_plus_norm: float
    mq_norm: float
    method: Method
    method_discrepancy: float = float('nan')
    imag_residue: float = 0.0
    imag_tolerance: float = IMAG_TOLERANCE

    def as_dict(self):
        d = asdict(self)
        d['method'] = self.method.value
        return d


@dataclass(frozen=True, eq=False)
class CharacterSums(object):
    log_gamma_spec: object
    s_even_spec: object
    bern_odd_spec: object


def required_tags(method):
    method = Method(method)
    if method is Method.S:
        return (FunctionTag.LOGGAMMA, FunctionTag.S_PAIR)
    if method is Method.T:
        return (FunctionTag.T, FunctionTag.PSI)
    return (FunctionTag.LOGGAMMA, FunctionTag.S_PAIR, FunctionTag.T, FunctionTag.PSI)


def _table(ctx, caches, tag, full=True):
    try:
        table = caches[tag] if not isinstance(caches, cache_mod.ValueTable) else caches
    except KeyError:
        raise ValueError('Missing {} table for q={}'.format(tag.value, ctx.q))
    if table.tag is not tag:
        raise ValueError('Expected a {} table, got {}'.format(tag.value, table.tag.value))
    if table.q != ctx.q or table.g != ctx.g:
        raise ValueError('Table for q={}, g={} used with q={}, g={}'.format(table.q, table.g, ctx.q, ctx.g))
    if full and not table.is_full:
        raise ValueError('{} table for q={} covers only [{}, {})'.format(tag.value, ctx.q, table.k_lo, table.k_hi))
    return table


def _check_nonzero(values, what, q):
    smallest = np.min(np.abs(values)) if values.size else np.inf
    if smallest < ZERO_TOLERANCE:
        raise NearZeroDivisionError('q={}: {} has an entry of size {:.3e}'.format(q, what, smallest))


def _real_sum(values, tolerance, what):
    total = fsum(values)
    residue = abs(complex(total).imag)
    scale = max(1.0, fsum(np.abs(values)))
    if residue > tolerance * scale:
        raise ImaginaryResidueError('{}: imaginary residue {:.3e} above {:.1e}'.format(what, residue, tolerance))
    return complex(total).real, residue


def bernoulli_spectrum(ctx, workers=None):
    ''' B_{1, conj(chi_j)} = (1/q) sum_a a conj(chi_j(a)) for odd j = 2t + 1, indexed by t. '''
    pair = dif_split(ctx.x_seq, CHARACTER_SIGN)
    spec = dft(pair.c_seq, CHARACTER_SIGN, workers=workers, decimated=True)
    _check_nonzero(spec.values, 'B_1 of an odd character', ctx.q)
    return spec


def build_character_sums(ctx, caches, workers=None):
    lg = _table(ctx, caches, FunctionTag.LOGGAMMA)
    sp = _table(ctx, caches, FunctionTag.S_PAIR)
    return CharacterSums(
        log_gamma_spec=dft(lg.values, CHARACTER_SIGN, workers=workers),
        s_even_spec=dft(sp.values, CHARACTER_SIGN, workers=workers, decimated=True),
        bern_odd_spec=bernoulli_spectrum(ctx, workers=workers))


def odd_character_values(ctx, sums):
    ''' L'/L(1, chi_j) for j = 1, 3, ..., q-2 (entry t belongs to j = 2t + 1). '''
    bern = sums.bern_odd_spec.values
    _check_nonzero(bern, 'B_1 of an odd character', ctx.q)
    return GAMMA_PLUS_LOG_2PI + sums.log_gamma_spec.values[1::2] / bern


def even_character_values(ctx, sums):
    ''' L'/L(1, chi_j) for j = 2, 4, ..., q-3 (entry t-1 belongs to j = 2t). '''
    denominator = sums.log_gamma_spec.values[2::2]
    _check_nonzero(denominator, 'logGamma sum of an even character', ctx.q)
    return GAMMA_PLUS_LOG_2PI - 0.5 * sums.s_even_spec.values[1:] / denominator


def _odd_log_gamma_input(ctx, table):
    ''' c-branch of the decimated transform of logGamma(a_k/q).

        A full table gives logGamma(x) - logGamma(1-x) directly; a table of the
        first m entries uses the reflection 2 logGamma(x) + log sin(pi x) - log pi.
    '''
    if table.is_full:
        return dif_split(table.values, CHARACTER_SIGN).c_seq
    if table.k_lo != 0 or table.k_hi < ctx.m:
        raise ValueError('logGamma table for q={} must start at k=0 and cover k < {}'.format(ctx.q, ctx.m))
    x = ctx.a_seq[:ctx.m] / float(ctx.q)
    diff = 2.0 * table.values[:ctx.m] + np.log(np.sin(np.pi * x)) - specfun.LOG_PI
    return twiddles(ctx.q - 1, CHARACTER_SIGN) * diff


def _odd_sum(ctx, cache, workers, imag_tolerance):
    table = _table(ctx, cache, FunctionTag.LOGGAMMA, full=False)
    numerator = dft(_odd_log_gamma_input(ctx, table), CHARACTER_SIGN, workers=workers, decimated=True).values
    bern = bernoulli_spectrum(ctx, workers=workers).values
    ratio_sum, residue = _real_sum(numerator / bern, imag_tolerance, 'q={} odd characters'.format(ctx.q))
    return ctx.m * GAMMA_PLUS_LOG_2PI + ratio_sum, residue


def compute_odd_sum(ctx, cache, workers=None, imag_tolerance=IMAG_TOLERANCE):
    ''' Sum over odd characters of L'/L(1, chi), equal to G_q - G_q^+, from two
        transforms of length (q-1)/2.
    '''
    return _odd_sum(ctx, cache, workers, imag_tolerance)[0]


def _even_sum(ctx, sums, imag_tolerance):
    values = even_character_values(ctx, sums)
    if not values.size:
        return 0.0, 0.0
    return _real_sum(values, imag_tolerance, 'q={} even characters'.format(ctx.q))


def compute_even_part(ctx, caches, workers=None, imag_tolerance=IMAG_TOLERANCE):
    ''' G_q^+ = (q-1)/2 gamma + (q-3)/2 log 2pi - 1/2 sum_{chi even != chi_0} (sum conj(chi) S) / (sum conj(chi) logGamma) '''
    sums = build_character_sums(ctx, caches, workers=workers)
    return specfun.EULER_GAMMA + _even_sum(ctx, sums, imag_tolerance)[0]


def _maxima(odd, even):
    mq_odd = float(np.max(np.abs(odd)))
    mq_even = float(np.max(np.abs(even))) if even.size else 0.0
    return mq_odd, mq_even


def compute_mq(ctx, caches, workers=None):
    ''' (M_q^odd, M_q^even); M_q^even is 0 when there is no nontrivial even character (q = 3). '''
    sums = build_character_sums(ctx, caches, workers=workers)
    return _maxima(odd_character_values(ctx, sums), even_character_values(ctx, sums))


def t_character_values(ctx, caches, workers=None):
    ''' L'/L(1, chi_j) for j = 0, ..., q-2 from the T and digamma tables; entry 0 is nan. '''
    t_table = _table(ctx, caches, FunctionTag.T)
    psi_table = _table(ctx, caches, FunctionTag.PSI)
    t_spec = dft(t_table.values, -CHARACTER_SIGN, workers=workers).values
    psi_spec = dft(psi_table.values, -CHARACTER_SIGN, workers=workers).values
    _check_nonzero(psi_spec[1:], 'digamma sum of a character', ctx.q)
    values = np.empty(ctx.q - 1, dtype=np.complex128)
    values[0] = np.nan
    values[1:] = -math.log(ctx.q) - t_spec[1:] / psi_spec[1:]
    return values


def _result(ctx, ek_plus, ek_diff, maxima, method, imag_tolerance, residue):
    ek = ek_plus + ek_diff
    mq_odd, mq_even = maxima
    mq = max(mq_odd, mq_even)
    log_q = math.log(ctx.q)
    return EKResult(q=ctx.q, ek=ek, ek_plus=ek_plus, ek_diff=ek_diff, mq_odd=mq_odd, mq_even=mq_even, mq=mq,
                    ek_norm=ek / log_q, ek_plus_norm=ek_plus / log_q, mq_norm=mq / math.log(log_q),
                    method=method, imag_residue=residue, imag_tolerance=imag_tolerance)


def compute_ek(ctx, caches, method=Method.S, workers=None, imag_tolerance=IMAG_TOLERANCE):
    method = Method(method)
    if method is Method.BOTH:
        res_s = compute_ek(ctx, caches, Method.S, workers, imag_tolerance)
        res_t = compute_ek(ctx, caches, Method.T, workers, imag_tolerance)
        discrepancy = abs(res_s.ek - res_t.ek)
        logger.info('q=%d: |G_q(S) - G_q(T)| = %.3e', ctx.q, discrepancy)
        d = res_s.as_dict()
        d.update(method=Method.BOTH, method_discrepancy=discrepancy,
                 imag_residue=max(res_s.imag_residue, res_t.imag_residue))
        return EKResult(**d)

    if method is Method.S:
        # the odd part runs on the decimated branch, the per-character values only feed M_q
        ek_diff, res_odd = _odd_sum(ctx, caches, workers, imag_tolerance)
        sums = build_character_sums(ctx, caches, workers=workers)
        even_sum, res_even = _even_sum(ctx, sums, imag_tolerance)
        odd = odd_character_values(ctx, sums)
        even = even_character_values(ctx, sums)
    else:
        values = t_character_values(ctx, caches, workers=workers)
        odd = values[1::2]
        even = values[2::2]
        ek_diff, res_odd = _real_sum(odd, imag_tolerance, 'q={} odd characters'.format(ctx.q))
        even_sum, res_even = _real_sum(even, imag_tolerance, 'q={} even characters'.format(ctx.q)) \
            if even.size else (0.0, 0.0)
    return _result(ctx, specfun.EULER_GAMMA + even_sum, ek_diff, _maxima(odd, even), method, imag_tolerance,
                   max(res_odd, res_even))


def checksum(ctx, cache):
    ''' |sum of the table - closed form|, for a full table. '''
    table = _table(ctx, cache, cache.tag)
    return cache_mod.checksum_residual(table)


def build_caches(ctx, method=Method.S, cfg=specfun.DEFAULT_CONFIG, cache_dir=None, threads=1, n_parts=None,
                 progress=False):
    ''' Tables needed by `method`: loaded from cache_dir when present there,
        otherwise precomputed (and saved to cache_dir part by part).
    '''
    store = cache_mod.CacheDirectory(cache_dir, cfg) if cache_dir else None
    caches = {}
    for tag in required_tags(method):
        if store is not None and store.has(tag, ctx.q):
            caches[tag] = store.load(tag, ctx.q)
            continue
        parts = cache_mod.precompute_chunked(ctx, tag, cfg, n_parts=n_parts or max(1, threads), threads=threads,
                                             progress=progress)
        table = cache_mod.merge(parts)
        residual = cache_mod.checksum_residual(table)
        tolerance = cache_mod.checksum_tolerance(table, cfg)
        logger.debug('q=%d %s checksum residual %.3e (tolerance %.3e)', ctx.q, tag.value, residual, tolerance)
        if residual > tolerance:
            raise cache_mod.ChecksumMismatchError('q={} {}: checksum residual {:.3e} exceeds {:.3e}'.format(
                ctx.q, tag.value, residual, tolerance))
        if store is not None:
            for i, part in enumerate(parts):
                store.save(part, i)
        caches[tag] = table
    return caches
