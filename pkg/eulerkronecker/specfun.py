''' Special functions on (0, 1]: digamma, log-gamma, the series T and S of the
    character-sum formulae, generalized digamma functions psi_n and the
    generalized Euler constants gamma_n.

    Double-precision paths (T, S, S-pair) are numba kernels: a direct sum up to
    a cutoff N followed by an Euler-Maclaurin tail whose integral part is
    expanded in x / N, so no large terms cancel. The integral representation of
    S is evaluated with an exp-sinh double-exponential rule. psi_n and gamma_n
    run in mpmath at `precision_dps` digits, raised by log10((n+1)!) for order
    n, because (log m)^n / m has large cancelling terms for n > 2.
'''
import math
import logging
import functools

import numpy as np
import numba
import mpmath
import scipy.special
from dataclasses import dataclass

from eulerkronecker.analysis_utils import two_sum

logger = logging.getLogger(__name__)


class DomainError(ValueError):
    pass


class NonConvergenceError(ArithmeticError):
    pass


class QuadratureError(ArithmeticError):
    pass


class FormulaDisagreementError(ArithmeticError):
    pass


EULER_GAMMA = 0.57721566490153286061
GAMMA1 = -0.072815845483676724861
LOG_2PI = math.log(2.0 * math.pi)
LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class Constants(object):
    euler_gamma: float = EULER_GAMMA
    gamma1: float = GAMMA1
    zeta_second_deriv_at_0: float = GAMMA1 + EULER_GAMMA ** 2 / 2. - math.pi ** 2 / 24. - LOG_2PI ** 2 / 2.

    def __post_init__(self):
        if not 0.577215 < self.euler_gamma < 0.577216:
            raise ValueError('euler_gamma out of range: {}'.format(self.euler_gamma))
        if not -0.072816 < self.gamma1 < -0.072815:
            raise ValueError('gamma1 out of range: {}'.format(self.gamma1))
        if not -2.006357 < self.zeta_second_deriv_at_0 < -2.006356:
            raise ValueError('zeta_second_deriv_at_0 out of range: {}'.format(self.zeta_second_deriv_at_0))


CONSTANTS = Constants()


@dataclass(frozen=True)
class EvalConfig(object):
    target_abs_error: float = 1e-14
    max_terms: int = 4096
    quadrature_levels: int = 8
    series_switch_threshold: float = 0.05
    precision_dps: int = 40

    def __post_init__(self):
        if not self.target_abs_error > 0:
            raise ValueError('target_abs_error must be positive')
        if self.max_terms < 1:
            raise ValueError('max_terms must be at least 1')
        if self.quadrature_levels < 1:
            raise ValueError('quadrature_levels must be at least 1')
        if not 0 < self.series_switch_threshold <= 0.5:
            raise ValueError('series_switch_threshold must lie in (0, 1/2]')
        if self.precision_dps < 20:
            raise ValueError('precision_dps below 20 cannot resolve gamma_n')

    @classmethod
    def from_config(cls, conf):
        ''' Build from the `evaluation` section of a loaded configuration. '''
        section = conf.get('evaluation', conf)
        fields = ('target_abs_error', 'max_terms', 'quadrature_levels', 'series_switch_threshold', 'precision_dps')
        kwargs = {name: section[name] for name in fields if section.get(name) is not None}
        for name in ('max_terms', 'quadrature_levels', 'precision_dps'):
            if name in kwargs:
                kwargs[name] = int(kwargs[name])
        for name in ('target_abs_error', 'series_switch_threshold'):
            if name in kwargs:
                kwargs[name] = float(kwargs[name])
        return cls(**kwargs)


DEFAULT_CONFIG = EvalConfig()


def _check_domain(x, name, closed_right):
    arr = np.asarray(x, dtype=np.float64)
    upper_ok = (arr <= 1.0) if closed_right else (arr < 1.0)
    if not np.all((arr > 0.0) & upper_ok):
        interval = '(0, 1]' if closed_right else '(0, 1)'
        raise DomainError('{} is defined here on {}, got {}'.format(name, interval, x))
    return arr


def _return(arr, like):
    if np.ndim(like) == 0:
        return float(np.asarray(arr).reshape(-1)[0])
    return arr


def digamma(x):
    arr = _check_domain(x, 'digamma', closed_right=True)
    return _return(scipy.special.digamma(arr), x)


def log_gamma(x):
    arr = _check_domain(x, 'log_gamma', closed_right=False)
    return _return(scipy.special.gammaln(arr), x)


# Euler-Maclaurin kernels

_KMAX = 32
_FACT = np.array([math.factorial(k) for k in range(_KMAX)], dtype=np.float64)
_HARM = np.cumsum(np.concatenate(([0.], 1. / np.arange(1, _KMAX))))
# B_2k / (2k)! for k = 1, 2, 3 and the first neglected one
_EM_COEFF = np.array([1. / 12., -1. / 720., 1. / 30240.])
_EM_NEXT = 1. / 1209600.
_TAYLOR_TERMS = 24


@numba.njit(cache=True)
def _h1_deriv(k, u):
    ''' k-th derivative of log(u) / u. '''
    sign = 1.0 if k % 2 == 0 else -1.0
    return sign * _FACT[k] * (np.log(u) - _HARM[k]) / u ** (k + 1)


@numba.njit(cache=True)
def _h1_bound(k, u):
    return _FACT[k] * (abs(np.log(u)) + _HARM[k]) / u ** (k + 1)


@numba.njit(cache=True)
def _t_series(xs, n_cut):
    out = np.empty(xs.shape[0])
    big_n = float(n_cut)
    log_n = np.log(big_n)
    for i in range(xs.shape[0]):
        x = xs[i]
        s = 0.0
        c = 0.0
        for m in range(1, n_cut):
            mf = float(m)
            s, e = two_sum(s, np.log(mf + x) / (mf + x) - np.log(mf) / mf)
            c += e
        d = np.log1p(x / big_n)
        tail = -0.5 * d * (2.0 * log_n + d)
        tail += 0.5 * (_h1_deriv(0, big_n + x) - _h1_deriv(0, big_n))
        for j in range(_EM_COEFF.shape[0]):
            k = 2 * j + 1
            tail -= _EM_COEFF[j] * (_h1_deriv(k, big_n + x) - _h1_deriv(k, big_n))
        out[i] = -np.log(x) / x - ((s + tail) + c)
    return out


@numba.njit(cache=True)
def _s_series(xs, n_cut, gamma1):
    out = np.empty(xs.shape[0])
    big_n = float(n_cut)
    log_n = np.log(big_n)
    for i in range(xs.shape[0]):
        x = xs[i]
        s = 0.0
        c = 0.0
        for m in range(1, n_cut):
            mf = float(m)
            lm = np.log(mf)
            d = np.log1p(x / mf)
            s, e = two_sum(s, 2.0 * lm * (d - x / mf) + d * d)
            c += e
        # integral of the summand from N to infinity, expanded in x / N
        tail = 0.0
        xp = x
        np_ = 1.0
        for j in range(2, _TAYLOR_TERMS):
            xp *= x
            if j > 2:
                np_ *= big_n
            sign = 1.0 if j % 2 == 0 else -1.0
            tail -= 2.0 * sign * xp * (log_n - _HARM[j - 2]) / (j * (j - 1) * big_n * np_)
        d = np.log1p(x / big_n)
        tail += 0.5 * (2.0 * log_n * (d - x / big_n) + d * d)
        for j in range(_EM_COEFF.shape[0]):
            k = 2 * j + 1
            dk = 2.0 * (_h1_deriv(k - 1, big_n + x) - _h1_deriv(k - 1, big_n)) - 2.0 * x * _h1_deriv(k, big_n)
            tail -= _EM_COEFF[j] * dk
        out[i] = 2.0 * gamma1 * x + np.log(x) ** 2 + ((s + tail) + c)
    return out


@numba.njit(cache=True)
def _s_pair_series(xs, n_cut):
    out = np.empty(xs.shape[0])
    big_n = float(n_cut)
    log_n = np.log(big_n)
    for i in range(xs.shape[0]):
        x = xs[i]
        s = 0.0
        c = 0.0
        for n in range(1, n_cut):
            nf = float(n)
            y = x / nf
            dp = np.log1p(y)
            dm = np.log1p(-y)
            s, e = two_sum(s, 2.0 * np.log(nf) * np.log1p(-y * y) + dp * dp + dm * dm)
            c += e
        tail = 0.0
        x2 = x * x
        xp = 1.0
        np_ = 1.0 / big_n
        for i2 in range(1, _TAYLOR_TERMS // 2):
            j = 2 * i2
            xp *= x2
            np_ *= big_n * big_n
            tail -= 4.0 * xp * (log_n - _HARM[j - 2]) / (j * (j - 1) * np_)
        y = x / big_n
        dp = np.log1p(y)
        dm = np.log1p(-y)
        tail += 0.5 * (2.0 * log_n * np.log1p(-y * y) + dp * dp + dm * dm)
        for j in range(_EM_COEFF.shape[0]):
            k = 2 * j + 1
            dk = 2.0 * (_h1_deriv(k - 1, big_n + x) + _h1_deriv(k - 1, big_n - x) - 2.0 * _h1_deriv(k - 1, big_n))
            tail -= _EM_COEFF[j] * dk
        out[i] = np.log(x) ** 2 + ((s + tail) + c)
    return out


@functools.lru_cache(maxsize=None)
def series_cutoff(target_abs_error, max_terms):
    ''' Smallest power-of-two cutoff whose first neglected Euler-Maclaurin term
        is below the target, for any x in (0, 1].
    '''
    n_cut = 16
    while True:
        remainder = _EM_NEXT * 4.0 * (_h1_bound(7, float(n_cut)) + _h1_bound(8, float(n_cut)))
        if remainder <= target_abs_error:
            return n_cut
        n_cut *= 2
        if n_cut > max_terms:
            raise NonConvergenceError(
                'Euler-Maclaurin tail estimate {:.3e} exceeds {:.3e} at max_terms={}'.format(
                    remainder, target_abs_error, max_terms))


def _cutoff(cfg):
    return series_cutoff(cfg.target_abs_error, cfg.max_terms)


def t_function(x, cfg=DEFAULT_CONFIG):
    ''' T(x) = gamma_1 + psi_1(x) = -log(x)/x - sum_{m>=1} (log(x+m)/(x+m) - log(m)/m).
    '''
    arr = np.atleast_1d(_check_domain(x, 't_function', closed_right=True))
    out = _t_series(np.ascontiguousarray(arr), _cutoff(cfg))
    out[arr == 1.0] = 0.0
    return _return(out, x) if np.ndim(x) == 0 else out


def s_series(x, cfg=DEFAULT_CONFIG):
    ''' S(x) = 2 gamma_1 x + log(x)^2 + sum_{m>=1} (log(x+m)^2 - log(m)^2 - 2 x log(m)/m). '''
    arr = np.atleast_1d(_check_domain(x, 's_series', closed_right=True))
    out = _s_series(np.ascontiguousarray(arr), _cutoff(cfg), CONSTANTS.gamma1)
    out[arr == 1.0] = 0.0
    return _return(out, x) if np.ndim(x) == 0 else out


def s_pair_series(x, cfg=DEFAULT_CONFIG):
    ''' S(x) + S(1-x) = log(x)^2 + sum_{n>=1} (log(n+x)^2 + log(n-x)^2 - 2 log(n)^2). '''
    arr = np.atleast_1d(_check_domain(x, 's_pair_series', closed_right=False))
    out = _s_pair_series(np.ascontiguousarray(arr), _cutoff(cfg))
    return _return(out, x) if np.ndim(x) == 0 else out


# Double-exponential quadrature on (0, inf)

_DE_HALF_WIDTH = 4.5


def _de_partial(func, v, rate):
    # t = exp(v - exp(-v)) / rate
    env = np.exp(-v)
    s = np.exp(v - env)
    t = s / rate
    w = s * (1.0 + env) / rate
    return np.sum(w * func(t))


def de_integrate(func, rate, cfg=DEFAULT_CONFIG):
    ''' Integral of func over (0, inf) for integrands decaying like exp(-rate t)
        with at most a logarithmic singularity at 0.

        The step is halved until two successive levels agree to target/4
        (relative above magnitude one).
    '''
    tol = cfg.target_abs_error / 4.
    h = 1.0
    total = _de_partial(func, np.arange(-_DE_HALF_WIDTH, _DE_HALF_WIDTH + 0.5 * h, h), rate)
    estimate = h * total
    change = np.inf
    for _ in range(cfg.quadrature_levels):
        h /= 2.
        total += _de_partial(func, np.arange(-_DE_HALF_WIDTH + h, _DE_HALF_WIDTH, 2. * h), rate)
        new_estimate = h * total
        change = abs(new_estimate - estimate)
        if change <= tol * max(1.0, abs(new_estimate)):
            return new_estimate
        estimate = new_estimate
    raise QuadratureError('No agreement after {} levels (last change {:.3e})'.format(cfg.quadrature_levels, change))


# Below this t the numerators are summed from their Taylor series; both vanish like t^2.
_SMALL_T = 0.5
_NUM_TAYLOR = 22


def _numerator(t, coeffs, direct):
    out = np.empty_like(t)
    small = t < _SMALL_T
    ts = t[small]
    acc = np.zeros_like(ts)
    for c in coeffs[:1:-1]:  # Horner down to the t^2 coefficient
        acc = acc * ts + c
    out[small] = acc * ts * ts
    out[~small] = direct(t[~small])
    return out


def _s_integrand(x):
    ''' 2 ((x-1) e^-t (1 - e^-t) + e^-xt - e^-t) / (1 - e^-t) (gamma + log t) / t '''
    g = CONSTANTS.euler_gamma
    k = np.arange(_NUM_TAYLOR)
    fact = np.array([math.factorial(i) for i in k], dtype=np.float64)
    coeffs = (-1.0) ** k * ((x - 1.0) * (1.0 - 2.0 ** k) + x ** k - 1.0) / fact

    def direct(t):
        e1 = np.exp(-t)
        return (x - 1.0) * e1 * (1.0 - e1) + np.exp(-x * t) - e1

    def integrand(t):
        num = _numerator(t, coeffs, direct)
        return 2.0 * num / (-np.expm1(-t)) * (g + np.log(t)) / t
    return integrand


def _s_pair_integrand(x):
    ''' 2 (e^-xt + e^-(1-x)t - 3 e^-t + e^-2t) / (1 - e^-t) (gamma + log t) / t '''
    g = CONSTANTS.euler_gamma
    y = 1.0 - x
    k = np.arange(_NUM_TAYLOR)
    fact = np.array([math.factorial(i) for i in k], dtype=np.float64)
    coeffs = (-1.0) ** k * (x ** k + y ** k + 2.0 ** k - 3.0) / fact

    def direct(t):
        return np.exp(-x * t) + np.exp(-y * t) - 3.0 * np.exp(-t) + np.exp(-2.0 * t)

    def integrand(t):
        num = _numerator(t, coeffs, direct)
        return 2.0 * num / (-np.expm1(-t)) * (g + np.log(t)) / t
    return integrand


def s_integral(x, cfg=DEFAULT_CONFIG):
    ''' S(x) = 2 int_0^inf ((x-1) e^-t + (e^-xt - e^-t) / (1 - e^-t)) (gamma + log t) / t dt.
    '''
    x = float(_check_domain(x, 's_integral', closed_right=True))
    if x == 1.0:
        return 0.0
    return de_integrate(_s_integrand(x), x, cfg)


def s_pair_integral(x, cfg=DEFAULT_CONFIG):
    ''' S(x) + S(1-x) as one integral,

        2 int_0^inf (e^-xt + e^-(1-x)t - 3 e^-t + e^-2t) / (1 - e^-t) (gamma + log t) / t dt,

        which equals 2 int (-3 + e^-t + e^xt + e^(1-x)t) / (e^t - 1) (gamma + log t) / t dt.
        The integrand decays like exp(-min(x, 1-x) t).
    '''
    x = float(_check_domain(x, 's_pair_integral', closed_right=False))
    return de_integrate(_s_pair_integrand(x), min(x, 1.0 - x), cfg)


def _dispatch(arr, cfg, integral, series):
    out = np.empty(arr.shape[0])
    c = np.minimum(arr, 1.0 - arr)
    use_integral = c >= cfg.series_switch_threshold
    if np.any(~use_integral):
        out[~use_integral] = series(arr[~use_integral], cfg)
    for i in np.nonzero(use_integral)[0]:
        out[i] = integral(arr[i], cfg)
    return out


def s_function(x, cfg=DEFAULT_CONFIG):
    ''' S(x), by quadrature when min(x, 1-x) >= series_switch_threshold, else by series. '''
    arr = np.atleast_1d(_check_domain(x, 's_function', closed_right=True))
    out = _dispatch(arr, cfg, s_integral, s_series)
    out[arr == 1.0] = 0.0
    return _return(out, x) if np.ndim(x) == 0 else out


def s_pair(x, cfg=DEFAULT_CONFIG):
    ''' S(x) + S(1-x) from the symmetric representations, one evaluation per pair. '''
    arr = np.atleast_1d(_check_domain(x, 's_pair', closed_right=False))
    out = _dispatch(arr, cfg, s_pair_integral, s_pair_series)
    return _return(out, x) if np.ndim(x) == 0 else out


# Multiprecision paths: h_n(u) = log(u)^n / u and its derivatives

@functools.lru_cache(maxsize=None)
def _h_polys(n, kmax):
    ''' Integer coefficients (ascending in L = log u) of P_k with
        h_n^(k)(u) = P_k(log u) / u^(k+1), for 0 <= k <= kmax.
    '''
    polys = [tuple([0] * n + [1])]
    for k in range(kmax):
        p = polys[-1]
        deriv = [i * p[i] for i in range(1, len(p))] + [0]
        polys.append(tuple(deriv[i] - (k + 1) * p[i] for i in range(len(p))))
    return tuple(polys)


def _h(n, k, u, polys):
    lu = mpmath.log(u)
    return mpmath.polyval(list(reversed(polys[k])), lu) / u ** (k + 1)


def _em_tail(value, derivative, integral, tol, kmax):
    ''' sum_{m >= N} f(m) = int_N^inf f + f(N)/2 - sum_k B_2k/(2k)! f^(2k-1)(N).

        Returns None when the asymptotic terms start growing before reaching tol.
    '''
    total = integral + value / 2
    previous = mpmath.inf
    for k in range(1, kmax // 2 + 1):
        term = mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) * derivative(2 * k - 1)
        if abs(term) > abs(previous):
            return None
        total -= term
        if abs(term) < tol:
            return total
        previous = term
    return None


_EM_ORDER = 40


def _mp_series(direct_term, tail_at, n_start, cfg, what):
    n_cut = n_start
    tol = mpmath.mpf(10) ** (-(cfg.precision_dps - 8))
    while n_cut <= max(cfg.max_terms, n_start):
        tail = tail_at(n_cut, tol)
        if tail is not None:
            return mpmath.fsum(direct_term(m) for m in range(1, n_cut)) + tail
        n_cut *= 2
    raise NonConvergenceError('{}: Euler-Maclaurin tail did not settle below max_terms={}'.format(what, cfg.max_terms))


def _binomial_tail_sum(n, lm, d, j_max):
    ''' (1 / (n+1)) sum_{j=0}^{j_max} binom(n+1, j) L^j d^(n+1-j) '''
    return mpmath.fsum(mpmath.binomial(n + 1, j) * lm ** j * d ** (n + 1 - j) for j in range(j_max + 1)) / (n + 1)


def _gamma_n_mp(n, cfg, formula):
    polys = _h_polys(n, _EM_ORDER)
    p = n + 1

    def big_f(u):
        return mpmath.log(u) ** p / p

    def antiderivative_f(u):
        lu = mpmath.log(u)
        return u * mpmath.fsum((-1) ** (p - i) * mpmath.factorial(p) / mpmath.factorial(i) * lu ** i
                               for i in range(p + 1)) / p

    def term_a(m):
        lm = mpmath.log(m)
        d = mpmath.log1p(mpmath.mpf(1) / m)
        return lm ** n / m - _binomial_tail_sum(n, lm, d, n)

    def term_b(m):
        lm = mpmath.log(m)
        d = mpmath.log1p(mpmath.mpf(1) / m)
        return lm ** n * (mpmath.mpf(1) / m - d) - _binomial_tail_sum(n, lm, d, n - 1)

    term = term_a if formula == 'a' else term_b

    def tail_at(n_cut, tol):
        big_n = mpmath.mpf(n_cut)

        def derivative(k):
            return _h(n, k, big_n, polys) - _h(n, k - 1, big_n + 1, polys) + _h(n, k - 1, big_n, polys)

        integral = -big_f(big_n) + antiderivative_f(big_n + 1) - antiderivative_f(big_n)
        return _em_tail(term(big_n), derivative, integral, tol, _EM_ORDER)

    # distinct cutoffs so the two formulas also exercise different tails
    n_start = 40 if formula == 'a' else 57
    return _mp_series(term, tail_at, n_start, cfg, 'gamma_n({})'.format(n))


def _working_dps(n, cfg):
    ''' Digits for order n: the antiderivative differences cancel terms of size (n+1)! N. '''
    return cfg.precision_dps + int(math.lgamma(n + 2) / math.log(10)) + 1


@functools.lru_cache(maxsize=None)
def _gamma_n_cached(n, cfg):
    with mpmath.workdps(_working_dps(n, cfg)):
        value_a = _gamma_n_mp(n, cfg, 'a')
        value_b = _gamma_n_mp(n, cfg, 'b')
        if abs(value_a - value_b) > mpmath.mpf('1e-12'):
            raise FormulaDisagreementError('gamma_n({}): formulas differ by {}'.format(
                n, mpmath.nstr(abs(value_a - value_b), 5)))
        logger.debug('gamma_n(%d): formulas agree to %s', n, mpmath.nstr(abs(value_a - value_b), 3))
        return +value_a


GAMMA_N_MAX = 30


def _check_order(n, name):
    n = int(n)
    if not 0 <= n <= GAMMA_N_MAX:
        raise DomainError('{} needs 0 <= n <= {}, got {}'.format(name, GAMMA_N_MAX, n))
    return n


def gamma_n_mpf(n, cfg=DEFAULT_CONFIG):
    ''' gamma_n as an mpf carrying the working precision of order n. '''
    return _gamma_n_cached(_check_order(n, 'gamma_n'), cfg)


def gamma_n(n, cfg=DEFAULT_CONFIG):
    ''' Generalized Euler constant gamma_n from two rearrangements of

        gamma_n = sum_{m>=1} (log(m)^n / m - (log(m+1)^(n+1) - log(m)^(n+1)) / (n+1)),

        accepted only when both agree to 1e-12.
    '''
    return float(gamma_n_mpf(n, cfg))


def psi_n_mpf(n, x, cfg=DEFAULT_CONFIG):
    ''' psi_n(x) as an mpf; x may be an exact mpmath value such as mpf(a) / q. '''
    n = _check_order(n, 'psi_n')
    polys = _h_polys(n, _EM_ORDER)

    with mpmath.workdps(_working_dps(n, cfg)):
        xm = mpmath.mpf(x)
        if not 0 < xm <= 1:
            raise DomainError('psi_n needs 0 < x <= 1, got {}'.format(x))

        def term(m):
            return _h(n, 0, m + xm, polys) - _h(n, 0, mpmath.mpf(m), polys)

        def tail_at(n_cut, tol):
            big_n = mpmath.mpf(n_cut)

            def derivative(k):
                return _h(n, k, big_n + xm, polys) - _h(n, k, big_n, polys)

            integral = -(mpmath.log(big_n + xm) ** (n + 1) - mpmath.log(big_n) ** (n + 1)) / (n + 1)
            return _em_tail(term(big_n), derivative, integral, tol, _EM_ORDER)

        series = _mp_series(term, tail_at, 32, cfg, 'psi_n({}, {})'.format(n, x))
        return -_gamma_n_cached(n, cfg) - _h(n, 0, xm, polys) - series


def psi_n(n, x, cfg=DEFAULT_CONFIG):
    ''' Generalized digamma function

        psi_n(x) = -gamma_n - log(x)^n / x - sum_{m>=1} (log(m+x)^n / (m+x) - log(m)^n / m).
    '''
    _check_order(n, 'psi_n')
    _check_domain(x, 'psi_n', closed_right=True)
    return float(psi_n_mpf(n, float(x), cfg))
