''' Unnormalized discrete Fourier transforms of arbitrary length and the
    decimation-in-frequency split into even and odd output bins.

    Spectrum[j] = sum_k e(sign * j * k / N) x[k] with e(t) = exp(2 pi i t).
    The transforms are delegated to scipy.fft (pocketfft: mixed radix for smooth
    factors, Bluestein chirp-z for large prime factors).
'''
import logging

import numpy as np
import scipy.fft
from dataclasses import dataclass

logger = logging.getLogger(__name__)

NAIVE_MAX_LENGTH = 10000


class LengthGuardError(ValueError):
    pass


class OddLengthError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum(object):
    values: np.ndarray
    sign: int
    decimated: bool = False

    @property
    def length(self):
        return self.values.shape[0]

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, j):
        return self.values[j]


@dataclass(frozen=True, eq=False)
class DIFPair(object):
    ''' Inputs of the two half-length transforms. dft(b_seq) gives the even
        bins j = 2t of the full transform, dft(c_seq) the odd bins j = 2t + 1.
    '''
    b_seq: np.ndarray
    c_seq: np.ndarray
    sign: int

    @property
    def m(self):
        return self.b_seq.shape[0]


def _check_sign(sign):
    if sign not in (1, -1):
        raise ValueError('sign must be +1 or -1, got {}'.format(sign))


def _as_sequence(x):
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValueError('Expected a non-empty one-dimensional sequence')
    if not np.iscomplexobj(x):
        x = x.astype(np.float64)
    return x


def dft(x, sign, workers=None, decimated=False):
    ''' Unnormalized transform with exponent sign `sign`.

        A single one-dimensional transform is computed by one worker, so the
        result does not depend on `workers`.
    '''
    _check_sign(sign)
    x = _as_sequence(x)
    if sign == -1:
        values = scipy.fft.fft(x, workers=workers)
    else:
        values = scipy.fft.ifft(x, norm='forward', workers=workers)
    return Spectrum(values=values, sign=sign, decimated=decimated)


def inverse_dft(spectrum, workers=None):
    ''' Undo dft(): flip the sign and divide by N. '''
    back = dft(spectrum.values, -spectrum.sign, workers=workers)
    return back.values / spectrum.length


def naive_dft(x, sign, block=256):
    ''' Direct O(N^2) evaluation, used as a test oracle.
    '''
    _check_sign(sign)
    x = _as_sequence(x).astype(np.complex128)
    n = x.shape[0]
    if n > NAIVE_MAX_LENGTH:
        raise LengthGuardError('naive_dft refuses length {} > {}'.format(n, NAIVE_MAX_LENGTH))

    k = np.arange(n, dtype=np.int64)
    values = np.empty(n, dtype=np.complex128)
    for start in range(0, n, block):
        j = k[start:start + block]
        jk = np.outer(j, k) % n  # exact phase reduction before scaling
        values[start:start + block] = np.exp(sign * 2j * np.pi * jk / n).dot(x)
    return Spectrum(values=values, sign=sign, decimated=False)


def twiddles(n, sign):
    ''' e(sign * k / n) for 0 <= k < n / 2. '''
    k = np.arange(n // 2, dtype=np.float64)
    return np.exp(sign * 2j * np.pi * k / n)


def dif_split(f_vals, sign):
    _check_sign(sign)
    f_vals = _as_sequence(f_vals)
    n = f_vals.shape[0]
    if n % 2:
        raise OddLengthError('Decimation in frequency needs an even length, got {}'.format(n))
    m = n // 2
    b_seq = f_vals[:m] + f_vals[m:]
    c_seq = twiddles(n, sign) * (f_vals[:m] - f_vals[m:])
    return DIFPair(b_seq=b_seq, c_seq=c_seq, sign=sign)


def dif_spectra(pair, workers=None):
    ''' Half-length spectra (even bins, odd bins) of a DIFPair. '''
    even = dft(pair.b_seq, pair.sign, workers=workers, decimated=True)
    odd = dft(pair.c_seq, pair.sign, workers=workers, decimated=True)
    return even, odd
