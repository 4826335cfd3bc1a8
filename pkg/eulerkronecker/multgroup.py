''' Arithmetic of the multiplicative group of integers modulo an odd prime q:
    primality, primitive roots and the index sequence a_k = g^k mod q used to
    turn character sums into discrete Fourier transforms.
'''
import logging

import numpy as np
import numba
from dataclasses import dataclass
from sympy import factorint

logger = logging.getLogger(__name__)

# Deterministic for every n < 3.18e23, in particular the whole 64-bit range.
MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Transform lengths q - 1 beyond 2**31 are not supported.
MAX_MODULUS = 2 ** 31


class NotPrimeError(ValueError):
    pass


def is_prime(n):
    ''' Deterministic Miller-Rabin test.
    '''
    n = int(n)
    if n < 2:
        return False
    for p in MR_WITNESSES:
        if n % p == 0:
            return n == p

    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1

    for a in MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_odd_prime(q):
    q = int(q)
    if q < 3 or not is_prime(q):
        raise NotPrimeError('{} is not an odd prime'.format(q))
    return q


def primitive_root(q):
    ''' Smallest generator of the multiplicative group mod q.

        g is a generator iff g^((q-1)/p) != 1 mod q for every prime p | q-1.
    '''
    q = check_odd_prime(q)
    factors = sorted(factorint(q - 1))
    for g in range(2, q):
        if all(pow(g, (q - 1) // p, q) != 1 for p in factors):
            return g
    raise ArithmeticError('No primitive root found for q={}'.format(q))  # unreachable for prime q


@numba.njit(cache=True)
def _power_sequence(g, q, n):
    out = np.empty(n, dtype=np.int64)
    a = 1
    for k in range(n):
        out[k] = a
        a = (a * g) % q
    return out


@dataclass(frozen=True, eq=False)
class PrimeContext(object):
    ''' An odd prime q, its smallest primitive root g and a_seq[k] = g^k mod q.
    '''
    q: int
    g: int
    a_seq: np.ndarray
    m: int

    @property
    def x_seq(self):
        ''' The arguments a_k / q in index order. '''
        return self.a_seq / float(self.q)


def build_context(q):
    q = check_odd_prime(q)
    if q > MAX_MODULUS:
        raise ValueError('q={} exceeds the supported modulus 2**31'.format(q))
    g = primitive_root(q)
    a_seq = _power_sequence(g, q, q - 1)
    a_seq.setflags(write=False)
    logger.debug('q=%d: primitive root g=%d', q, g)
    return PrimeContext(q=q, g=g, a_seq=a_seq, m=(q - 1) // 2)
