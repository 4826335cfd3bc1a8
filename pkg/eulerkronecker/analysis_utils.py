import multiprocessing as mp
import logging

import numpy as np
import numba
from tqdm import tqdm

logger = logging.getLogger('Analysis')


@numba.njit(cache=True)
def two_sum(a, b):
    ''' Error-free transformation: a + b = s + e exactly.
    '''
    s = a + b
    bp = s - a
    ap = s - bp
    e = (a - ap) + (b - bp)
    return s, e


@numba.njit(cache=True)
def compensated_sum(values):
    ''' Neumaier summation of a float64 array.
    '''
    s = 0.0
    c = 0.0
    for i in range(values.shape[0]):
        s, e = two_sum(s, values[i])
        c += e
    return s + c


@numba.njit(cache=True)
def compensated_sum_complex(values):
    re = np.empty(values.shape[0])
    im = np.empty(values.shape[0])
    for i in range(values.shape[0]):
        re[i] = values[i].real
        im[i] = values[i].imag
    return compensated_sum(re) + 1j * compensated_sum(im)


def fsum(values):
    ''' Compensated sum of any real or complex sequence.
    '''
    arr = np.asarray(values)
    if arr.size == 0:
        return 0.0
    if np.iscomplexobj(arr):
        return complex(compensated_sum_complex(np.ascontiguousarray(arr, dtype=np.complex128).ravel()))
    return float(compensated_sum(np.ascontiguousarray(arr, dtype=np.float64).ravel()))


def imap_bar(func, args, n_processes=None, desc=None, disable=False):
    ''' Apply function (func) to interable (args) with progressbar

        Results keep the order of args. With n_processes <= 1 everything runs in
        the calling process.
    '''
    args = list(args)
    res_list = []
    pbar = tqdm(total=len(args), desc=desc, disable=disable)
    if n_processes is not None and n_processes <= 1:
        for arg in args:
            res_list.append(func(arg))
            pbar.update()
        pbar.close()
        return res_list

    p = mp.Pool(n_processes)
    try:
        for res in p.imap(func, args):
            pbar.update()
            res_list.append(res)
    finally:
        pbar.close()
        p.close()
        p.join()
    return res_list
