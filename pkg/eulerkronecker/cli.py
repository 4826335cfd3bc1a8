''' Command line entry point `ek`.

    Exit codes: 0 success, 1 computation or I/O failure, 2 usage error.
'''
import os
import sys
import logging
import argparse

from eulerkronecker import __version__
from eulerkronecker import ek
from eulerkronecker import cache
from eulerkronecker import offsets
from eulerkronecker import specfun
from eulerkronecker import stieltjes
from eulerkronecker.config import CACHE_ENV, load_config
from eulerkronecker.multgroup import build_context
from eulerkronecker.scans.ek_scan import EKScan, format_rows
from eulerkronecker.scans.candidate_scan import CandidateScan

logging.basicConfig(
    format="%(asctime)s - [%(name)-8s] - %(levelname)-7s %(message)s")
loglevel = logging.INFO

logger = logging.getLogger('ek')

TAGS = [tag.value for tag in cache.FunctionTag]


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--conf', default=None, help='YAML file merged over the packaged defaults')
    common.add_argument('--digits', type=int, default=None, help='Decimals of printed values')
    common.add_argument('--cache', default=None, help='Cache directory (default: $EK_CACHE_DIR)')
    common.add_argument('--threads', type=int, default=None, help='Worker processes')
    common.add_argument('--out', default=None, help='Output file instead of standard output')
    common.add_argument('-v', '--verbose', action='store_true')

    method = argparse.ArgumentParser(add_help=False)
    method.add_argument('--method', choices=[m.value for m in ek.Method], default='s')

    tag = argparse.ArgumentParser(add_help=False)
    tag.add_argument('--tag', choices=TAGS, required=True)

    parser = argparse.ArgumentParser(prog='ek', description='Euler-Kronecker constants of prime cyclotomic fields')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('compute', parents=[common, method], help='Constants for one prime q')
    p.add_argument('q', type=int)
    p.add_argument('--with-vq', action='store_true')

    p = sub.add_parser('scan', parents=[common, method], help='CSV rows for all primes in a range')
    p.add_argument('q_min', type=int)
    p.add_argument('q_max', type=int)
    p.add_argument('--with-vq', action='store_true')
    p.add_argument('--h5', default=None, help='Also write an HDF5 results file')

    p = sub.add_parser('precompute', parents=[common, tag], help='Tabulate a function over a_k / q')
    p.add_argument('q', type=int)
    p.add_argument('--range', nargs=2, type=int, metavar=('K0', 'K1'), default=None)
    p.add_argument('--part', type=int, default=0)

    p = sub.add_parser('merge', parents=[common, tag], help='Merge cache parts into one file')
    p.add_argument('q', type=int)

    p = sub.add_parser('checksum', parents=[common, tag], help='Closed-form residual of a cache')
    p.add_argument('q', type=int)

    p = sub.add_parser('stieltjes', parents=[common], help='gamma_k(a, q)')
    p.add_argument('k', type=int)
    p.add_argument('a', type=int)
    p.add_argument('q', type=int)

    p = sub.add_parser('stieltjes-table', parents=[common], help='gamma_k(a, q) for all k <= K_MAX and 1 <= a <= q')
    p.add_argument('k_max', type=int)
    p.add_argument('q', type=int)

    p = sub.add_parser('gamma01', parents=[common], help='gamma_0(a, q) and gamma_1(a, q) from the digamma and T caches')
    p.add_argument('q', type=int)

    p = sub.add_parser('gamma-n', parents=[common], help='Generalized Euler constant gamma_n')
    p.add_argument('n', type=int)

    p = sub.add_parser('offsets', parents=[common], help='Greedy sequence of prime offsets')
    p.add_argument('count', type=int)

    p = sub.add_parser('vq', parents=[common], help='v(q) over the first 2089 offsets')
    p.add_argument('q', type=int)

    p = sub.add_parser('candidates', parents=[common], help='Primes with v(q) above a threshold')
    p.add_argument('q_min', type=int)
    p.add_argument('q_max', type=int)
    p.add_argument('--threshold', type=float, default=1.2)
    p.add_argument('--h5', default=None, help='Also write an HDF5 results file')
    return parser


def _emit(lines, out):
    if out is None:
        for line in lines:
            print(line)
        return
    directory = os.path.dirname(os.path.abspath(out))
    if not os.path.exists(directory):
        os.makedirs(directory)
    with open(out, 'w') as f:
        for line in lines:
            f.write(line + '\n')
    logger.info('Wrote %s', out)


def _fmt(value, digits):
    return '{:.{}f}'.format(value, digits)


def _store(args, conf, cfg):
    directory = conf['cache']['directory']
    if not directory:
        raise ValueError('{} needs --cache DIR or {}'.format(args.command, CACHE_ENV))
    return cache.CacheDirectory(directory, cfg)


def cmd_compute(args, conf, cfg):
    ctx = build_context(args.q)
    caches = ek.build_caches(ctx, args.method, cfg, cache_dir=conf['cache']['directory'],
                             threads=conf['run']['threads'])
    res = ek.compute_ek(ctx, caches, args.method, imag_tolerance=conf['output']['imag_tolerance'])
    digits = conf['output']['digits']
    lines = []
    for name, value in res.as_dict().items():
        if isinstance(value, float):
            value = _fmt(value, digits)
        lines.append('{} = {}'.format(name, value))
    if args.with_vq:
        lines.append('v_q = {}'.format(_fmt(offsets.v_of_q(args.q), digits)))
    _emit(lines, args.out)
    return 0


def cmd_scan(args, conf, cfg):
    if args.q_min > args.q_max:
        raise ValueError('Empty range [{}, {}]'.format(args.q_min, args.q_max))
    scan = EKScan(filename=args.h5, record=args.h5 is not None)
    rows = scan.start(q_min=args.q_min, q_max=args.q_max, method=args.method, cfg=cfg,
                      cache_dir=conf['cache']['directory'], threads=conf['run']['threads'],
                      with_vq=args.with_vq, imag_tolerance=conf['output']['imag_tolerance'])
    scan.analyze()
    _emit(format_rows(rows, conf['output']['digits']), args.out)
    return 0


def cmd_precompute(args, conf, cfg):
    ctx = build_context(args.q)
    digits = conf['cache']['digits']
    if args.range is not None:
        parts = [cache.precompute(ctx, args.tag, tuple(args.range), cfg, digits)]
        first_part = args.part
    else:
        parts = cache.precompute_chunked(ctx, args.tag, cfg, n_parts=conf['run']['threads'],
                                         threads=conf['run']['threads'], digits=digits)
        first_part = 0

    if args.out is not None:
        if len(parts) > 1:
            parts = [cache.merge(parts)]
        cache.save(parts[0], args.out)
    else:
        store = _store(args, conf, cfg)
        for i, part in enumerate(parts):
            store.save(part, first_part + i)
    return 0


def cmd_merge(args, conf, cfg):
    table = _store(args, conf, cfg).load(args.tag, args.q)
    if args.out is not None:
        cache.save(table, args.out)
    print('{} q={} k=[{}, {}) sum={}'.format(table.tag.value, table.q, table.k_lo, table.k_hi,
                                             _fmt(table.partial_sum, conf['output']['digits'])))
    return 0


def cmd_checksum(args, conf, cfg):
    store = _store(args, conf, cfg)
    files = store.part_files(args.tag, args.q)
    if not files:
        raise IOError('No {} cache for q={} in {}'.format(args.tag, args.q, store.directory))
    table = cache.merge([cache.load(name, cfg, verify=False) for name in files])
    ctx = build_context(args.q)
    residual = ek.checksum(ctx, table)
    tolerance = cache.checksum_tolerance(table, cfg)
    print('{} q={} residual={:.3e} tolerance={:.3e}'.format(args.tag, args.q, residual, tolerance))
    return 0 if residual <= tolerance else 1


def cmd_stieltjes(args, conf, cfg):
    value = stieltjes.gammak_aq(args.k, args.a, args.q, cfg)
    _emit([_fmt(value, conf['output']['digits'])], args.out)
    return 0


def cmd_stieltjes_table(args, conf, cfg):
    table = stieltjes.build_table(args.q, args.k_max, cfg, threads=conf['run']['threads'], progress=args.verbose)
    digits = conf['output']['digits']
    lines = ['k,a,gamma_k']
    for k in range(table.k_max + 1):
        lines += ['{},{},{}'.format(k, a, _fmt(table[k, a], digits)) for a in range(1, table.q + 1)]
    _emit(lines, args.out)
    return 0


def cmd_gamma01(args, conf, cfg):
    ctx = build_context(args.q)
    caches = ek.build_caches(ctx, ek.Method.T, cfg, cache_dir=conf['cache']['directory'],
                             threads=conf['run']['threads'])
    g0, g1 = stieltjes.gamma01_from_tables(ctx, caches[cache.FunctionTag.PSI], caches[cache.FunctionTag.T])
    digits = conf['output']['digits']
    lines = ['a,gamma_0,gamma_1']
    lines += ['{},{},{}'.format(a, _fmt(g0[a - 1], digits), _fmt(g1[a - 1], digits)) for a in range(1, ctx.q + 1)]
    _emit(lines, args.out)
    return 0


def cmd_gamma_n(args, conf, cfg):
    _emit([_fmt(specfun.gamma_n(args.n, cfg), conf['output']['digits'])], args.out)
    return 0


def cmd_offsets(args, conf, cfg):
    seq = offsets.greedy_offsets(args.count)
    lines = [' '.join(str(b) for b in seq.b)]
    if seq.count > 1:
        lines.append('m = {}'.format(_fmt(offsets.offsets_sum(seq), conf['output']['digits'])))
    _emit(lines, args.out)
    return 0


def cmd_vq(args, conf, cfg):
    _emit([_fmt(offsets.v_of_q(args.q), conf['output']['digits'])], args.out)
    return 0


def cmd_candidates(args, conf, cfg):
    scan = CandidateScan(filename=args.h5, record=args.h5 is not None)
    found = scan.start(q_min=args.q_min, q_max=args.q_max, threshold=args.threshold,
                       threads=conf['run']['threads'])
    digits = conf['output']['digits']
    _emit(['{},{}'.format(int(q), _fmt(v, digits)) for q, v in found], args.out)
    return 0


COMMANDS = {
    'compute': cmd_compute,
    'scan': cmd_scan,
    'precompute': cmd_precompute,
    'merge': cmd_merge,
    'checksum': cmd_checksum,
    'stieltjes': cmd_stieltjes,
    'stieltjes-table': cmd_stieltjes_table,
    'gamma01': cmd_gamma01,
    'gamma-n': cmd_gamma_n,
    'offsets': cmd_offsets,
    'vq': cmd_vq,
    'candidates': cmd_candidates,
}


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.getLogger().setLevel(logging.DEBUG if args.verbose else loglevel)

    try:
        conf = load_config(args.conf,
                           cache={'directory': args.cache},
                           output={'digits': args.digits},
                           run={'threads': args.threads})
        cfg = specfun.EvalConfig.from_config(conf)
        return COMMANDS[args.command](args, conf, cfg)
    except (cache.CacheFormatError, cache.CacheMismatchError) as e:
        logger.error(str(e))
        print('error: {}'.format(e), file=sys.stderr)
        return 1
    except ValueError as e:
        print('usage error: {}'.format(e), file=sys.stderr)
        return 2
    except (ArithmeticError, IOError, OSError) as e:
        logger.error(str(e))
        print('error: {}'.format(e), file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
