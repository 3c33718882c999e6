# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import argparse
import logging
import sys
from typing import List, Optional

from src.cli.Commands import (
    DEFAULT_QPS,
    PSE_MODELS,
    cmd_bd_rate,
    cmd_decode,
    cmd_encode,
    cmd_metrics,
    cmd_pse_experiment,
    cmd_rd_sweep,
    cmd_textures,
)
from src.cli.Utils import SEED_ENV_VAR, format_value, parse_int_list, write_csv
from src.codec import SCENARIOS
from src.eval import DEFAULT_TRAINING_SIZES

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2


def _int_list(text: str) -> List[int]:
    try:
        return parse_int_list(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _add_codec_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--block-size', type=int, default=16, help='Block size n (default 16)')
    parser.add_argument('--clusters', type=int, default=8, help='Number of clusters K (default 8)')
    parser.add_argument('--rho', type=float, default=0.1, help='Centroid learning rate (default 0.1)')
    parser.add_argument('--alpha', type=float, default=1e-2, help='Weight regularizer (default 1e-2)')
    parser.add_argument('--m-min', type=int, default=4,
                        help='Samples a cluster needs before its GBT is used (default 4)')
    parser.add_argument('--transforms', choices=sorted(SCENARIOS), default='dct+gbt',
                        help='Transform scenario (default dct+gbt)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='gbtc',
        description='Intra codec with online-learned path graph transforms, plus its evaluation tools.',
        epilog=f'Exit codes: 0 success, 1 I/O failure, 2 invalid input. '
               f'{SEED_ENV_VAR} sets the default seed of seeded commands.',
    )
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging on stderr')
    sub = parser.add_subparsers(dest='command', required=True)

    encode = sub.add_parser('encode', help='Encode a PGM image',
                            description='Prints one CSV line: rate_bpp,psnr,gbt_usage')
    encode.add_argument('input', help='Input PGM (P5, 8-bit)')
    encode.add_argument('output', help='Output stream')
    encode.add_argument('--qp', type=int, default=27, help='Quantization parameter 0..51 (default 27)')
    _add_codec_flags(encode)
    encode.add_argument('--dump-state', help='Write the final cluster-state dump here')

    decode = sub.add_parser('decode', help='Decode a stream to PGM')
    decode.add_argument('input', help='Input stream')
    decode.add_argument('output', help='Output PGM')
    decode.add_argument('--dump-state', help='Write the final cluster-state dump here')

    pse = sub.add_parser('pse-experiment', help='PSE of DCT, GBT and KLT on a path GMRF',
                         description='CSV columns: training_size,dct,gbt,klt')
    pse.add_argument('--model', choices=PSE_MODELS, default='uniform')
    pse.add_argument('--sizes', type=_int_list,
                     default=list(DEFAULT_TRAINING_SIZES), help='Comma-separated training sizes')
    pse.add_argument('--trials', type=int, default=20)
    pse.add_argument('--test-size', type=int, default=1000)
    pse.add_argument('--seed', type=int, default=None)
    pse.add_argument('--out', help='CSV path (stdout when omitted)')

    metrics = sub.add_parser('metrics', help='Compare two PGM images',
                             description='Prints one CSV line: psnr,ssim,glnu_a,glnu_b')
    metrics.add_argument('a', help='Reference PGM')
    metrics.add_argument('b', help='Distorted PGM')

    bd = sub.add_parser('bd-rate', help='BD-rate between two rd-sweep CSV files',
                        description='Prints bd_rate (suite mean of per-image values) and, when '
                                    'GLNU is known, the uniform / non_uniform split')
    bd.add_argument('anchor', help='Anchor rd-sweep CSV')
    bd.add_argument('test', help='Test rd-sweep CSV')

    sweep = sub.add_parser('rd-sweep', help='Encode every PGM of a directory at several QPs',
                           description='CSV columns: image,qp,rate_bpp,psnr,ssim,gbt_usage,glnu; '
                                       'rows sorted by image then qp')
    sweep.add_argument('input_dir', help='Directory of PGM images')
    sweep.add_argument('--qps', type=_int_list, default=list(DEFAULT_QPS),
                       help='Comma-separated QPs (default 23,27,31,35,39)')
    _add_codec_flags(sweep)
    sweep.add_argument('--workers', type=int, default=1, help='Parallel encoder processes')
    sweep.add_argument('--out', help='CSV path (stdout when omitted)')

    textures = sub.add_parser('textures', help='Write the synthetic texture suite')
    textures.add_argument('output_dir')
    textures.add_argument('--count', type=int, default=10)
    textures.add_argument('--size', type=int, default=320)
    textures.add_argument('--seed', type=int, default=None)
    return parser


def _codec_kwargs(args: argparse.Namespace) -> dict:
    return {
        'block_size': args.block_size,
        'clusters': args.clusters,
        'rho': args.rho,
        'alpha': args.alpha,
        'm_min': args.m_min,
        'transforms': args.transforms,
    }


def _csv_line(*values) -> str:
    return ','.join(format_value(v) for v in values)


def run_command(args: argparse.Namespace):
    if args.command == 'encode':
        result = cmd_encode(args.input, args.output, qp=args.qp,
                            dump_state=args.dump_state, **_codec_kwargs(args))
        print(_csv_line(result['rate_bpp'], result['psnr'], result['gbt_usage']))
    elif args.command == 'decode':
        cmd_decode(args.input, args.output, dump_state=args.dump_state)
    elif args.command == 'pse-experiment':
        result = cmd_pse_experiment(model=args.model, sizes=args.sizes, trials=args.trials,
                                    seed=args.seed, n_test=args.test_size, out=args.out)
        if args.out is None:
            write_csv(None, result['columns'], result['rows'])
    elif args.command == 'metrics':
        result = cmd_metrics(args.a, args.b)
        print(_csv_line(result['psnr'], result['ssim'], result['glnu_a'], result['glnu_b']))
    elif args.command == 'bd-rate':
        result = cmd_bd_rate(args.anchor, args.test)
        print(f"bd_rate,{format_value(result['bd_rate'])}")
        for key in ('uniform', 'non_uniform'):
            if key in result:
                print(f"{key},{format_value(result[key])}")
    elif args.command == 'rd-sweep':
        if args.workers < 1:
            raise ValueError(f"--workers must be >= 1, got {args.workers}")
        result = cmd_rd_sweep(args.input_dir, qps=args.qps, out=args.out, workers=args.workers,
                              **_codec_kwargs(args))
        if args.out is None:
            write_csv(None, result['columns'], result['rows'])
    elif args.command == 'textures':
        cmd_textures(args.output_dir, count=args.count, size=args.size, seed=args.seed)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parses argv and runs the command.

    Returns:
        Exit code: 0 success, 1 I/O failure, 2 invalid input or flags
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )

    try:
        run_command(args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK
