"""
Command-line front end for the coded mMIMO link simulator.

Subcommands:
- sweep:   BLER / query / decode-time curve over an Eb/N0 grid, as CSV
- point:   the same at a single Eb/N0
- bound:   worst-case GRAND queries for (n, n_b)
- codegen: draw a systematic random linear code and dump it as text

Progress and the summary table go to stderr; stdout carries only results.
Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from coding.grand import query_upper_bound
from coding.rlc import dump_code, rlc_generate
from orchestrator.sweep_config import (
    ChannelModel,
    SweepConfig,
    config_from_mapping,
    default_workers,
    load_config_file,
)
from orchestrator.sweep_manager import SweepManager, emit_csv, write_atomic

logger = logging.getLogger('link_sim')

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

CHANNEL_FLAGS = {
    'zf': ChannelModel.RAYLEIGH_ZF,
    'hardening': ChannelModel.HARDENING,
    'uncoded': ChannelModel.UNCODED_RAYLEIGH_ZF,
}

# argparse dest -> SweepConfig field
FLAG_TO_KEY = {
    'n': 'n',
    'k': 'k',
    'mod': 'm',
    'mapping': 'mapping',
    'nr': 'n_r',
    'nb': 'n_b',
    'channel': 'channel_model',
    'ebno': 'ebno_grid_db',
    'trials': 'trials_per_point',
    'min_errors': 'min_block_errors',
    'seed': 'master_seed',
    'query_cap': 'query_cap',
    'neumann_terms': 'neumann_terms',
    'workers': 'workers',
    'noise_free': 'noise_free',
}
KEY_TO_FLAG = {key: '--' + dest.replace('_', '-') for dest, key in FLAG_TO_KEY.items()}
REQUIRED_KEYS = ('n', 'k', 'm', 'n_r', 'n_b', 'ebno_grid_db', 'trials_per_point')


class UsageError(ValueError):
    """Bad command line or config file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class CliInvocation:
    subcommand: str
    output_path: str = '-'
    config: Optional[SweepConfig] = None
    # bound / codegen parameters
    params: Dict[str, int] = field(default_factory=dict)
    log_level: str = 'INFO'


def _min_errors(text: str) -> int:
    # 0 stands for "no early stop" until _sweep_config maps it to None
    if text.strip().lower() == 'none':
        return 0
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"--min-errors must be >= 0, got {value}")
    return value


def _add_link_flags(p: argparse.ArgumentParser, single_point: bool):
    # every default is None so only explicit flags override --config
    p.add_argument('--config', help='key = value config file; explicit flags win')
    p.add_argument('--n', type=int, help='codeword length')
    p.add_argument('--k', type=int, help='message length')
    p.add_argument('--mod', type=int, choices=[4, 16, 64], help='QAM order M')
    p.add_argument('--mapping', choices=['natural', 'gray'])
    p.add_argument('--nr', type=int, help='receive antennas N_R')
    p.add_argument('--nb', type=int, help='GRAND weight threshold n_b')
    p.add_argument('--channel', choices=sorted(CHANNEL_FLAGS))
    if single_point:
        p.add_argument('--ebno', type=float, help='Eb/N0 in dB')
    else:
        p.add_argument('--ebno', help='Eb/N0 grid start:step:stop in dB (stop inclusive)')
    p.add_argument('--trials', type=int, help='maximum trials per point')
    p.add_argument('--min-errors', type=_min_errors, metavar='N|none',
                   help="stop a point after N block errors; 'none' or 0 runs every trial")
    p.add_argument('--seed', type=int, help='master seed')
    p.add_argument('--query-cap', type=int, help='hard cap on GRAND queries per decode')
    p.add_argument('--neumann-terms', type=int, help='approximate the ZF inverse with this many Neumann terms')
    p.add_argument('--workers', type=int, help='worker processes (default $LINKSIM_WORKERS or 1)')
    p.add_argument('--noise-free', action='store_true', default=None, help='debug: disable channel noise')
    p.add_argument('--out', default='-', help="CSV path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='link_sim', description='Coded massive-MIMO link simulator with GRAND decoding')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='default $LINKSIM_LOG_LEVEL or INFO')
    sub = parser.add_subparsers(dest='subcommand', required=True)

    _add_link_flags(sub.add_parser('sweep', help='BLER curve over an Eb/N0 grid'), single_point=False)
    _add_link_flags(sub.add_parser('point', help='one Eb/N0 point'), single_point=True)

    bound = sub.add_parser('bound', help='worst-case GRAND queries sum_{t<=n_b} C(n, t)')
    bound.add_argument('--n', type=int, required=True)
    bound.add_argument('--nb', type=int, required=True)

    codegen = sub.add_parser('codegen', help='dump a random systematic code')
    codegen.add_argument('--n', type=int, required=True)
    codegen.add_argument('--k', type=int, required=True)
    codegen.add_argument('--seed', type=int, default=0)
    codegen.add_argument('--out', default='-', help="output path, '-' for stdout")
    return parser


def _sweep_config(args: argparse.Namespace) -> SweepConfig:
    values: Dict[str, Any] = {'workers': default_workers()}
    if args.config:
        try:
            values.update(load_config_file(args.config))
        except (OSError, ValueError) as e:
            raise UsageError(f"config file {args.config}: {e}") from None

    for dest, key in FLAG_TO_KEY.items():
        value = getattr(args, dest)
        if value is not None:
            values[key] = value
    if args.channel is not None:
        values['channel_model'] = CHANNEL_FLAGS[args.channel]
    if args.min_errors == 0:
        values['min_block_errors'] = None

    missing = [KEY_TO_FLAG[key] for key in REQUIRED_KEYS if values.get(key) is None]
    if missing:
        raise UsageError(f"missing required setting(s): {', '.join(missing)}")
    try:
        return config_from_mapping(values)
    except (TypeError, ValueError) as e:
        raise UsageError(str(e)) from None


def parse_args(argv: Optional[List[str]] = None) -> CliInvocation:
    args = build_parser().parse_args(argv)
    log_level = args.log_level or os.getenv('LINKSIM_LOG_LEVEL', 'INFO').upper()

    if args.subcommand == 'bound':
        if not 0 <= args.nb <= args.n:
            raise UsageError(f"need 0 <= nb <= n, got n={args.n}, nb={args.nb}")
        return CliInvocation('bound', params={'n': args.n, 'n_b': args.nb}, log_level=log_level)

    if args.subcommand == 'codegen':
        if not 0 < args.k < args.n:
            raise UsageError(f"need 0 < k < n, got n={args.n}, k={args.k}")
        return CliInvocation('codegen', output_path=args.out,
                             params={'n': args.n, 'k': args.k, 'seed': args.seed}, log_level=log_level)

    cfg = _sweep_config(args)
    if args.subcommand == 'point' and len(cfg.ebno_grid_db) != 1:
        raise UsageError(f"point takes a single Eb/N0, got {len(cfg.ebno_grid_db)} values")
    return CliInvocation(args.subcommand, output_path=args.out, config=cfg, log_level=log_level)


def main(invocation: CliInvocation) -> int:
    if invocation.subcommand == 'bound':
        print(query_upper_bound(invocation.params['n'], invocation.params['n_b']))
        return 0

    if invocation.subcommand == 'codegen':
        p = invocation.params
        text = dump_code(rlc_generate(p['n'], p['k'], np.random.default_rng(p['seed'])))
        if invocation.output_path == '-':
            sys.stdout.write(text)
        else:
            write_atomic(invocation.output_path, text)
            logger.info(f"Wrote ({p['n']},{p['k']}) code to {invocation.output_path}")
        return 0

    manager = SweepManager(invocation.config)
    results = manager.run()
    manager.print_summary()
    emit_csv(results, sys.stdout if invocation.output_path == '-' else invocation.output_path)
    return 0


def configure_logging(level: str):
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT,
                        stream=sys.stderr, force=True)


def entrypoint(argv: Optional[List[str]] = None) -> int:
    try:
        invocation = parse_args(argv)
    except UsageError as e:
        configure_logging(os.getenv('LINKSIM_LOG_LEVEL', 'INFO').upper())
        logger.error(f"usage: {e}")
        return 1

    configure_logging(invocation.log_level)
    try:
        return main(invocation)
    except UsageError as e:
        logger.error(f"usage: {e}")
        return 1
    except Exception as e:
        logger.error(f"{invocation.subcommand} failed: {e}")
        return 2


if __name__ == '__main__':
    sys.exit(entrypoint())
