"""
Command-line front end: flag parsing, config merging, exit codes and output streams.
"""

import io
import os
import tempfile
from contextlib import redirect_stderr, redirect_stdout

import pytest

from coding.rlc import load_code
from link_sim import UsageError, entrypoint, parse_args
from orchestrator.sweep_config import ChannelModel, render_config
from phy.modem import Mapping

FULL_SWEEP_ARGS = ['sweep', '--n', '128', '--k', '103', '--mod', '16', '--mapping', 'gray', '--nr', '200',
                   '--nb', '3', '--ebno', '0:0.5:8', '--trials', '100000', '--seed', '7', '--out', 'run.csv']
SMALL_ARGS = ['--n', '8', '--k', '4', '--mod', '4', '--nr', '8', '--nb', '2', '--trials', '20', '--seed', '1']


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        status = entrypoint(argv)
    return status, out.getvalue(), err.getvalue()


def test_parse_sweep_invocation():
    inv = parse_args(FULL_SWEEP_ARGS)
    assert inv.subcommand == 'sweep'
    assert inv.output_path == 'run.csv'
    cfg = inv.config
    assert (cfg.n, cfg.k, cfg.m, cfg.n_r, cfg.n_b, cfg.n_t) == (128, 103, 16, 200, 3, 32)
    assert cfg.mapping is Mapping.GRAY
    assert cfg.channel_model is ChannelModel.RAYLEIGH_ZF
    assert len(cfg.ebno_grid_db) == 17 and cfg.ebno_grid_db[-1] == 8.0
    assert (cfg.trials_per_point, cfg.master_seed) == (100000, 7)

    inv = parse_args(['point', '--channel', 'hardening', '--ebno', '2'] + SMALL_ARGS)
    assert inv.config.channel_model is ChannelModel.HARDENING
    assert inv.config.ebno_grid_db == (2.0,)
    assert inv.output_path == '-'

    sweep_args = ['sweep', '--ebno', '0:1:2'] + SMALL_ARGS
    assert parse_args(sweep_args).config.min_block_errors == 100
    assert parse_args(sweep_args + ['--min-errors', '5']).config.min_block_errors == 5
    assert parse_args(sweep_args + ['--min-errors', 'none']).config.min_block_errors is None
    assert parse_args(sweep_args + ['--min-errors', '0']).config.min_block_errors is None
    with pytest.raises(UsageError):
        parse_args(sweep_args + ['--min-errors', '-1'])
    print("✓ flags map onto SweepConfig")


def test_usage_errors():
    with pytest.raises(UsageError, match="126 and 132"):
        parse_args(['sweep', '--n', '128', '--k', '103', '--mod', '64', '--nr', '200', '--nb', '3',
                    '--ebno', '0:1:2', '--trials', '10'])
    with pytest.raises(UsageError, match="--ebno"):
        parse_args(['sweep'] + SMALL_ARGS)
    with pytest.raises(UsageError):
        parse_args(['sweep', '--ebno', '0:1:2', '--bogus', '1'] + SMALL_ARGS)
    with pytest.raises(UsageError):
        parse_args(['sweep', '--n', '8', '--k', '4', '--mod', '4', '--nr', '2', '--nb', '2',
                    '--ebno', '0', '--trials', '5'])
    with pytest.raises(UsageError):
        parse_args([])
    with pytest.raises(UsageError):
        parse_args(['bound', '--n', '8', '--nb', '9'])

    status, out, err = run_cli(['sweep', '--n', '128', '--k', '103', '--mod', '64', '--nr', '200',
                                '--nb', '3', '--ebno', '0:1:2', '--trials', '10'])
    assert status == 1
    assert out == ''
    assert 'usage' in err
    print("✓ bad invocations exit 1 with a diagnostic")


def test_bound():
    assert run_cli(['bound', '--n', '128', '--nb', '3'])[:2] == (0, '349632\n')
    assert run_cli(['bound', '--n', '128', '--nb', '0'])[:2] == (0, '0\n')
    print("✓ bound prints sum C(n, t)")


def test_point_emits_one_row():
    status, out, err = run_cli(['point', '--ebno', '3'] + SMALL_ARGS)
    assert status == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert lines[0].startswith('ebno_db,trials,block_errors')
    assert lines[1].startswith('3.0000,')
    assert 'BLER' in err
    print("✓ point writes header plus one CSV row to stdout")


def test_config_file_merging():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'small.cfg')
        with open(path, 'w') as f:
            f.write("n = 8\nk = 4\nm = 4\nn_r = 8\nn_b = 1\n"
                    "ebno_grid_db = 0:1:2\ntrials_per_point = 10\nmaster_seed = 5\n")
        merged = parse_args(['sweep', '--config', path, '--nb', '2', '--seed', '9'])
        explicit = parse_args(['sweep', '--n', '8', '--k', '4', '--mod', '4', '--nr', '8', '--nb', '2',
                               '--ebno', '0:1:2', '--trials', '10', '--seed', '9'])
        assert merged.config == explicit.config

        no_stop = os.path.join(tmp, 'no_stop.cfg')
        with open(no_stop, 'w') as f:
            f.write(render_config(explicit.config).replace('min_block_errors = 100', 'min_block_errors = null'))
        from_file = parse_args(['sweep', '--config', no_stop]).config
        assert from_file.min_block_errors is None
        assert from_file == parse_args(['sweep', '--n', '8', '--k', '4', '--mod', '4', '--nr', '8', '--nb', '2',
                                        '--ebno', '0:1:2', '--trials', '10', '--seed', '9',
                                        '--min-errors', 'none']).config

        bad = os.path.join(tmp, 'bad.cfg')
        with open(bad, 'w') as f:
            f.write("n = 8\nbogus = 1\n")
        out_path = os.path.join(tmp, 'run.csv')
        status, out, err = run_cli(['sweep', '--config', bad, '--out', out_path])
        assert status == 1
        assert 'unknown key' in err
        assert not os.path.exists(out_path)
    print("✓ --config plus overrides equals the explicit invocation")


def test_sweep_to_file():
    with tempfile.TemporaryDirectory() as tmp:
        out_path = os.path.join(tmp, 'run.csv')
        status, out, _ = run_cli(['sweep', '--ebno', '0:2:4', '--out', out_path] + SMALL_ARGS)
        assert status == 0
        assert out == ''
        with open(out_path) as f:
            assert len(f.read().splitlines()) == 4

        missing_dir = os.path.join(tmp, 'nope', 'run.csv')
        status, _, err = run_cli(['sweep', '--ebno', '0', '--out', missing_dir] + SMALL_ARGS)
        assert status == 2
        assert 'sweep failed' in err
        assert not os.path.exists(os.path.dirname(missing_dir))
    print("✓ sweep writes the CSV file; runtime failures exit 2")


def test_codegen():
    status, out, _ = run_cli(['codegen', '--n', '16', '--k', '9', '--seed', '4'])
    assert status == 0
    code = load_code(out)
    assert (code.n, code.k) == (16, 9)
    assert run_cli(['codegen', '--n', '16', '--k', '9', '--seed', '4'])[1] == out

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'code.txt')
        assert run_cli(['codegen', '--n', '16', '--k', '9', '--seed', '4', '--out', path])[0] == 0
        with open(path) as f:
            assert f.read() == out
    assert run_cli(['codegen', '--n', '8', '--k', '8'])[0] == 1
    print("✓ codegen dumps a reloadable code")


if __name__ == "__main__":
    print("=" * 60)
    print("CLI TESTS")
    print("=" * 60)
    test_parse_sweep_invocation()
    test_usage_errors()
    test_bound()
    test_point_emits_one_row()
    test_config_file_merging()
    test_sweep_to_file()
    test_codegen()
    print("=" * 60)
    print("✓ ALL TESTS PASSED")
