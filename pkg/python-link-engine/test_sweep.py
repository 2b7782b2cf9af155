"""
Sweep configuration and the Monte Carlo engine: reproducibility, early
stopping, CSV output and the scaled-down statistical checks.
"""

import io
import math
import os
import tempfile
from dataclasses import replace
from functools import lru_cache

import pytest

from orchestrator.sweep_config import (
    ChannelModel,
    SweepConfig,
    config_from_mapping,
    default_workers,
    parse_config_text,
    parse_ebno_grid,
    render_config,
)
from orchestrator.sweep_manager import (
    CSV_COLUMNS,
    PointResult,
    SweepManager,
    ebno_at_bler,
    ebno_to_snr,
    emit_csv,
    horizontal_gap,
    load_results_csv,
    run_sweep,
    run_trial,
)
from phy.modem import Mapping


def small_config(**overrides) -> SweepConfig:
    values = dict(n=8, k=4, m=4, n_r=8, n_b=2, ebno_grid_db=(0.0,), trials_per_point=200,
                  min_block_errors=None, master_seed=1)
    values.update(overrides)
    return SweepConfig(**values)


def point(ebno_db: float, bler: float) -> PointResult:
    return PointResult(ebno_db=ebno_db, trials_run=1000, block_errors=int(bler * 1000), bler=bler,
                       bler_ci95=0.0, avg_queries=1.0, avg_decode_seconds=0.0)


def test_ebno_to_snr():
    assert ebno_to_snr(0.0, 1.0, 4) == 2.0
    assert math.isclose(ebno_to_snr(10.0, 0.5, 16), 20.0)
    assert math.isclose(ebno_to_snr(3.0, 103 / 128, 16), 10 ** 0.3 * 103 / 128 * 4)
    with pytest.raises(ValueError):
        ebno_to_snr(0.0, 0.0, 4)
    print("✓ Eb/N0 -> SNR = 10^(dB/10) R log2(M)")


def test_ebno_grid_parsing():
    assert parse_ebno_grid('0:0.5:2') == (0.0, 0.5, 1.0, 1.5, 2.0)
    assert len(parse_ebno_grid('0:0.5:8')) == 17
    assert parse_ebno_grid(3) == (3.0,)
    assert parse_ebno_grid('2.5') == (2.5,)
    assert parse_ebno_grid([1, 2]) == (1.0, 2.0)
    for bad in ('0:1', '0:0:4', '4:1:0'):
        with pytest.raises(ValueError):
            parse_ebno_grid(bad)
    print("✓ start:step:stop grid includes stop")


def test_config_validation():
    cfg = SweepConfig(n=128, k=103, m=16, n_r=200, n_b=3, ebno_grid_db='0:0.5:8', trials_per_point=100000,
                      mapping='gray', master_seed=7)
    assert cfg.n_t == 32
    assert cfg.bits_per_symbol == 4
    assert math.isclose(cfg.rate, 103 / 128)
    assert cfg.mapping is Mapping.GRAY
    assert cfg.channel_model is ChannelModel.RAYLEIGH_ZF
    assert cfg.min_block_errors == 100

    bad = [
        dict(n=128, k=103, m=64, n_r=200),       # 21.33 antennas
        dict(n=8, k=8, m=4, n_r=8),
        dict(n=8, k=4, m=4, n_r=3),              # n_r < n_t
        dict(n=8, k=4, m=4, n_r=8, n_b=9),
        dict(n=8, k=4, m=4, n_r=8, ebno_grid_db=(1.0, 1.0)),
        dict(n=8, k=4, m=4, n_r=8, trials_per_point=0),
        dict(n=8, k=4, m=4, n_r=8, mapping='binary'),
        dict(n=8, k=4, m=4, n_r=8, workers=0),
    ]
    for overrides in bad:
        values = dict(n_b=2, ebno_grid_db=(0.0,), trials_per_point=10)
        values.update(overrides)
        with pytest.raises(ValueError):
            SweepConfig(**values)
    print("✓ SweepConfig validates sizes, grid and options")


def test_config_file_roundtrip():
    text = """
    # 64-QAM hardening run
    n = 132
    k = 106
    m = 64
    n_r = 200
    n_b = 3
    mapping = natural
    channel_model = hardening
    ebno_grid_db = 1:1:8
    trials_per_point = 1000
    min_block_errors = null
    """
    values = parse_config_text(text)
    assert values['ebno_grid_db'] == '1:1:8'
    assert values['min_block_errors'] is None
    cfg = config_from_mapping(values)
    assert cfg.n_t == 22
    assert cfg.ebno_grid_db == tuple(float(x) for x in range(1, 9))
    assert cfg.channel_model is ChannelModel.HARDENING
    assert cfg.min_block_errors is None
    assert config_from_mapping(parse_config_text(text.replace('min_block_errors = null', ''))).min_block_errors == 100

    assert config_from_mapping(parse_config_text(render_config(cfg))) == cfg
    no_stop = small_config()
    assert no_stop.min_block_errors is None
    assert 'min_block_errors = null' in render_config(no_stop)
    assert config_from_mapping(parse_config_text(render_config(no_stop))) == no_stop
    capped = small_config(min_block_errors=7, query_cap=50, neumann_terms=3)
    assert config_from_mapping(parse_config_text(render_config(capped))) == capped

    with pytest.raises(ValueError, match="unknown key"):
        parse_config_text("n = 8\nbogus = 1\n")
    with pytest.raises(ValueError, match="duplicate"):
        parse_config_text("n = 8\nn = 9\n")
    with pytest.raises(ValueError, match="key = value"):
        parse_config_text("n 8\n")
    with pytest.raises(ValueError, match="missing required settings"):
        config_from_mapping({'n': 8})
    print("✓ key = value config files round-trip through SweepConfig")


def test_default_workers_from_env():
    saved = os.environ.pop('LINKSIM_WORKERS', None)
    try:
        assert default_workers() == 1
        os.environ['LINKSIM_WORKERS'] = '3'
        assert default_workers() == 3
    finally:
        os.environ.pop('LINKSIM_WORKERS', None)
        if saved is not None:
            os.environ['LINKSIM_WORKERS'] = saved
    print("✓ LINKSIM_WORKERS sets the default worker count")


def test_trials_are_reproducible():
    cfg = small_config()
    a = run_trial(cfg, 2.0, 17, point_index=3)
    b = run_trial(cfg, 2.0, 17, point_index=3)
    assert (a.block_error, a.queries, a.bit_errors) == (b.block_error, b.queries, b.bit_errors)
    others = {(t.block_error, t.queries, t.bit_errors) for t in (run_trial(cfg, 2.0, i, 3) for i in range(40))}
    assert len(others) > 1
    print("✓ identical (seed, point, trial) gives an identical outcome")


def test_noise_free_pipeline_is_exact():
    """Zero noise: every draw decodes to its message on the first query."""
    setups = [
        dict(n=8, k=4, m=4, n_r=8),
        dict(n=128, k=103, m=16, n_r=200),
        dict(n=132, k=106, m=64, n_r=200),
    ]
    for setup in setups:
        for model in (ChannelModel.RAYLEIGH_ZF, ChannelModel.HARDENING):
            cfg = SweepConfig(n_b=3, ebno_grid_db=(0.0,), trials_per_point=300, noise_free=True,
                              channel_model=model, **setup)
            for i in range(cfg.trials_per_point):
                outcome = run_trial(cfg, 0.0, i)
                assert not outcome.block_error
                assert outcome.queries == 1
                assert outcome.bit_errors == 0
    print("✓ noise-free links return the transmitted message for (8,4), (128,103), (132,106)")


def test_single_point_single_trial():
    results = run_sweep(small_config(trials_per_point=1))
    assert len(results) == 1
    assert results[0].trials_run == 1
    assert results[0].bler in (0.0, 1.0)
    print("✓ one point, one trial")


def test_early_stop_is_exact():
    cfg = small_config(ebno_grid_db=(-4.0,), trials_per_point=500, min_block_errors=5, n_b=1)
    [result] = run_sweep(cfg)
    assert result.block_errors == 5
    assert result.trials_run < 500

    errors = [run_trial(cfg, -4.0, i).block_error for i in range(result.trials_run)]
    assert sum(errors) == 5
    assert errors[-1]
    assert math.isclose(result.bler, 5 / result.trials_run)
    p = result.bler
    assert math.isclose(result.bler_ci95, 1.96 * math.sqrt(p * (1 - p) / result.trials_run))
    print(f"✓ early stop at trial {result.trials_run}, the one that reached 5 errors")


def test_parallel_matches_sequential():
    cfg = small_config(ebno_grid_db=(-2.0, 0.0, 2.0), trials_per_point=300, min_block_errors=20)
    sequential = run_sweep(cfg)
    parallel = run_sweep(replace(cfg, workers=2))
    for s, p in zip(sequential, parallel):
        assert (s.trials_run, s.block_errors, s.avg_queries, s.channel_ber) == \
               (p.trials_run, p.block_errors, p.avg_queries, p.channel_ber)
    print("✓ process pool reproduces the sequential sweep")


def test_repeat_sweeps_write_identical_csv():
    cfg = small_config(ebno_grid_db=(0.0, 2.0, 4.0), trials_per_point=150, min_block_errors=30)
    texts = []
    for _ in range(2):
        buf = io.StringIO()
        emit_csv(run_sweep(cfg), buf)
        texts.append(buf.getvalue())
    # timing is the last column
    stripped = [[line.rsplit(',', 1)[0] for line in t.splitlines()] for t in texts]
    assert stripped[0] == stripped[1]
    for line in texts[0].splitlines()[1:]:
        assert float(line.rsplit(',', 1)[1]) > 0
    print("✓ identical configs give byte-identical CSV apart from timing")


# (16,8) 16-QAM on a 16 x 4 channel: every curve below shares seeds and grid
ORDERING_GRID = (-2.0, 1.0, 4.0, 7.0)


@lru_cache(maxsize=None)
def ordering_curve(cfg: SweepConfig):
    return run_sweep(cfg)


def small_curve(**overrides):
    values = dict(n=16, k=8, m=16, n_r=16, n_b=2, ebno_grid_db=ORDERING_GRID, trials_per_point=1500,
                  min_block_errors=None, master_seed=11)
    values.update(overrides)
    return ordering_curve(SweepConfig(**values))


def assert_not_above(better, worse, label):
    for b, w in zip(better, worse):
        slack = max(b.bler_ci95, w.bler_ci95)
        assert b.bler <= w.bler + slack, \
            f"{label} at {b.ebno_db} dB: {b.bler:.3e} > {w.bler:.3e} (+{slack:.1e})"


def total_errors(curve):
    return sum(r.block_errors for r in curve)


def test_gray_not_worse_than_natural():
    gray = small_curve(mapping=Mapping.GRAY)
    natural = small_curve(mapping=Mapping.NATURAL)
    assert_not_above(gray, natural, "gray")
    assert total_errors(gray) < total_errors(natural)
    print(f"✓ gray {total_errors(gray)} vs natural {total_errors(natural)} block errors")


def test_bler_nonincreasing_in_search_radius():
    curves = [small_curve(n_b=n_b) for n_b in (1, 2, 3)]
    assert_not_above(curves[2], curves[1], "n_b=3")
    assert_not_above(curves[1], curves[0], "n_b=2")
    assert total_errors(curves[2]) <= total_errors(curves[1]) <= total_errors(curves[0])
    print("✓ BLER(n_b=3) <= BLER(n_b=2) <= BLER(n_b=1) at equal seeds")


def test_hardening_lower_bounds_zf():
    zf = small_curve(channel_model=ChannelModel.RAYLEIGH_ZF)
    hardening = small_curve(channel_model=ChannelModel.HARDENING)
    assert_not_above(hardening, zf, "hardening")
    assert total_errors(hardening) < total_errors(zf)
    print("✓ hardened channel BLER below the Rayleigh ZF link")


def test_coding_beats_uncoded():
    coded = small_curve(n_b=3)
    uncoded = small_curve(n_b=3, channel_model=ChannelModel.UNCODED_RAYLEIGH_ZF)
    assert_not_above(coded, uncoded, "coded")
    assert total_errors(coded) < total_errors(uncoded)
    print(f"✓ coded {total_errors(coded)} vs uncoded {total_errors(uncoded)} block errors")


def test_decode_time_falls_with_snr():
    for n_b in (2, 3):
        curve = small_curve(n_b=n_b)
        low, high = curve[0], curve[-1]
        assert low.avg_queries > high.avg_queries
        assert low.avg_decode_seconds > high.avg_decode_seconds
    print("✓ queries and decode time shrink from the lowest to the highest Eb/N0")


def test_point_metrics():
    [coded] = run_sweep(small_config(ebno_grid_db=(1.0,), trials_per_point=300))
    assert 0.0 <= coded.bler <= 1.0
    assert 1.0 <= coded.avg_queries <= 1 + 8 + 28
    assert coded.avg_decode_seconds > 0.0

    [uncoded] = run_sweep(small_config(ebno_grid_db=(1.0,), trials_per_point=300,
                                       channel_model=ChannelModel.UNCODED_RAYLEIGH_ZF))
    assert uncoded.avg_queries == 0.0
    assert uncoded.avg_decode_seconds == 0.0

    zf, hardening = (
        run_sweep(small_config(ebno_grid_db=(0.0,), trials_per_point=400, channel_model=model))[0]
        for model in (ChannelModel.RAYLEIGH_ZF, ChannelModel.HARDENING)
    )
    assert hardening.channel_ber < zf.channel_ber
    print(f"✓ raw BER zf {zf.channel_ber:.4f} > hardening {hardening.channel_ber:.4f}")


def test_summary_goes_to_stream():
    manager = SweepManager(small_config(trials_per_point=5))
    manager.run()
    buf = io.StringIO()
    manager.print_summary(stream=buf)
    assert 'BLER' in buf.getvalue()
    assert manager.cfg.describe() in buf.getvalue()
    print("✓ summary table printed to the given stream")


def test_csv_output():
    results = [PointResult(0.0, 1000, 12, 0.012, 0.0067, 1.25, 3.5e-6),
               PointResult(0.5, 2000, 3, 0.0015, 0.0017, 1.0, 2.0e-6)]
    buf = io.StringIO()
    emit_csv(results, buf)
    text = buf.getvalue()
    lines = text.split('\n')
    assert lines[0] == ','.join(CSV_COLUMNS)
    assert lines[1] == '0.0000,1000,12,1.200000e-02,6.700000e-03,1.250000,3500.0'
    assert lines[2] == '0.5000,2000,3,1.500000e-03,1.700000e-03,1.000000,2000.0'
    assert lines[3] == ''
    assert '\r' not in text

    one = io.StringIO()
    emit_csv(results[:1], one)
    assert len(one.getvalue().splitlines()) == 2

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'run.csv')
        emit_csv(results, path)
        assert os.listdir(tmp) == ['run.csv']
        frame = load_results_csv(path)
        assert list(frame.columns) == CSV_COLUMNS
        assert frame['block_errors'].tolist() == [12, 3]

    with pytest.raises(ValueError):
        emit_csv([], io.StringIO())
    print("✓ CSV header, number formats and line endings")


def test_curve_interpolation():
    curve = [point(0.0, 0.1), point(1.0, 0.01), point(2.0, 0.001)]
    assert math.isclose(ebno_at_bler(curve, 0.01), 1.0)
    assert math.isclose(ebno_at_bler(curve, 10 ** -1.5), 0.5)
    assert ebno_at_bler(curve, 0.5) is None

    shifted = [point(p.ebno_db + 0.5, p.bler) for p in curve]
    assert math.isclose(horizontal_gap(shifted, curve, 0.01), 0.5)
    assert horizontal_gap(shifted, curve, 1e-6) is None
    print("✓ Eb/N0 at a target BLER by log-linear interpolation")


if __name__ == "__main__":
    print("=" * 60)
    print("SWEEP TESTS")
    print("=" * 60)
    test_ebno_to_snr()
    test_ebno_grid_parsing()
    test_config_validation()
    test_config_file_roundtrip()
    test_default_workers_from_env()
    test_trials_are_reproducible()
    test_noise_free_pipeline_is_exact()
    test_single_point_single_trial()
    test_early_stop_is_exact()
    test_parallel_matches_sequential()
    test_repeat_sweeps_write_identical_csv()
    test_gray_not_worse_than_natural()
    test_bler_nonincreasing_in_search_radius()
    test_hardening_lower_bounds_zf()
    test_coding_beats_uncoded()
    test_decode_time_falls_with_snr()
    test_point_metrics()
    test_summary_goes_to_stream()
    test_csv_output()
    test_curve_interpolation()
    print("=" * 60)
    print("✓ ALL TESTS PASSED")
