"""
Sweep manager runs the Monte Carlo BLER experiment.

Every trial draws a fresh message, code and channel from its own generator,
seeded from (master_seed, point index, trial index). Trials of a point are
consumed in index order and the point stops at the exact trial that reaches
min_block_errors, so parallel runs reproduce sequential ones bit for bit
(decode timing aside).
"""

import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import repeat
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from links.base_link import BaseLink, TrialOutcome
from links.hardening_link import HardeningLink
from links.rayleigh_zf_link import RayleighZfLink
from links.uncoded_link import UncodedLink
from orchestrator.sweep_config import ChannelModel, SweepConfig

logger = logging.getLogger(__name__)

LINK_MODELS = {
    ChannelModel.RAYLEIGH_ZF: RayleighZfLink,
    ChannelModel.HARDENING: HardeningLink,
    ChannelModel.UNCODED_RAYLEIGH_ZF: UncodedLink,
}

TRIALS_PER_TASK = 64
CSV_COLUMNS = ['ebno_db', 'trials', 'block_errors', 'bler', 'bler_ci95', 'avg_queries', 'avg_decode_ns']


@dataclass
class PointResult:
    ebno_db: float
    trials_run: int
    block_errors: int
    bler: float
    bler_ci95: float
    avg_queries: float
    avg_decode_seconds: float
    channel_ber: float = 0.0


def ebno_to_snr(ebno_db: float, rate: float, m: int) -> float:
    """Symbol-energy-to-noise ratio for unit-energy symbols: Eb/N0 * R * log2(M)."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    return 10.0 ** (ebno_db / 10.0) * rate * math.log2(m)


def trial_rng(master_seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, point_index, trial_index]))


@lru_cache(maxsize=8)
def build_link(cfg: SweepConfig) -> BaseLink:
    return LINK_MODELS[cfg.channel_model](cfg)


def run_trial(cfg: SweepConfig, ebno_db: float, trial_index: int, point_index: int = 0) -> TrialOutcome:
    rng = trial_rng(cfg.master_seed, point_index, trial_index)
    snr = ebno_to_snr(ebno_db, cfg.rate, cfg.m)
    return build_link(cfg).run(snr, rng)


def _run_trials(cfg: SweepConfig, ebno_db: float, point_index: int, indices: Sequence[int]) -> List[TrialOutcome]:
    return [run_trial(cfg, ebno_db, i, point_index) for i in indices]


class _PointTally:
    """Order-independent sums for one Eb/N0 point."""

    def __init__(self, n: int):
        self.n = n
        self.trials = 0
        self.block_errors = 0
        self.queries = 0
        self.decode_seconds = 0.0
        self.bit_errors = 0

    def add(self, outcome: TrialOutcome):
        self.trials += 1
        self.block_errors += int(outcome.block_error)
        self.queries += outcome.queries
        self.decode_seconds += outcome.decode_seconds
        self.bit_errors += outcome.bit_errors

    def result(self, ebno_db: float) -> PointResult:
        bler = self.block_errors / self.trials
        return PointResult(
            ebno_db=ebno_db,
            trials_run=self.trials,
            block_errors=self.block_errors,
            bler=bler,
            bler_ci95=1.96 * math.sqrt(bler * (1.0 - bler) / self.trials),
            avg_queries=self.queries / self.trials,
            avg_decode_seconds=self.decode_seconds / self.trials,
            channel_ber=self.bit_errors / (self.trials * self.n),
        )


class SweepManager:
    """
    Runs one SweepConfig over its Eb/N0 grid.
    """

    def __init__(self, cfg: SweepConfig):
        self.cfg = cfg
        self.results: List[PointResult] = []

    def run(self) -> List[PointResult]:
        cfg = self.cfg
        logger.info(f"Sweep: {cfg.describe()}")
        stop_rule = f"stop at {cfg.min_block_errors} block errors" if cfg.min_block_errors else "no early stop"
        logger.info(f"{len(cfg.ebno_grid_db)} Eb/N0 points, up to {cfg.trials_per_point} trials each, "
                    f"{stop_rule}, {cfg.workers} worker(s)")

        self.results = []
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
                for idx, ebno in enumerate(cfg.ebno_grid_db):
                    self.results.append(self.run_point(idx, ebno, executor))
        else:
            for idx, ebno in enumerate(cfg.ebno_grid_db):
                self.results.append(self.run_point(idx, ebno))
        return self.results

    def run_point(self, point_index: int, ebno_db: float,
                  executor: Optional[ProcessPoolExecutor] = None) -> PointResult:
        cfg = self.cfg
        tally = _PointTally(cfg.n)
        batch = TRIALS_PER_TASK * cfg.workers if executor else 1
        next_index = 0

        while next_index < cfg.trials_per_point and not self._target_reached(tally):
            stop = min(next_index + batch, cfg.trials_per_point)
            if executor:
                chunks = [range(i, min(i + TRIALS_PER_TASK, stop)) for i in range(next_index, stop, TRIALS_PER_TASK)]
                batches = executor.map(_run_trials, repeat(cfg), repeat(ebno_db), repeat(point_index), chunks)
                outcomes = [o for chunk in batches for o in chunk]
            else:
                outcomes = _run_trials(cfg, ebno_db, point_index, range(next_index, stop))

            for outcome in outcomes:
                tally.add(outcome)
                if self._target_reached(tally):
                    logger.debug(f"Eb/N0 {ebno_db:.2f} dB reached {tally.block_errors} errors "
                                 f"after {tally.trials} trials")
                    break
            next_index = stop

        result = tally.result(ebno_db)
        logger.info(f"Eb/N0 {ebno_db:6.2f} dB: {result.trials_run} trials, {result.block_errors} errors, "
                    f"BLER {result.bler:.3e}, avg queries {result.avg_queries:.2f}")
        if result.block_errors == 0:
            logger.warning(f"No block errors at {ebno_db:.2f} dB; BLER below 1/{result.trials_run}")
        return result

    def _target_reached(self, tally: _PointTally) -> bool:
        target = self.cfg.min_block_errors
        return target is not None and tally.block_errors >= target

    def print_summary(self, results: Optional[List[PointResult]] = None, stream=None):
        results = results if results is not None else self.results
        stream = stream or sys.stderr
        print("\n" + "=" * 70, file=stream)
        print(self.cfg.describe(), file=stream)
        print("=" * 70, file=stream)
        print(f"{'Eb/N0':>8} {'Trials':>9} {'Errors':>8} {'BLER':>11} {'Queries':>10} {'Decode us':>10}", file=stream)
        print("-" * 70, file=stream)
        for r in results:
            print(f"{r.ebno_db:>8.2f} {r.trials_run:>9} {r.block_errors:>8} {r.bler:>11.3e} "
                  f"{r.avg_queries:>10.2f} {r.avg_decode_seconds * 1e6:>10.1f}", file=stream)
        print("=" * 70 + "\n", file=stream)


def run_sweep(cfg: SweepConfig) -> List[PointResult]:
    return SweepManager(cfg).run()


def results_frame(results: List[PointResult]) -> pd.DataFrame:
    """CSV rows as preformatted strings."""
    return pd.DataFrame({
        'ebno_db': [f"{r.ebno_db:.4f}" for r in results],
        'trials': [str(r.trials_run) for r in results],
        'block_errors': [str(r.block_errors) for r in results],
        'bler': [f"{r.bler:.6e}" for r in results],
        'bler_ci95': [f"{r.bler_ci95:.6e}" for r in results],
        'avg_queries': [f"{r.avg_queries:.6f}" for r in results],
        'avg_decode_ns': [f"{r.avg_decode_seconds * 1e9:.1f}" for r in results],
    }, columns=CSV_COLUMNS)


def write_atomic(path: str, text: str):
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.linksim-', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', newline='') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_csv(results: List[PointResult], destination):
    """
    Write results as CSV: header plus one row per point, '\\n' line endings.

    Args:
        results: non-empty list of PointResult
        destination: file path (written atomically) or an open text stream
    """
    if not results:
        raise ValueError("no results to write")
    text = results_frame(results).to_csv(index=False, lineterminator='\n')
    if hasattr(destination, 'write'):
        destination.write(text)
        return
    write_atomic(destination, text)
    logger.info(f"Wrote {len(results)} rows to {destination}")


def load_results_csv(path) -> pd.DataFrame:
    return pd.read_csv(path)


def ebno_at_bler(results: List[PointResult], target: float) -> Optional[float]:
    """Eb/N0 where the curve crosses `target`, linear in log10(BLER) between grid points."""
    for a, b in zip(results, results[1:]):
        if a.bler >= target >= b.bler and a.bler > 0:
            if b.bler == 0:
                continue
            if a.bler == b.bler:
                return a.ebno_db
            frac = (math.log10(a.bler) - math.log10(target)) / (math.log10(a.bler) - math.log10(b.bler))
            return a.ebno_db + frac * (b.ebno_db - a.ebno_db)
    return None


def horizontal_gap(worse: List[PointResult], better: List[PointResult], target: float) -> Optional[float]:
    """Eb/N0 distance (dB) between two curves at BLER = target; positive when `worse` is to the right."""
    x_worse = ebno_at_bler(worse, target)
    x_better = ebno_at_bler(better, target)
    if x_worse is None or x_better is None:
        return None
    return x_worse - x_better
