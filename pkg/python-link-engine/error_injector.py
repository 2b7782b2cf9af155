"""
Error injection for stress testing the GRAND decoder.

Flips chosen numbers of bits on random codewords and checks every decode
against an exhaustive minimum-distance oracle. Small codes only: the oracle
lists all 2^k codewords.

This is where a decoder proves it is maximum-likelihood inside its radius and
gives up cleanly outside it.
"""

import sys
from typing import Dict, List, Optional, Tuple

import numpy as np

from coding.gf2_linalg import BitWord, hamming_weight
from coding.grand import GrandConfig, grand_decode
from coding.rlc import RlcCode, encode

MAX_ORACLE_K = 20
MAX_SEARCH_N = 20


class ErrorInjector:
    """
    Injects bit-flip patterns into codewords and grades the decoder.
    """

    def __init__(self):
        self._codebooks: Dict[RlcCode, List[BitWord]] = {}

    def flip_random(self, word: BitWord, weight: int, rng: np.random.Generator) -> BitWord:
        """Flip `weight` distinct positions chosen uniformly."""
        if not 0 <= weight <= word.length:
            raise ValueError(f"cannot flip {weight} of {word.length} bits")
        positions = rng.choice(word.length, size=weight, replace=False)
        return word ^ BitWord(word.length, sum(1 << int(p) for p in positions))

    def codebook(self, code: RlcCode) -> List[BitWord]:
        if code.k > MAX_ORACLE_K:
            raise ValueError(f"k={code.k} too large to list the codebook (max {MAX_ORACLE_K})")
        if code not in self._codebooks:
            self._codebooks[code] = [encode(code, BitWord(code.k, v)) for v in range(1 << code.k)]
        return self._codebooks[code]

    def nearest_codewords(self, code: RlcCode, y: BitWord) -> Tuple[int, List[BitWord]]:
        """Minimum Hamming distance from y to the code, and every codeword at that distance."""
        best = code.n + 1
        nearest: List[BitWord] = []
        for c in self.codebook(code):
            d = hamming_weight(c ^ y)
            if d < best:
                best, nearest = d, [c]
            elif d == best:
                nearest.append(c)
        return best, nearest

    def deep_noise_word(self, code: RlcCode, n_b: int) -> Optional[BitWord]:
        """
        First word (by integer value) farther than n_b from every codeword.

        GRAND with threshold n_b must abandon on it after testing every pattern.
        None when the code's covering radius is at most n_b.
        """
        if code.n > MAX_SEARCH_N:
            raise ValueError(f"n={code.n} too large for an exhaustive search (max {MAX_SEARCH_N})")
        for value in range(1 << code.n):
            y = BitWord(code.n, value)
            distance, _ = self.nearest_codewords(code, y)
            if distance > n_b:
                return y
        return None

    def run_stress_test(self, code: RlcCode, n_b: int, rng: np.random.Generator,
                        trials_per_weight: int = 200, max_weight: Optional[int] = None) -> Dict:
        """
        Decode codewords hit by 0..max_weight flips and compare with the oracle.

        A decode counts as a failure when the nearest codeword is unique and
        within n_b but GRAND returns something else, or when GRAND reports
        success on a word farther than n_b from the code.
        """
        max_weight = n_b + 1 if max_weight is None else max_weight
        cfg = GrandConfig(n_b=n_b)
        results = {'code': (code.n, code.k), 'n_b': n_b, 'scenarios': {}}

        for weight in range(max_weight + 1):
            stats = {'trials': 0, 'decoded': 0, 'abandoned': 0, 'failures': 0, 'queries': 0}
            for _ in range(trials_per_weight):
                message = BitWord.random(code.k, rng)
                y = self.flip_random(encode(code, message), weight, rng)
                outcome = grand_decode(code, y, cfg)
                distance, nearest = self.nearest_codewords(code, y)

                stats['trials'] += 1
                stats['queries'] += outcome.queries
                stats['decoded' if outcome.decoded else 'abandoned'] += 1
                if distance <= n_b and len(nearest) == 1 and outcome.codeword != nearest[0]:
                    stats['failures'] += 1
                elif distance > n_b and outcome.decoded:
                    stats['failures'] += 1

            stats['avg_queries'] = stats['queries'] / stats['trials']
            stats['score'] = 1 - stats['failures'] / stats['trials']
            results['scenarios'][f'flip_{weight}'] = stats

        return results

    def print_stress_report(self, results: Dict, stream=None):
        """Human-readable stress test report."""
        stream = stream or sys.stderr
        n, k = results['code']
        print("\n" + "=" * 70, file=stream)
        print(f"GRAND STRESS TEST: RLC ({n},{k}), n_b={results['n_b']}", file=stream)
        print("=" * 70, file=stream)

        for scenario, stats in results['scenarios'].items():
            symbol = "✓" if stats['failures'] == 0 else "✗"
            bar_len = int(stats['score'] * 40)
            bar = '█' * bar_len + '░' * (40 - bar_len)
            print(f"  {symbol} {scenario:10} [{bar}] {stats['score']:.1%}  "
                  f"abandoned {stats['abandoned']:>4}/{stats['trials']:<4} "
                  f"avg queries {stats['avg_queries']:.1f}", file=stream)

        print("=" * 70 + "\n", file=stream)


if __name__ == '__main__':
    from coding.rlc import rlc_generate

    rng = np.random.default_rng(0)
    injector = ErrorInjector()
    for n, k in [(8, 4), (16, 8)]:
        code = rlc_generate(n, k, rng)
        injector.print_stress_report(injector.run_stress_test(code, 3, rng), stream=sys.stdout)
