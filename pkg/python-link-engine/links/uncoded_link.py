"""
Uncoded baseline over the same geometry.

k information bits sit where the systematic part of a codeword would (the
last k of n positions); the other n - k positions carry random filler so the
N_T symbols look exactly like a coded transmission at equal Eb/N0. A block
error is any wrong information bit. No decoder runs: queries and decode time
are reported as zero.
"""

from coding.gf2_linalg import BitWord, hamming_weight
from links.base_link import TrialOutcome
from links.rayleigh_zf_link import RayleighZfLink
from phy.modem import demap_symbols, map_bits


class UncodedLink(RayleighZfLink):

    name = 'uncoded_rayleigh_zf'

    def run(self, snr, rng):
        cfg = self.cfg
        payload = BitWord.random(cfg.n, rng)
        estimates = self.detect(map_bits(self.constellation, payload), snr, rng)
        y_b = demap_symbols(self.constellation, estimates)

        info_shift = cfg.n - cfg.k
        return TrialOutcome(
            block_error=(y_b.value >> info_shift) != (payload.value >> info_shift),
            queries=0,
            decode_seconds=0.0,
            bit_errors=hamming_weight(y_b ^ payload),
        )
