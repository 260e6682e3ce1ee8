"""Entropy, LZ76, Markov, and period measures on binary sequences."""

import math

import numpy as np
import pytest

from symchaos.complexity import (
    block_entropies,
    compressibility,
    detect_period,
    lz76,
    lz76_phrases,
    markov_matrix,
    measure_sequence,
    periodic_block_entropies,
    periodic_onset,
    repeating_block,
    source_entropy_estimate,
    write_entropy_profile_csv,
    write_report_csv,
)
from symchaos.models import IntegratorConfig, LorenzParams, integrate
from symchaos.symbolic import LORENZ_FLIP_FLOP, PartitionSpec, encode_trajectory


def _coin(n, seed=0):
    return np.random.default_rng(seed).integers(0, 2, n).astype(np.uint8)


def _markov_chain(n, p_flip, seed=0):
    flips = np.random.default_rng(seed).random(n - 1) < p_flip
    bits = np.empty(n, dtype=np.uint8)
    bits[0] = 0
    bits[1:] = np.logical_xor.accumulate(flips) ^ bits[0]
    return bits


# ------------------------------------------------------- block entropies


def test_fair_coin_entropies_near_one_bit():
    prof = block_entropies(_coin(100_000), 6)
    for m in range(0, 7):
        assert abs(prof.h_of(m) - 1.0) < 0.02
    for m in range(1, 7):
        assert abs(prof.H_of(m) - m) < 0.05
        assert prof.M[m - 1] == 2 ** m
    assert prof.N == 100_000
    assert prof.corrected


def test_markov_chain_entropy_rate():
    # flip probability 1/4: rate -.25*log2(.25) - .75*log2(.75)
    prof = block_entropies(_markov_chain(100_000, 0.25, seed=1), 6)
    want = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
    assert abs(prof.h_of(6) - want) < 0.02
    assert abs(source_entropy_estimate(prof) - prof.h_of(6)) == 0.0


def test_conditional_entropy_non_increasing():
    for bits in (_coin(50_000, 5), _markov_chain(50_000, 0.1, 6)):
        prof = block_entropies(bits, 6)
        for m in range(1, 7):
            assert prof.h_of(m) <= prof.h_of(m - 1) + 0.01


def test_block_entropy_bounds():
    bits = _coin(5_000, 7)
    prof = block_entropies(bits, 6)
    n = len(bits)
    for m in range(1, 8):
        assert prof.M[m - 1] <= min(2 ** m, n - m + 1)
    assert np.all(np.diff(prof.H) > -1e-3)  # H_m non-decreasing in m


def test_bit_flip_leaves_entropies_invariant():
    bits = _markov_chain(20_000, 0.3, 8)
    a = block_entropies(bits, 6)
    b = block_entropies(1 - bits, 6)
    assert np.allclose(a.H, b.H, rtol=0, atol=1e-12)
    assert np.allclose(a.h, b.h, rtol=0, atol=1e-12)
    assert np.array_equal(a.M, b.M)


def test_log_base_conversion():
    bits = _coin(10_000, 9)
    bits_prof = block_entropies(bits, 6)
    nats_prof = block_entropies(bits, 6, log_base=math.e)
    assert np.allclose(nats_prof.H, bits_prof.H * math.log(2),
                       rtol=1e-12, atol=0)


def test_entropy_validation():
    with pytest.raises(ValueError, match="empty"):
        block_entropies(np.array([], dtype=np.uint8), 6)
    with pytest.raises(ValueError, match="m_max"):
        block_entropies(_coin(100), 0)
    with pytest.raises(ValueError, match="too short"):
        block_entropies(_coin(5), 6)
    with pytest.raises(ValueError, match="binary"):
        block_entropies(np.array([0, 1, 2]), 1)
    with pytest.raises(ValueError, match="one-dimensional"):
        block_entropies(np.zeros((3, 3)), 1)


def test_short_sequence_warns():
    with pytest.warns(UserWarning, match="unreliable"):
        block_entropies(_coin(50), 6)


def test_profile_index_guards():
    prof = block_entropies(_coin(1_000), 4)
    with pytest.raises(IndexError):
        prof.h_of(5)
    with pytest.raises(IndexError):
        prof.H_of(6)
    with pytest.raises(ValueError, match="m_max"):
        source_entropy_estimate(prof)


# ----------------------------------------------- exact periodic profiles


def test_periodic_block_entropies_period6():
    prof = periodic_block_entropies([0, 0, 0, 1, 1, 1], 8)
    assert prof.H_of(1) == 1.0  # three 0s, three 1s
    # all six cyclic windows distinct from m=3 on: h_m is zero bitwise
    for m in range(3, 9):
        assert prof.h_of(m) == 0.0
        assert prof.M[m - 1] == 6
    assert prof.h_of(2) > 0.0
    assert not prof.corrected


def test_periodic_block_entropies_alternating():
    prof = periodic_block_entropies([0, 1], 6)
    assert prof.H_of(1) == 1.0
    for m in range(2, 7):
        assert prof.h_of(m) == 0.0
        assert prof.M[m - 1] == 2


def test_periodic_block_entropies_match_infinite_repetition():
    # long finite repetition without correction converges to the cyclic
    # profile; compare at modest m where edge effects are tiny
    block = np.array([0, 0, 1, 0, 1, 1, 1], dtype=np.uint8)
    exact = periodic_block_entropies(block, 6)
    finite = block_entropies(np.tile(block, 5_000), 6,
                             apply_correction=False)
    assert np.allclose(finite.H, exact.H, rtol=0, atol=5e-3)


def test_periodic_block_entropies_rejects_empty():
    with pytest.raises(ValueError, match="empty"):
        periodic_block_entropies([], 4)


# ------------------------------------------------------------------ LZ76


def test_lz76_worked_string():
    bits = np.array([int(c) for c in "1010010010111110"], dtype=np.uint8)
    res = lz76(bits)
    assert res.s == 5
    assert lz76_phrases(bits) == ["1", "0", "100", "100101", "11110"]
    assert res.lz == 5 * math.log2(16) / 16


def _brute_lz76_phrases(s):
    """Exhaustive-history parsing by direct definition, char by char.

    A phrase grows while the candidate occurs in the text up to (not
    including) its own last character; the first non-reproducible prefix
    closes the phrase. Trailing reproducible material forms a last phrase.
    """
    phrases = []
    start = 0
    n = len(s)
    while start < n:
        length = 1
        while start + length <= n:
            cand = s[start:start + length]
            if cand not in s[:start + length - 1]:
                break
            length += 1
        length = min(length, n - start)
        phrases.append(s[start:start + length])
        start += length
    return phrases


def test_lz76_against_brute_force_parser():
    rng = np.random.default_rng(10)
    cases = [rng.integers(0, 2, int(n)).astype(np.uint8)
             for n in rng.integers(1, 120, 25)]
    cases += [np.tile([0, 1], 40), np.zeros(60, dtype=np.uint8),
              np.array([int(c) for c in "1010010010111110"], dtype=np.uint8)]
    for bits in cases:
        s = "".join(map(str, bits.tolist()))
        want = _brute_lz76_phrases(s)
        assert lz76_phrases(bits) == want
        assert lz76(bits).s == len(want)


def test_lz76_phrases_concatenate_to_input():
    rng = np.random.default_rng(11)
    for _ in range(200):
        bits = rng.integers(0, 2, int(rng.integers(1, 400))).astype(np.uint8)
        phrases = lz76_phrases(bits)
        assert "".join(phrases) == "".join(map(str, bits.tolist()))
        assert len(phrases) == lz76(bits).s


def test_lz76_periodic_is_tiny():
    bits = np.tile([0, 1], 5_000)
    res = lz76(bits)
    assert res.s == 3  # '0', '1', then one self-copying phrase
    assert res.lz < 0.02


def test_lz76_fair_coin_near_one():
    assert 0.85 <= lz76(_coin(10_000, 12)).lz <= 1.15


def test_lz76_edge_cases():
    one = lz76(np.array([1], dtype=np.uint8))
    assert one.s == 1 and one.lz == 0.0
    with pytest.raises(ValueError, match="empty"):
        lz76(np.array([], dtype=np.uint8))


# ------------------------------------------------------- compressibility


def test_compressibility_extremes():
    assert compressibility(np.zeros(10_000, dtype=np.uint8)) > 0.99
    assert compressibility(np.tile([0, 1], 5_000)) > 0.99
    assert compressibility(_coin(10_000, 13)) < 0.2


def test_compressibility_matches_code_length_formula():
    bits = _coin(4_000, 14)
    s = lz76(bits).s
    want = 1.0 - s * (math.log2(s) + 1.0) / len(bits)
    assert abs(compressibility(bits) - want) < 1e-12


# ----------------------------------------------------------- Markov fits


def test_markov_hand_counts_period8_block():
    mk = markov_matrix([0, 0, 0, 0, 1, 1, 1, 1])
    assert mk.counts == (3, 0, 1, 3)
    assert mk.p00 == 0.75
    assert mk.p01 == 0.25
    assert mk.p11 == 1.0
    assert mk.p10 == 0.0
    assert mk.matrix.shape == (2, 2)
    assert mk.matrix[0, 0] == mk.p11 and mk.matrix[1, 1] == mk.p00


def test_markov_rows_sum_to_one():
    mk = markov_matrix(_coin(2_000, 15))
    assert abs(mk.p11 + mk.p10 - 1.0) < 1e-12
    assert abs(mk.p00 + mk.p01 - 1.0) < 1e-12


def test_markov_undefined_rows_are_nan():
    mk = markov_matrix(np.zeros(10, dtype=np.uint8))
    assert math.isnan(mk.p11) and math.isnan(mk.p10)
    assert mk.p00 == 1.0 and mk.p01 == 0.0
    assert mk.counts == (0, 0, 0, 9)


def test_markov_transposes_under_bit_flip():
    bits = _markov_chain(5_000, 0.2, 16)
    a = markov_matrix(bits)
    b = markov_matrix(1 - bits)
    assert (a.p11, a.p10, a.p01, a.p00) == (b.p00, b.p01, b.p10, b.p11)


def test_markov_needs_two_symbols():
    with pytest.raises(ValueError, match="two symbols"):
        markov_matrix(np.array([1], dtype=np.uint8))


# ------------------------------------------------------ period detection


def test_detect_period_ignores_transient_head():
    bits = np.concatenate([_coin(100, 17), np.tile([0, 1, 0, 1, 1, 1], 50)])
    assert detect_period(bits) == 6
    assert repeating_block(bits, 6).tolist() == [0, 1, 0, 1, 1, 1]


def test_detect_period_trivials():
    assert detect_period(np.ones(100, dtype=np.uint8)) == 1
    assert detect_period(_coin(2_000, 18)) is None


def test_detect_period_respects_cap():
    bits = np.tile([0, 0, 0, 1, 1, 1], 40)
    assert detect_period(bits, max_period=4) is None
    with pytest.raises(ValueError, match="N/4"):
        detect_period(bits, max_period=100)


def test_periodic_onset():
    bits = np.array([1, 1, 0, 1, 0, 1, 0, 1], dtype=np.uint8)
    assert periodic_onset(bits, 2) == 1
    assert periodic_onset(np.tile([0, 1], 10), 2) == 0


def test_repeating_block_is_minimal_rotation():
    assert repeating_block([1, 1, 0, 1, 1, 0], 3).tolist() == [0, 1, 1]


# --------------------------------------------- measured orbit properties


def test_r59p25_orbit_breaks_symmetry():
    # asymmetric stable orbit: unequal symbol frequencies push H_1 below
    # the 1-bit ceiling
    traj = integrate("lorenz", LorenzParams(r=59.25), (1.0, 1.0, 1.0),
                     IntegratorConfig(dt=0.01, t_total=2600.0,
                                      t_transient=1000.0))
    seq = encode_trajectory(traj, PartitionSpec(LORENZ_FLIP_FLOP))
    assert detect_period(seq.bits) == 5
    assert repeating_block(seq.bits, 5).tolist() == [0, 1, 1, 1, 1]
    prof = periodic_block_entropies(repeating_block(seq.bits, 5), 6)
    want = -(0.2 * math.log2(0.2) + 0.8 * math.log2(0.8))
    assert abs(prof.H_of(1) - want) < 1e-12
    assert prof.H_of(1) < 1.0
    measured = block_entropies(seq.bits, 6)
    assert abs(measured.H_of(1) - want) < 0.01


def test_r28_markov_matrix_roughly_symmetric(lorenz28):
    seq = encode_trajectory(lorenz28, PartitionSpec(LORENZ_FLIP_FLOP))
    mk = markov_matrix(seq.bits)
    assert abs(mk.p11 - mk.p00) <= 0.05
    assert abs(mk.p01 - mk.p10) <= 0.05


# ------------------------------------------------------- report plumbing


def test_measure_sequence_consistent():
    bits = _markov_chain(5_000, 0.25, 19)
    report = measure_sequence(bits)
    assert report.lz.s == lz76(bits).s
    assert report.entropy.N == 5_000
    assert report.detected_period is None
    assert report.markov.counts == markov_matrix(bits).counts
    assert report.compressibility == compressibility(bits)


def test_report_csv_format(tmp_path):
    report = measure_sequence(np.tile([0, 0, 0, 1, 1, 1], 200))
    path = tmp_path / "report.csv"
    write_report_csv(report, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n_symbols,h6,lz,s,R,p11,p10,p01,p00,period"
    row = lines[1].split(",")
    assert row[0] == "1200"
    assert row[-1] == "6"


def test_entropy_profile_csv_format(tmp_path):
    prof = block_entropies(_coin(1_000, 20), 6)
    path = tmp_path / "profile.csv"
    write_entropy_profile_csv(prof, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "m,H_m,h_m,M_m"
    assert len(lines) == 9  # header + m=0 row + m=1..7
    assert lines[1].startswith("0,,")  # H undefined at m=0
    assert lines[-1].split(",")[2] == ""  # h undefined at m=m_max+1
