"""Complexity measures for binary symbol sequences.

Block entropies use overlapping word counts with an optional finite-size
bias correction of (M_m - 1)/(2N) nats, converted to the working log
base. LZ76 complexity counts phrases of the exhaustive-history parsing,
where each phrase is the shortest prefix of the remainder that cannot be
reproduced by copy-extension from the preceding text. All entropies are
in bits by default; pass log_base=e for natural-log values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np


def _as_bits(seq) -> np.ndarray:
    bits = np.asarray(getattr(seq, "bits", seq), dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError("symbol sequence must be one-dimensional")
    if bits.size and bits.max() > 1:
        raise ValueError("symbol sequence must be binary")
    return bits


@dataclass
class BlockEntropyProfile:
    """Entropies H_1..H_{m_max+1}, conditionals h_0..h_{m_max}.

    ``H[i]`` holds H_{i+1} and ``M[i]`` the matching distinct-word count;
    ``h[m]`` holds h_m with h_0 := H_1.
    """

    m_max: int
    H: np.ndarray
    h: np.ndarray
    M: np.ndarray
    N: int
    corrected: bool

    def H_of(self, m: int) -> float:
        if not 1 <= m <= self.m_max + 1:
            raise IndexError(f"H_{m} not computed (m_max={self.m_max})")
        return float(self.H[m - 1])

    def h_of(self, m: int) -> float:
        if not 0 <= m <= self.m_max:
            raise IndexError(f"h_{m} not computed (m_max={self.m_max})")
        return float(self.h[m])


@dataclass
class MarkovMatrix2:
    """Single-step binary transition probabilities.

    Probabilities are conditioned on the source symbol: p11 + p10 = 1 and
    p00 + p01 = 1 whenever that symbol occurs; entries conditioned on an
    absent symbol are NaN.
    """

    p11: float
    p10: float
    p01: float
    p00: float
    counts: tuple  # (n11, n10, n01, n00)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.p11, self.p01], [self.p10, self.p00]])


@dataclass
class LzResult:
    s: int
    lz: float
    N: int


@dataclass
class ComplexityReport:
    entropy: BlockEntropyProfile
    markov: MarkovMatrix2
    lz: LzResult
    compressibility: float
    detected_period: Optional[int]


def block_entropies(seq, m_max: int, apply_correction: bool = True,
                    log_base: float = 2.0) -> BlockEntropyProfile:
    """Block and conditional entropies from overlapping word counts."""
    bits = _as_bits(seq)
    N = len(bits)
    if N == 0:
        raise ValueError("empty symbol sequence")
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    if N < m_max + 1:
        raise ValueError(f"sequence of length {N} too short for m_max={m_max}")
    if N < 2 ** m_max:
        warnings.warn(f"N={N} < 2^{m_max}; entropies at large m are "
                      "unreliable", stacklevel=2)
    ln_base = math.log(log_base)
    b64 = bits.astype(np.int64)
    codes = np.zeros(N, dtype=np.int64)
    H = np.empty(m_max + 1)
    M = np.empty(m_max + 1, dtype=np.int64)
    for m in range(1, m_max + 2):
        codes = codes[: N - m + 1] * 2 + b64[m - 1:]
        counts = np.bincount(codes)
        counts = counts[counts > 0]
        p = counts / counts.sum()
        h_obs = float(-(p * np.log(p)).sum() / ln_base)
        M[m - 1] = len(counts)
        if apply_correction:
            h_obs += (len(counts) - 1) / (2.0 * N * ln_base)
        H[m - 1] = h_obs
    h = np.empty(m_max + 1)
    h[0] = H[0]
    h[1:] = H[1:] - H[:-1]
    return BlockEntropyProfile(m_max=m_max, H=H, h=h, M=M, N=N,
                               corrected=apply_correction)


def periodic_block_entropies(block, m_max: int,
                             log_base: float = 2.0) -> BlockEntropyProfile:
    """Exact entropy profile of the infinite repetition of ``block``.

    Word probabilities come from cyclic windows of the repeating block,
    so for m at or beyond the block's minimal period every window is
    distinct and equally likely, making h_m exactly zero there (bitwise,
    not just to rounding).
    """
    bits = _as_bits(block)
    p = len(bits)
    if p == 0:
        raise ValueError("empty block")
    ln_base = math.log(log_base)
    doubled = np.concatenate([bits, bits])
    H = np.empty(m_max + 1)
    M = np.empty(m_max + 1, dtype=np.int64)
    for m in range(1, m_max + 2):
        words = {}
        for i in range(p):
            w = doubled[i:i + m].tobytes()
            words[w] = words.get(w, 0) + 1
        probs = [c / p for c in words.values()]
        H[m - 1] = -sum(q * math.log(q) for q in probs) / ln_base
        M[m - 1] = len(words)
    h = np.empty(m_max + 1)
    h[0] = H[0]
    h[1:] = H[1:] - H[:-1]
    return BlockEntropyProfile(m_max=m_max, H=H, h=h, M=M, N=p,
                               corrected=False)


def source_entropy_estimate(profile: BlockEntropyProfile,
                            m_star: int = 6) -> float:
    """Conditional entropy h_{m*} as the source-entropy estimate."""
    if profile.m_max < m_star:
        raise ValueError(f"profile has m_max={profile.m_max} < {m_star}")
    return profile.h_of(m_star)


def _phrase_lengths(s: str):
    """Phrase lengths of the exhaustive-history LZ76 parsing.

    A candidate prefix of length l is reproducible iff it occurs in the
    text up to (but not including) its own last character, which permits
    self-overlapping copies. Reproducibility is monotone decreasing in l,
    so the shortest non-reproducible prefix is found by bisection.
    """
    n = len(s)
    out = []
    p = 0
    while p < n:
        hi = n - p
        if s.find(s[p:], 0, n - 1) != -1:
            out.append(hi)  # reproducible remainder closes the parse
            break
        lo = 1
        while lo < hi:
            mid = (lo + hi) // 2
            if s.find(s[p:p + mid], 0, p + mid - 1) != -1:
                lo = mid + 1
            else:
                hi = mid
        out.append(lo)
        p += lo
    return out


def lz76_phrases(seq) -> list[str]:
    """The exhaustive-history parsing itself, for round-trip checks."""
    bits = _as_bits(seq)
    s = (bits + ord("0")).tobytes().decode("ascii")
    phrases = []
    p = 0
    for length in _phrase_lengths(s):
        phrases.append(s[p:p + length])
        p += length
    return phrases


def lz76(seq) -> LzResult:
    """Normalized LZ76 complexity s*log2(N)/N."""
    bits = _as_bits(seq)
    N = len(bits)
    if N < 1:
        raise ValueError("empty symbol sequence")
    s = (bits + ord("0")).tobytes().decode("ascii")
    count = len(_phrase_lengths(s))
    return LzResult(s=count, lz=count * math.log2(N) / N if N > 1 else 0.0,
                    N=N)


def compressibility(seq) -> float:
    """R = 1 - L_comp/L_orig with the LZ76 code-length estimate.

    Each of the s phrases costs log2(s) bits of copy reference plus one
    literal bit, against N raw bits.
    """
    bits = _as_bits(seq)
    N = len(bits)
    if N < 1:
        raise ValueError("empty symbol sequence")
    s = lz76(bits).s
    code_bits = s * (math.log2(s) + 1.0) if s > 1 else 1.0
    return float(min(1.0, max(0.0, 1.0 - code_bits / N)))


def markov_matrix(seq) -> MarkovMatrix2:
    """Empirical single-step transition probabilities."""
    bits = _as_bits(seq)
    if len(bits) < 2:
        raise ValueError("need at least two symbols for transitions")
    pair = 2 * bits[:-1].astype(np.int64) + bits[1:]
    c = np.bincount(pair, minlength=4)
    n00, n01, n10, n11 = (int(c[0]), int(c[1]), int(c[2]), int(c[3]))
    from1 = n11 + n10
    from0 = n00 + n01
    p11 = n11 / from1 if from1 else math.nan
    p10 = n10 / from1 if from1 else math.nan
    p00 = n00 / from0 if from0 else math.nan
    p01 = n01 / from0 if from0 else math.nan
    return MarkovMatrix2(p11=p11, p10=p10, p01=p01, p00=p00,
                         counts=(n11, n10, n01, n00))


def detect_period(seq, max_period: Optional[int] = None) -> Optional[int]:
    """Smallest period of the final half of the sequence, if any.

    Only the tail is examined so that a chaotic transient ahead of a
    periodic steady state does not mask the period.
    """
    bits = _as_bits(seq)
    N = len(bits)
    if max_period is None:
        max_period = min(64, N // 4)
    if max_period > N // 4:
        raise ValueError("max_period must not exceed N/4")
    tail = bits[N // 2:]
    for p in range(1, max_period + 1):
        if np.array_equal(tail[:-p], tail[p:]):
            return p
    return None


def periodic_onset(seq, period: int) -> int:
    """First index from which the sequence is exactly ``period``-periodic."""
    bits = _as_bits(seq)
    mism = np.flatnonzero(bits[:-period] != bits[period:])
    return int(mism[-1]) + 1 if len(mism) else 0


def repeating_block(seq, period: int) -> np.ndarray:
    """Canonical (lexicographically minimal rotation) repeating block."""
    bits = _as_bits(seq)
    tail = bits[-period:]
    rotations = [tuple(np.roll(tail, -k)) for k in range(period)]
    return np.array(min(rotations), dtype=np.uint8)


def measure_sequence(seq, m_max: int = 6, apply_correction: bool = True,
                     max_period: Optional[int] = None,
                     log_base: float = 2.0) -> ComplexityReport:
    """All complexity measures of one sequence in a single report."""
    return ComplexityReport(
        entropy=block_entropies(seq, m_max, apply_correction, log_base),
        markov=markov_matrix(seq),
        lz=lz76(seq),
        compressibility=compressibility(seq),
        detected_period=detect_period(seq, max_period),
    )


def write_report_csv(report: ComplexityReport, path) -> None:
    e = report.entropy
    mk = report.markov
    period = "" if report.detected_period is None else report.detected_period
    with open(path, "w") as fh:
        fh.write("n_symbols,h6,lz,s,R,p11,p10,p01,p00,period\n")
        h6 = e.h_of(6) if e.m_max >= 6 else math.nan
        fh.write("%d,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n"
                 % (e.N, h6, report.lz.lz, report.lz.s,
                    report.compressibility, mk.p11, mk.p10, mk.p01, mk.p00,
                    period))


def write_entropy_profile_csv(profile: BlockEntropyProfile, path) -> None:
    """Rows m=0..m_max+1; H_m/M_m undefined at m=0, h_m at m=m_max+1."""
    with open(path, "w") as fh:
        fh.write("m,H_m,h_m,M_m\n")
        fh.write("0,,%.17g,\n" % profile.h[0])
        for m in range(1, profile.m_max + 2):
            h_str = "%.17g" % profile.h[m] if m <= profile.m_max else ""
            fh.write("%d,%.17g,%s,%d\n"
                     % (m, profile.H[m - 1], h_str, profile.M[m - 1]))
