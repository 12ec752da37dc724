"""Runtime side: biased-source simulation, streaming linear extraction, the
von Neumann baseline, the exact output-distribution oracle, and empirical
estimation.

Output words index their bits LSB-first by output coordinate: bit i of a
probability bucket is row i of the generator matrix. Stream files are raw
bytes, MSB-first within each byte, with a ".len" sidecar when the bit count
is not a multiple of 8.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InfeasibleError
from .gf2 import BitMatrix, pack_bits, rank

ORACLE_INPUT_CAP = 26
EMPIRICAL_K_CAP = 24
_PROFILE_ENTRY_CAP = 1 << 25
_SPLIT_BITS = 13


class BitStream:
    """An immutable ordered bit sequence with an exact bit length."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        arr = np.array(bits, dtype=np.uint8, copy=True).reshape(-1)
        if arr.size and arr.max() > 1:
            raise ValueError("stream bits must be 0 or 1")
        arr.setflags(write=False)
        self.bits = arr

    def __len__(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, BitStream) and bool(
            np.array_equal(self.bits, other.bits)
        )

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __repr__(self) -> str:
        return f"BitStream({len(self)} bits)"

    @classmethod
    def from_bytes(cls, data: bytes, nbits: Optional[int] = None) -> "BitStream":
        raw = np.frombuffer(data, np.uint8)
        bits = np.unpackbits(raw)  # MSB-first
        if nbits is not None:
            if not len(bits) - 8 < nbits <= len(bits):
                raise ValueError(
                    f"bit length {nbits} inconsistent with {len(data)} bytes"
                )
            bits = bits[:nbits]
        return cls(bits)

    def to_bytes(self) -> bytes:
        return np.packbits(self.bits).tobytes()

    def write(self, path) -> None:
        """Write packed bytes; a sidecar <path>.len records ragged lengths."""
        with open(path, "wb") as fp:
            fp.write(self.to_bytes())
        sidecar = str(path) + ".len"
        if len(self) % 8:
            with open(sidecar, "w") as fp:
                fp.write(f"{len(self)}\n")
        elif os.path.exists(sidecar):
            os.remove(sidecar)

    @classmethod
    def read(cls, path) -> "BitStream":
        with open(path, "rb") as fp:
            data = fp.read()
        sidecar = str(path) + ".len"
        nbits = None
        if os.path.exists(sidecar):
            with open(sidecar) as fp:
                nbits = int(fp.read().strip())
        return cls.from_bytes(data, nbits)


@dataclass(frozen=True)
class BiasedSourceSpec:
    """IID binary source: P(0) = 1/2 + eps/2, P(1) = 1/2 - eps/2.

    Zeros are fixed as the likelier symbol; every downstream bound is
    symmetric under bit complement so only |P(1) - P(0)| matters.
    """

    eps: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"eps must be in [0, 1], got {self.eps}")

    @property
    def rho0(self) -> float:
        return 0.5 + self.eps / 2.0

    @property
    def rho1(self) -> float:
        return 0.5 - self.eps / 2.0


def generate(spec: BiasedSourceSpec, nbits: int) -> BitStream:
    """Sample nbits IID bits, deterministically for a given seed.

    The seed-to-stream mapping is part of the interface: PCG64 seeded with
    spec.seed, one uniform double per bit, bit = 1 iff the double is below
    P(1). Stable within a release.
    """
    if nbits < 0:
        raise ValueError(f"nbits must be nonnegative, got {nbits}")
    rng = np.random.default_rng(spec.seed)
    u = rng.random(nbits)
    return BitStream((u < spec.rho1).view(np.uint8))


def linear_extract(G: BitMatrix, stream: BitStream) -> BitStream:
    """Apply y = G·x per n-bit block; emits k bits per block in row order.

    A trailing partial block is discarded (padding would inject
    deterministic bits). The hot loop runs on packed 64-bit words: per
    output row one AND, one XOR fold and one popcount across every block
    at once, no per-bit branching.
    """
    n, k = G.cols, G.rows
    nblocks = len(stream) // n
    if nblocks == 0 or k == 0:
        return BitStream(np.zeros(0, np.uint8))
    blocks = pack_bits(stream.bits[: nblocks * n].reshape(nblocks, n))
    out = np.empty((nblocks, k), np.uint8)
    for i in range(k):
        acc = np.bitwise_xor.reduce(blocks & G.words[i], axis=1)
        out[:, i] = (np.bitwise_count(acc) & np.uint64(1)).astype(np.uint8)
    return BitStream(out.reshape(-1))


def von_neumann(stream: BitStream) -> BitStream:
    """Pairwise debiasing: 01 -> 0, 10 -> 1, 00/11 -> nothing."""
    m = len(stream) // 2
    pairs = stream.bits[: 2 * m].reshape(m, 2)
    keep = pairs[:, 0] != pairs[:, 1]
    return BitStream(pairs[keep, 0])


@dataclass(frozen=True)
class ExactStats:
    """Full output distribution statistics (exact oracle or empirical).

    delta is the L1 distance from uniform (twice the TVD); shannon and
    min_entropy are base-2^k entropy rates in [0, 1]; coord_biases[i] is
    |P(Y_i=1) - P(Y_i=0)| for output coordinate i. samples is None for
    exact results and the word count for empirical ones.
    """

    pmf: np.ndarray
    delta: float
    tvd: float
    shannon: float
    min_entropy: float
    coord_biases: np.ndarray
    max_prob: float
    samples: Optional[int] = None


def _stats_from_pmf(pmf: np.ndarray, k: int, samples=None) -> ExactStats:
    pmf = np.asarray(pmf, np.float64)
    uniform = 2.0**-k
    delta = float(np.abs(pmf - uniform).sum())
    nz = pmf[pmf > 0]
    shannon = float(-(nz * np.log2(nz)).sum() / k) + 0.0  # +0.0 normalizes -0.0
    max_prob = float(pmf.max())
    min_entropy = float(-math.log2(max_prob) / k) + 0.0
    idx = np.arange(pmf.size, dtype=np.int64)
    biases = np.empty(k)
    for i in range(k):
        p1 = float(pmf[(idx >> i) & 1 == 1].sum())
        biases[i] = abs(2.0 * p1 - 1.0)
    pmf.setflags(write=False)
    biases.setflags(write=False)
    return ExactStats(
        pmf=pmf,
        delta=delta,
        tvd=delta / 2.0,
        shannon=shannon,
        min_entropy=min_entropy,
        coord_biases=biases,
        max_prob=max_prob,
        samples=samples,
    )


def _weight_probs(n: int, eps: float) -> np.ndarray:
    """P(one specific n-bit input of weight w), for w = 0..n."""
    rho0 = 0.5 + eps / 2.0
    rho1 = 0.5 - eps / 2.0
    w = np.arange(n + 1)
    return rho0 ** (n - w) * rho1**w


def _split_tables(G: BitMatrix):
    """Subset-XOR tables over a low/high split of the input coordinates.

    Output word of input x is t_hi[x >> lo] ^ t_lo[x & (2^lo - 1)]; input
    weight splits the same way.
    """
    n, k = G.cols, G.rows
    dense = G.to_dense()
    colvals = dense.T.astype(np.int64) @ (np.int64(1) << np.arange(k, dtype=np.int64))
    lo = min(n, _SPLIT_BITS)

    def subset_xor(vals):
        t = np.zeros(1 << len(vals), np.int64)
        for j, v in enumerate(vals):
            h = 1 << j
            t[h : 2 * h] = t[:h] ^ v
        return t

    t_lo = subset_xor(colvals[:lo])
    t_hi = subset_xor(colvals[lo:])
    w_lo = np.bitwise_count(np.arange(1 << lo, dtype=np.uint64)).astype(np.int64)
    w_hi = np.bitwise_count(np.arange(t_hi.size, dtype=np.uint64)).astype(np.int64)
    return t_lo, t_hi, w_lo, w_hi


def _check_oracle_pre(G: BitMatrix, cap: int) -> None:
    if G.cols > cap:
        raise InfeasibleError(
            f"exact oracle enumerates 2^n inputs; n={G.cols} is over the cap "
            f"{cap} - use Monte-Carlo simulation instead"
        )
    if rank(G) != G.rows:
        raise ValueError(
            f"exact oracle requires a full-rank matrix "
            f"(rank {rank(G)} < {G.rows} rows)"
        )


def output_weight_profile(G: BitMatrix, cap: int = ORACLE_INPUT_CAP) -> np.ndarray:
    """counts[bucket, w] = number of weight-w inputs mapped to that output.

    The profile separates the geometry of G from the bias, so one pass over
    the 2^n inputs serves every eps. Raises when the table itself would be
    too large; exact_output_pmf then falls back to per-eps accumulation.
    """
    _check_oracle_pre(G, cap)
    n, k = G.cols, G.rows
    if (n + 1) << k > _PROFILE_ENTRY_CAP:
        raise InfeasibleError(
            f"output weight profile needs {(n + 1) << k} cells, over the cap "
            f"{_PROFILE_ENTRY_CAP}"
        )
    t_lo, t_hi, w_lo, w_hi = _split_tables(G)
    prof = np.zeros((1 << k) * (n + 1), np.int64)
    group = max(1, (1 << 20) // t_lo.size)
    for h0 in range(0, t_hi.size, group):
        h1 = min(h0 + group, t_hi.size)
        out = (t_hi[h0:h1, None] ^ t_lo[None, :]).reshape(-1)
        wt = (w_hi[h0:h1, None] + w_lo[None, :]).reshape(-1)
        prof += np.bincount(out * (n + 1) + wt, minlength=prof.size)
    return prof.reshape(1 << k, n + 1)


def stats_from_profile(profile: np.ndarray, eps: float) -> ExactStats:
    """Exact output statistics from a precomputed weight profile."""
    nbuckets, ncols = profile.shape
    k = nbuckets.bit_length() - 1
    pmf = profile @ _weight_probs(ncols - 1, eps)
    return _stats_from_pmf(pmf, k)


def _pmf_direct(G: BitMatrix, eps: float) -> np.ndarray:
    # Fallback when the integer profile would not fit: accumulate float
    # probabilities per chunk and merge chunks with Kahan compensation.
    n, k = G.cols, G.rows
    t_lo, t_hi, w_lo, w_hi = _split_tables(G)
    probs = _weight_probs(n, eps)
    pmf = np.zeros(1 << k)
    comp = np.zeros(1 << k)
    group = max(1, (1 << 20) // t_lo.size)
    for h0 in range(0, t_hi.size, group):
        h1 = min(h0 + group, t_hi.size)
        out = (t_hi[h0:h1, None] ^ t_lo[None, :]).reshape(-1)
        wt = (w_hi[h0:h1, None] + w_lo[None, :]).reshape(-1)
        part = np.bincount(out, weights=probs[wt], minlength=pmf.size)
        y = part - comp
        t = pmf + y
        comp = (t - pmf) - y
        pmf = t
    return pmf


def exact_output_pmf(
    G: BitMatrix, eps: float, cap: int = ORACLE_INPUT_CAP
) -> ExactStats:
    """Exact output distribution of y = G·x under the biased IID source.

    Sums the probability of all 2^n inputs into 2^k buckets by total
    probability; feasible for n <= cap only.
    """
    _check_oracle_pre(G, cap)
    n, k = G.cols, G.rows
    if (n + 1) << k <= _PROFILE_ENTRY_CAP:
        return stats_from_profile(output_weight_profile(G, cap), eps)
    return _stats_from_pmf(_pmf_direct(G, eps), k)


def empirical_stats(stream: BitStream, k: int) -> ExactStats:
    """Histogram estimate of the output distribution over k-bit words.

    The stream is consumed k bits per word in emission order (bit i of the
    word is coordinate i, matching the exact oracle's buckets). The sample
    count is reported so callers can form confidence radii.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k > EMPIRICAL_K_CAP:
        raise InfeasibleError(
            f"k={k} needs 2^{k} histogram bins, over the cap {EMPIRICAL_K_CAP}; "
            f"use per-coordinate marginal biases instead"
        )
    if len(stream) == 0 or len(stream) % k:
        raise ValueError(f"stream length {len(stream)} is not a positive multiple of k={k}")
    m = len(stream) // k
    blocks = stream.bits.reshape(m, k)
    words = np.zeros(m, np.int64)
    for i in range(k):
        words |= blocks[:, i].astype(np.int64) << i
    pmf = np.bincount(words, minlength=1 << k).astype(np.float64) / m
    return _stats_from_pmf(pmf, k, samples=m)


def marginal_biases(stream: BitStream, k: int) -> np.ndarray:
    """Per-coordinate empirical biases |2·mean(bit_i) - 1| without binning."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if len(stream) == 0 or len(stream) % k:
        raise ValueError(f"stream length {len(stream)} is not a positive multiple of k={k}")
    blocks = stream.bits.reshape(-1, k)
    return np.abs(2.0 * blocks.mean(axis=0) - 1.0)


def multinomial_noise_floor(k: int, samples: int) -> float:
    """sqrt(2^k / N): the scale of empirical-TVD noise near uniform."""
    return math.sqrt((1 << k) / samples)


def stats_lines(stats: ExactStats) -> list:
    """Stats as key=value lines, reals at 12 significant digits."""
    lines = [
        f"delta={stats.delta:.12g}",
        f"tvd={stats.tvd:.12g}",
        f"shannon={stats.shannon:.12g}",
        f"min_entropy={stats.min_entropy:.12g}",
        f"max_prob={stats.max_prob:.12g}",
        "coord_biases=" + ",".join(f"{b:.12g}" for b in stats.coord_biases),
    ]
    if stats.samples is not None:
        lines.append(f"samples={stats.samples}")
    return lines
