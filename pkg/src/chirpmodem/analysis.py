"""Analytic error-rate machinery and PAPR statistics.

For a fixed set of per-path Doppler shifts, the received vector is linear in
the path gains: y = E(x) h + z, where column l of E(x) pushes the data
vector through the l-th delayed/Doppler-shifted branch of the modem chain.
The Gram matrix Theta = (E(x) - E(x_hat))^H (E(x) - E(x_hat)) of a codeword
pair determines its pairwise error probability under ML detection, the union
bound over all pairs upper-bounds the BER, and the minimum Theta rank over
pairs is the diversity order.

PAPR helpers (peak-to-mean power on the CP-free frame body, optional
frequency-domain oversampling) and empirical CCDF evaluation live here too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equalizers import enumerate_codewords
from .errors import ConfigError
from .numerics import hermitian_rank_eigs
from .waveform import (
    CHIRPED_DFTS_OFDM,
    FrameConfig,
    TimeFrame,
    bits_per_symbol,
    constellation,
    demap_symbols,
    transmit_matrix,
    receive_matrix,
)


@dataclass
class PairSpectrum:
    """Rank, non-zero eigenvalues, and bit distance of one codeword pair."""

    rank: int
    eigenvalues: np.ndarray
    hamming_bits: int


@dataclass
class CcdfCurve:
    """Empirical probability of exceeding each threshold on a dB grid."""

    papr_db: np.ndarray
    prob_exceed: np.ndarray


def path_operators(cfg: FrameConfig, dopplers) -> list[np.ndarray]:
    """Per-path symbols-to-observations operators for fixed Doppler shifts.

    Element l is the N x M matrix of the modem chain with the channel reduced
    to a single unit-gain tap of delay l and Doppler dopplers[l]; stacking
    their outputs column-wise gives E(x).
    """
    dopplers = np.asarray(dopplers, dtype=np.float64)
    n_fft = cfg.n_fft
    if dopplers.size > n_fft:
        raise ValueError(f"{dopplers.size} paths exceed frame length {n_fft}")
    tx = transmit_matrix(cfg, CHIRPED_DFTS_OFDM)
    rx = receive_matrix(cfg, CHIRPED_DFTS_OFDM)
    n = np.arange(n_fft)
    ops = []
    for l in range(dopplers.size):
        phase = np.exp(2j * np.pi * dopplers[l] * n / n_fft)
        ops.append(rx @ (phase[:, None] * np.roll(tx, l, axis=0)))
    return ops


def build_E(x: np.ndarray, cfg: FrameConfig, dopplers) -> np.ndarray:
    """N x (L+1) matrix whose column l is the l-th path response to x."""
    x = np.asarray(x, dtype=np.complex128)
    if x.size != cfg.m_dft:
        raise ValueError(f"expected {cfg.m_dft} symbols, got {x.size}")
    ops = path_operators(cfg, dopplers)
    return np.stack([op @ x for op in ops], axis=1)


def _difference_spectrum(delta: np.ndarray, ops: list[np.ndarray],
                         tol: float = 1e-9) -> tuple[int, np.ndarray]:
    """Rank and non-zero eigenvalues of the pair Gram matrix for x - x_hat.

    E(.) is linear, so E(x) - E(x_hat) = E(delta) and the spectrum depends on
    the pair only through its difference vector.
    """
    e = np.stack([op @ delta for op in ops], axis=1)
    theta = e.conj().T @ e
    theta = 0.5 * (theta + theta.conj().T)  # clamp fp asymmetry
    return hermitian_rank_eigs(theta, tol=tol)


def pair_spectrum(x: np.ndarray, x_hat: np.ndarray, cfg: FrameConfig, dopplers) -> PairSpectrum:
    """Eigen-spectrum of the pair Gram matrix plus the bit distance."""
    x = np.asarray(x, dtype=np.complex128)
    x_hat = np.asarray(x_hat, dtype=np.complex128)
    if x.shape != x_hat.shape:
        raise ValueError("codewords must have equal length")
    if np.array_equal(x, x_hat):
        raise ValueError("codewords must differ")
    ops = path_operators(cfg, dopplers)
    rank, eigs = _difference_spectrum(x - x_hat, ops)
    d = int(np.sum(demap_symbols(x, cfg.alphabet) != demap_symbols(x_hat, cfg.alphabet)))
    return PairSpectrum(rank=rank, eigenvalues=eigs, hamming_bits=d)


def pep(spec: PairSpectrum, gamma: float, n_paths_total: int) -> float:
    """Pairwise error probability at per-symbol SNR gamma.

    Two-term product approximation; equals 1/3 at gamma = 0 and decays with
    slope -rank on a log-log axis once every gamma*lambda_r term dominates.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    lam = np.asarray(spec.eigenvalues, dtype=np.float64)
    t4 = np.prod(1.0 / (1.0 + gamma * lam / (4.0 * n_paths_total)))
    t3 = np.prod(1.0 / (1.0 + gamma * lam / (3.0 * n_paths_total)))
    return float(t4 / 12.0 + t3 / 4.0)


def pep_high_snr(spec: PairSpectrum, gamma: float, n_paths_total: int) -> float:
    """High-SNR power-law form of the pairwise error probability."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    lam = np.asarray(spec.eigenvalues, dtype=np.float64)
    r = spec.rank
    geo = float(np.prod(lam)) ** (1.0 / r)
    return float(
        (geo * gamma / (4.0 * n_paths_total)) ** (-r) / 12.0
        + (geo * gamma / (3.0 * n_paths_total)) ** (-r) / 4.0
    )


def _pair_spectra(cfg: FrameConfig, dopplers):
    """Spectra and bit distances over all unordered codeword pairs.

    Spectra are cached per difference vector (E is linear, so pairs sharing a
    difference share a spectrum); the cache typically collapses the quadratic
    pair count to a handful of eigendecompositions.
    """
    symbols, bits = enumerate_codewords(cfg.alphabet, cfg.m_dft)
    ops = path_operators(cfg, dopplers)
    cache: dict[bytes, tuple[int, np.ndarray]] = {}
    count = symbols.shape[0]
    for i in range(count):
        for j in range(i + 1, count):
            delta = symbols[i] - symbols[j]
            key = np.round(delta.view(np.float64), 9).tobytes()
            if key not in cache:
                cache[key] = _difference_spectrum(delta, ops)
            rank, eigs = cache[key]
            d = int(np.sum(bits[i] != bits[j]))
            yield PairSpectrum(rank=rank, eigenvalues=eigs, hamming_bits=d)


def ber_union_bound(cfg: FrameConfig, snr_db, dopplers, use_high_snr: bool = False) -> np.ndarray:
    """BER upper bound on an SNR grid by summing bit-weighted pair PEPs.

    Every ordered codeword pair contributes its pairwise error probability
    weighted by the number of differing bits, normalized by the codeword
    count and bits per codeword.  Spectra are computed once and reused across
    the whole grid.
    """
    snr_db = np.atleast_1d(np.asarray(snr_db, dtype=np.float64))
    gammas = 10.0 ** (snr_db / 10.0)
    n_paths = len(np.asarray(dopplers))
    k = bits_per_symbol(cfg.alphabet)
    q = constellation(cfg.alphabet).size
    n_codewords = q**cfg.m_dft
    pep_fn = pep_high_snr if use_high_snr else pep
    acc = np.zeros_like(gammas)
    for spec in _pair_spectra(cfg, dopplers):
        weights = np.array([pep_fn(spec, g, n_paths) for g in gammas])
        acc += 2.0 * spec.hamming_bits * weights  # both orderings of the pair
    return acc / (n_codewords * cfg.m_dft * k)


def diversity_order(cfg: FrameConfig, dopplers) -> int:
    """Minimum pair-Gram rank over all distinct codeword pairs."""
    return min(spec.rank for spec in _pair_spectra(cfg, dopplers))


def papr_db(frame: TimeFrame | np.ndarray, oversample: int = 1) -> float:
    """Peak-to-mean power ratio in dB of the CP-free frame body.

    oversample > 1 interpolates via frequency-domain zero-padding to capture
    peaks between the Nyquist-rate samples.
    """
    if oversample < 1:
        raise ValueError(f"oversample must be >= 1, got {oversample}")
    body = frame.body if isinstance(frame, TimeFrame) else np.asarray(frame, dtype=np.complex128)
    if body.size == 0 or not np.any(body):
        raise ValueError("PAPR of an all-zero frame is undefined")
    if oversample > 1:
        n = body.size
        spec = np.fft.fft(body)
        half = n // 2
        padded = np.concatenate([spec[:half], np.zeros((oversample - 1) * n, dtype=np.complex128), spec[half:]])
        body = np.fft.ifft(padded)
    power = np.abs(body) ** 2
    return float(10.0 * np.log10(np.max(power) / np.mean(power)))


def ccdf(values, grid) -> CcdfCurve:
    """Fraction of values strictly exceeding each grid threshold."""
    values = np.asarray(values, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    if values.size == 0:
        raise ValueError("need at least one value")
    prob = np.count_nonzero(values[None, :] > grid[:, None], axis=1) / values.size
    return CcdfCurve(papr_db=grid.copy(), prob_exceed=prob)


def check_enumeration_guard(alphabet: str, n_symbols: int) -> int:
    """Candidate count if within the exhaustive-search guard, else raise."""
    q = constellation(alphabet).size
    count = q**n_symbols
    from .equalizers import ML_SEARCH_GUARD

    if count > ML_SEARCH_GUARD:
        raise ConfigError(
            f"{q}^{n_symbols} = {count} codewords exceeds the enumeration guard"
        )
    return count
