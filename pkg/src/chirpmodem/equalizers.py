"""LMMSE and exhaustive-ML symbol recovery over an effective channel.

The LMMSE estimate is H^H (H H^H + sigma^2 I)^{-1} y, solved through a
Cholesky factorization of the Hermitian positive-definite Gram matrix (no
explicit inverse).  The ML detector enumerates the full candidate alphabet
through the composed symbol-to-observation map, guarded against search
spaces above 2^20 candidates.

`output_snr` splits the post-LMMSE signal and noise powers per symbol (the
diagonals of the two trace arguments whose ratio is the aggregate output
SNR), which is what exposes deep per-subcarrier fades versus flat spread
responses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import waveform
from .channel import EffectiveChannel
from .errors import CapacityError

LMMSE = "lmmse"
ML = "ml"

ML_SEARCH_GUARD = 2**20
_ML_CHUNK = 4096


@dataclass
class EqualizerOutput:
    estimates: np.ndarray
    hard: np.ndarray
    bits: np.ndarray
    method: str
    used_fallback: bool = False


@dataclass
class OutputSnrReport:
    """Per-symbol and aggregate post-equalization SNR decomposition."""

    per_symbol_signal: np.ndarray
    per_symbol_noise: np.ndarray
    per_symbol_snr_db: np.ndarray = field(init=False)
    aggregate_snr_db: float = field(init=False)

    def __post_init__(self):
        sig = np.asarray(self.per_symbol_signal, dtype=np.float64)
        noi = np.asarray(self.per_symbol_noise, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(noi > 0, sig / np.where(noi > 0, noi, 1.0), np.inf)
            ratio = np.where((sig == 0) & (noi == 0), 0.0, ratio)
            self.per_symbol_snr_db = np.where(
                ratio > 0, 10.0 * np.log10(np.where(ratio > 0, ratio, 1.0)), -np.inf
            )
        total_sig, total_noi = float(np.sum(sig)), float(np.sum(noi))
        if total_sig > 0 and total_noi > 0:
            self.aggregate_snr_db = 10.0 * np.log10(total_sig / total_noi)
        else:
            self.aggregate_snr_db = -np.inf

    @property
    def aggregate_linear(self) -> float:
        total_noi = float(np.sum(self.per_symbol_noise))
        if total_noi <= 0:
            return -np.inf if np.sum(self.per_symbol_signal) <= 0 else np.inf
        return float(np.sum(self.per_symbol_signal)) / total_noi


def _gram_factor(h: np.ndarray, noise_var: float):
    """Cholesky factor of H H^H + noise_var * I."""
    gram = h @ h.conj().T
    gram[np.diag_indices_from(gram)] += noise_var
    return scipy.linalg.cho_factor(gram, lower=True, check_finite=False)


def lmmse_equalize(y: np.ndarray, chan: EffectiveChannel, alphabet: str = waveform.QPSK) -> EqualizerOutput:
    """LMMSE symbol estimates with nearest-point hard decisions.

    With zero noise variance the estimator degenerates: a full-column-rank
    channel is solved as least squares (the zero-forcing limit), anything
    rank-deficient falls back to the pseudo-inverse with a flag set.
    """
    y = np.asarray(y, dtype=np.complex128)
    h = chan.matrix
    noise_var = chan.noise_variance
    used_fallback = False
    if noise_var > 0:
        factor = _gram_factor(h, noise_var)
        est = h.conj().T @ scipy.linalg.cho_solve(factor, y, check_finite=False)
    else:
        # zero-noise limit: least squares; pinv only if rank-deficient
        est, _, rank, _ = np.linalg.lstsq(h, y, rcond=None)
        if rank < h.shape[1]:
            used_fallback = True
    hard, bits = waveform.hard_decision(est, alphabet)
    return EqualizerOutput(estimates=est, hard=hard, bits=bits, method=LMMSE,
                           used_fallback=used_fallback)


def enumerate_codewords(alphabet: str, n_symbols: int) -> tuple[np.ndarray, np.ndarray]:
    """All Q^n symbol vectors and their bit labels, in lexicographic bit order.

    Raises CapacityError above the 2^20-candidate guard so nobody launches an
    accidental full search over a 256-symbol frame.
    """
    points = waveform.constellation(alphabet)
    k = waveform.bits_per_symbol(alphabet)
    q = points.size
    count = q**n_symbols
    if count > ML_SEARCH_GUARD:
        raise CapacityError(
            f"{q}^{n_symbols} = {count} candidates exceeds the {ML_SEARCH_GUARD} guard"
        )
    idx = np.arange(count)
    labels = np.empty((count, n_symbols), dtype=np.int64)
    for pos in range(n_symbols - 1, -1, -1):
        labels[:, pos] = idx % q
        idx = idx // q
    symbols = points[labels]
    shifts = np.arange(k - 1, -1, -1)
    bits = ((labels[:, :, None] >> shifts[None, None, :]) & 1).reshape(count, n_symbols * k)
    return symbols, bits


def ml_equalize(y: np.ndarray, chan: EffectiveChannel, alphabet: str = waveform.QPSK) -> EqualizerOutput:
    """Exact maximum-likelihood detection by exhaustive enumeration.

    Minimizes ||y - H x|| over every candidate symbol vector; ties resolve
    to the lexicographically-first bit label.
    """
    y = np.asarray(y, dtype=np.complex128)
    h = chan.matrix
    cands, bits = enumerate_codewords(alphabet, h.shape[1])
    best_idx, best_val = 0, np.inf
    for start in range(0, cands.shape[0], _ML_CHUNK):
        block = cands[start:start + _ML_CHUNK]
        resid = y[None, :] - block @ h.T
        costs = np.einsum("ij,ij->i", resid, resid.conj()).real
        local = int(np.argmin(costs))
        if costs[local] < best_val:
            best_idx, best_val = start + local, float(costs[local])
    est = cands[best_idx]
    return EqualizerOutput(estimates=est, hard=est.copy(), bits=bits[best_idx].copy(),
                           method=ML)


def output_snr(chan: EffectiveChannel) -> OutputSnrReport:
    """Post-LMMSE signal/noise power split, per symbol and aggregate.

    With G = H^H (H H^H + sigma^2 I)^{-1}: signal powers are the diagonal of
    (G H)^H (G H), noise powers sigma^2 times the diagonal of G G^H; the
    aggregate SNR is the ratio of their sums (a trace ratio).  Expectation
    over channel draws is the caller's job.
    """
    h = chan.matrix
    noise_var = chan.noise_variance
    if noise_var <= 0:
        raise ValueError("output_snr requires a positive noise variance")
    factor = _gram_factor(h, noise_var)
    g = scipy.linalg.cho_solve(factor, h, check_finite=False).conj().T  # M x N
    gh = g @ h
    per_signal = np.einsum("ij,ij->j", gh.conj(), gh).real
    per_noise = noise_var * np.einsum("ij,ij->i", g, g.conj()).real
    return OutputSnrReport(per_symbol_signal=per_signal, per_symbol_noise=per_noise)
