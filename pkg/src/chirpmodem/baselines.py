"""Comparison modems behind one modulate / effective-channel interface.

AFDM sandwiches the IDFT between two chirp diagonals; OTFS spreads symbols
on a delay-Doppler grid via an inverse discrete Zak transform (rectangular
pulses, one CP per frame so the same circulant channel model applies).  Both
are unitary, which keeps the per-symbol SNR calibration identical across all
waveforms compared here.

This module also provides the kind-string dispatch (`transmit_matrix`,
`receive_matrix`, `modulate_any`, ...) covering the core DFT-spread kinds as
well, so the experiment harness can treat every modem uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import waveform
from .channel import EffectiveChannel
from .errors import ConfigError
from .numerics import unitary_dft
from .waveform import TimeFrame

AFDM = "afdm"
OTFS = "otfs"

ALL_KINDS = (waveform.CHIRPED_DFTS_OFDM, waveform.DFTS_OFDM, AFDM, OTFS, waveform.OFDM)
_CORE = (waveform.CHIRPED_DFTS_OFDM, waveform.DFTS_OFDM, waveform.OFDM)


@dataclass(frozen=True)
class AfdmConfig:
    """Frame length plus the pre- and post-chirp rates."""

    n_fft: int
    c1: float
    c2: float = 0.0

    def __post_init__(self):
        if self.n_fft < 1:
            raise ConfigError(f"n_fft must be >= 1, got {self.n_fft}")
        if self.c1 < 0:
            raise ConfigError(f"c1 must be non-negative, got {self.c1}")

    @classmethod
    def for_doppler(cls, n_fft: int, nu_max: float) -> "AfdmConfig":
        """Rates sized to the channel's normalized Doppler.

        c1 = (2*ceil(nu_max) + 1) / (2N) separates the delay-Doppler images;
        c2 is a small golden-ratio irrational that avoids resonant overlaps.
        """
        k_max = math.ceil(nu_max)
        c1 = (2 * k_max + 1) / (2 * n_fft)
        c2 = ((math.sqrt(5.0) - 1.0) / 2.0) / (2 * n_fft**2)
        return cls(n_fft=n_fft, c1=c1, c2=c2)


@dataclass(frozen=True)
class OtfsConfig:
    """Delay-Doppler grid dimensions; frame length is their product."""

    delay_bins: int
    doppler_bins: int

    def __post_init__(self):
        if self.delay_bins < 1 or self.doppler_bins < 1:
            raise ConfigError(
                f"grid dimensions must be positive, got {self.delay_bins}x{self.doppler_bins}"
            )

    @property
    def frame_len(self) -> int:
        return self.delay_bins * self.doppler_bins


def _afdm_lambda(n_fft: int, rate: float) -> np.ndarray:
    """Diagonal of the AFDM chirp matrix, exp(-j*2*pi*rate*n^2)."""
    n = np.arange(n_fft)
    return np.exp(-2j * np.pi * rate * n.astype(float) ** 2)


def afdm_modulate(cfg: AfdmConfig, x: np.ndarray, cp_len: int = 0) -> TimeFrame:
    """AFDM frame: conj-chirp, IDFT, conj-chirp (unitary)."""
    x = np.asarray(x, dtype=np.complex128)
    if x.size != cfg.n_fft:
        raise ValueError(f"afdm expects {cfg.n_fft} symbols, got {x.size}")
    body = np.conj(_afdm_lambda(cfg.n_fft, cfg.c1)) * np.fft.ifft(
        np.conj(_afdm_lambda(cfg.n_fft, cfg.c2)) * x, norm="ortho"
    )
    if cp_len > 0:
        return TimeFrame(np.concatenate([body[-cp_len:], body]), cp_len=cp_len)
    return TimeFrame(body, cp_len=0)


def afdm_demodulate(cfg: AfdmConfig, frame: TimeFrame) -> np.ndarray:
    """Inverse of afdm_modulate on the CP-free body."""
    r = frame.body
    if r.size != cfg.n_fft:
        raise ValueError(f"frame body has {r.size} samples, expected {cfg.n_fft}")
    return _afdm_lambda(cfg.n_fft, cfg.c2) * np.fft.fft(
        _afdm_lambda(cfg.n_fft, cfg.c1) * r, norm="ortho"
    )


def otfs_modulate(cfg: OtfsConfig, x_dd: np.ndarray, cp_len: int = 0) -> TimeFrame:
    """Inverse discrete Zak transform of the delay-Doppler grid.

    x_dd fills the grid delay-first; an inverse unitary DFT across the
    Doppler axis yields the time-domain frame read out column-by-column.
    """
    x_dd = np.asarray(x_dd, dtype=np.complex128)
    if x_dd.size != cfg.frame_len:
        raise ValueError(f"otfs expects {cfg.frame_len} symbols, got {x_dd.size}")
    grid = x_dd.reshape(cfg.delay_bins, cfg.doppler_bins, order="F")
    body = np.fft.ifft(grid, axis=1, norm="ortho").reshape(-1, order="F")
    if cp_len > 0:
        return TimeFrame(np.concatenate([body[-cp_len:], body]), cp_len=cp_len)
    return TimeFrame(body, cp_len=0)


def otfs_demodulate(cfg: OtfsConfig, frame: TimeFrame) -> np.ndarray:
    """Forward discrete Zak transform back to the delay-Doppler grid."""
    r = frame.body
    if r.size != cfg.frame_len:
        raise ValueError(f"frame body has {r.size} samples, expected {cfg.frame_len}")
    grid = r.reshape(cfg.delay_bins, cfg.doppler_bins, order="F")
    return np.fft.fft(grid, axis=1, norm="ortho").reshape(-1, order="F")


def symbol_count(kind: str, cfg) -> int:
    """Number of data symbols per frame for a modem kind."""
    if kind == waveform.OFDM:
        return cfg.n_fft
    if kind in (waveform.CHIRPED_DFTS_OFDM, waveform.DFTS_OFDM):
        return cfg.m_dft
    if kind == AFDM:
        return cfg.n_fft
    if kind == OTFS:
        return cfg.frame_len
    raise ConfigError(f"unknown waveform kind {kind!r}")


def frame_len(kind: str, cfg) -> int:
    if kind == OTFS:
        return cfg.frame_len
    return cfg.n_fft


def modulate_any(kind: str, cfg, x: np.ndarray, cp_len: int = 0) -> TimeFrame:
    """Kind-dispatched modulation (CP length given explicitly)."""
    if kind in _CORE:
        if cp_len and cfg.cp_len != cp_len:
            cfg = waveform.FrameConfig(cfg.n_fft, cfg.m_dft, cfg.chirp_a, cfg.chirp_b,
                                       cp_len, cfg.alphabet)
        return waveform.modulate(cfg, x, kind, with_cp=cp_len > 0)
    if kind == AFDM:
        return afdm_modulate(cfg, x, cp_len=cp_len)
    if kind == OTFS:
        return otfs_modulate(cfg, x, cp_len=cp_len)
    raise ConfigError(f"unknown waveform kind {kind!r}")


def demodulate_any(kind: str, cfg, frame: TimeFrame) -> np.ndarray:
    """Kind-dispatched receiver transform to the equalization domain."""
    if kind in _CORE:
        return waveform.demodulate_to_freq(cfg, frame, kind)
    if kind == AFDM:
        return afdm_demodulate(cfg, frame)
    if kind == OTFS:
        return otfs_demodulate(cfg, frame)
    raise ConfigError(f"unknown waveform kind {kind!r}")


def transmit_matrix(kind: str, cfg) -> np.ndarray:
    """Dense symbols-to-samples matrix (orthonormal columns for every kind)."""
    if kind in _CORE:
        return waveform.transmit_matrix(cfg, kind)
    if kind == AFDM:
        f_n = unitary_dft(cfg.n_fft)
        lam1 = np.conj(_afdm_lambda(cfg.n_fft, cfg.c1))
        lam2 = np.conj(_afdm_lambda(cfg.n_fft, cfg.c2))
        return lam1[:, None] * f_n.conj().T * lam2[None, :]
    if kind == OTFS:
        f_dop = unitary_dft(cfg.doppler_bins)
        return np.kron(f_dop.conj().T, np.eye(cfg.delay_bins, dtype=np.complex128))
    raise ConfigError(f"unknown waveform kind {kind!r}")


def receive_matrix(kind: str, cfg) -> np.ndarray:
    """Dense samples-to-equalization-domain matrix (inverse of the transmit map)."""
    if kind in _CORE:
        return waveform.receive_matrix(cfg, kind)
    if kind in (AFDM, OTFS):
        return transmit_matrix(kind, cfg).conj().T
    raise ConfigError(f"unknown waveform kind {kind!r}")


def effective_channel_for(kind: str, cfg, h_time: np.ndarray) -> EffectiveChannel:
    """Input-symbols to receiver-domain matrix for a given time channel."""
    h_time = np.asarray(h_time)
    n = frame_len(kind, cfg)
    if h_time.shape != (n, n):
        raise ValueError(f"h_time must be {n}x{n}, got {h_time.shape}")
    rx = receive_matrix(kind, cfg)
    tx = transmit_matrix(kind, cfg)
    return EffectiveChannel(matrix=rx @ h_time @ tx, noise_variance=0.0)
