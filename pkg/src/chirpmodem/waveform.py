"""Single-carrier and multi-carrier signal chains built around DFT spreading.

Three waveform kinds share one code path:

* ``chirped_dfts_ofdm``: M-point DFT precoding, interleaved mapping onto N
  subcarriers, N-point IDFT, then multiplication by a unit-modulus linear
  chirp.  The chirp sweeps each symbol's energy across the full band while
  leaving the time-domain envelope (and hence the PAPR) untouched.
* ``dfts_ofdm``: the same chain without the chirp.
* ``ofdm``: plain N-point IDFT of N frequency-domain symbols (no precoding,
  no mapping, no chirp).

All chains are unitary, so frame energy equals symbol energy and a unit
noise covariance stays white through demodulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .numerics import unitary_dft

CHIRPED_DFTS_OFDM = "chirped_dfts_ofdm"
DFTS_OFDM = "dfts_ofdm"
OFDM = "ofdm"

BPSK = "bpsk"
QPSK = "qpsk"

_ALPHABETS = (BPSK, QPSK)
_CORE_KINDS = (CHIRPED_DFTS_OFDM, DFTS_OFDM, OFDM)

# Constellation points in bit-label order; demapping tie-breaks toward the
# first (lexicographically smallest) label.
_POINTS = {
    BPSK: np.array([1.0, -1.0], dtype=np.complex128),
    QPSK: np.array(
        [1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], dtype=np.complex128
    ) / np.sqrt(2.0),
}
_BITS_PER_SYMBOL = {BPSK: 1, QPSK: 2}


@dataclass(frozen=True)
class FrameConfig:
    """Dimensioning of one frame: IDFT size N, precoder size M, chirp, CP."""

    n_fft: int
    m_dft: int
    chirp_a: int = 1
    chirp_b: int = 0
    cp_len: int = 0
    alphabet: str = QPSK

    def __post_init__(self):
        if self.n_fft < 1 or self.m_dft < 1:
            raise ConfigError(f"n_fft and m_dft must be positive, got {self.n_fft}, {self.m_dft}")
        if self.n_fft % self.m_dft != 0:
            raise ConfigError(f"n_fft={self.n_fft} not divisible by m_dft={self.m_dft}")
        sf = self.n_fft // self.m_dft
        if sf > 1 and not (1 <= self.chirp_a <= sf - 1):
            raise ConfigError(
                f"chirp_a={self.chirp_a} outside 1..{sf - 1}: full-band occupancy not guaranteed"
            )
        if self.chirp_b < 0:
            raise ConfigError(f"chirp_b must be non-negative, got {self.chirp_b}")
        if self.cp_len < 0:
            raise ConfigError(f"cp_len must be non-negative, got {self.cp_len}")
        if self.alphabet not in _ALPHABETS:
            raise ConfigError(f"unknown alphabet {self.alphabet!r}, expected one of {_ALPHABETS}")

    @property
    def spreading_factor(self) -> int:
        return self.n_fft // self.m_dft

    @property
    def chirp_rate(self) -> float:
        """Chirp rate (a + b*SF)/N; with a in 1..SF-1 every output bin is hit."""
        return (self.chirp_a + self.chirp_b * self.spreading_factor) / self.n_fft


@dataclass
class TimeFrame:
    """Time-domain frame; samples include the cyclic prefix when cp_len > 0."""

    samples: np.ndarray
    cp_len: int = 0

    @property
    def has_cp(self) -> bool:
        return self.cp_len > 0

    @property
    def body(self) -> np.ndarray:
        """Samples with the cyclic prefix stripped."""
        return self.samples[self.cp_len:]


def gen_chirp(n_fft: int, rate: float) -> np.ndarray:
    """Unit-modulus linear chirp c[n] = exp(j*pi*rate*n^2), n = 0..N-1."""
    if n_fft < 1:
        raise ValueError(f"n_fft must be >= 1, got {n_fft}")
    n = np.arange(n_fft)
    return np.exp(1j * np.pi * rate * n.astype(float) ** 2)


def chirp_rate(cfg: FrameConfig) -> float:
    """Chirp rate for a frame config; errors if the full-band rule is violated."""
    sf = cfg.spreading_factor
    if sf > 1 and not (1 <= cfg.chirp_a <= sf - 1):
        raise ConfigError(f"chirp_a={cfg.chirp_a} outside 1..{sf - 1}")
    return cfg.chirp_rate


def interleaved_map(n_fft: int, m_dft: int) -> np.ndarray:
    """N x M 0/1 matrix placing symbol k on subcarrier k * (N/M)."""
    if n_fft % m_dft != 0:
        raise ConfigError(f"n_fft={n_fft} not divisible by m_dft={m_dft}")
    sf = n_fft // m_dft
    p = np.zeros((n_fft, m_dft), dtype=np.complex128)
    p[np.arange(m_dft) * sf, np.arange(m_dft)] = 1.0
    return p


def constellation(alphabet: str) -> np.ndarray:
    """Unit-energy constellation points in bit-label order."""
    if alphabet not in _ALPHABETS:
        raise ConfigError(f"unknown alphabet {alphabet!r}")
    return _POINTS[alphabet]


def bits_per_symbol(alphabet: str) -> int:
    if alphabet not in _ALPHABETS:
        raise ConfigError(f"unknown alphabet {alphabet!r}")
    return _BITS_PER_SYMBOL[alphabet]


def map_bits(bits: np.ndarray, alphabet: str) -> np.ndarray:
    """Gray-map a bit array onto unit-energy symbols.

    BPSK: 0 -> +1, 1 -> -1.  QPSK: (b0, b1) -> ((1-2*b0) + j*(1-2*b1))/sqrt(2),
    b0 on the real axis, b1 on the imaginary axis.
    """
    bits = np.asarray(bits, dtype=np.int64)
    k = bits_per_symbol(alphabet)
    if bits.size % k != 0:
        raise ValueError(f"bit count {bits.size} not divisible by {k}")
    if alphabet == BPSK:
        return (1.0 - 2.0 * bits).astype(np.complex128)
    pairs = bits.reshape(-1, 2)
    return ((1 - 2 * pairs[:, 0]) + 1j * (1 - 2 * pairs[:, 1])) / np.sqrt(2.0)


def hard_decision(values: np.ndarray, alphabet: str) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-neighbor decision: returns (hard symbols, bits).

    Ties go to the lexicographically-first constellation point so results are
    reproducible even on measure-zero inputs.
    """
    values = np.asarray(values, dtype=np.complex128)
    points = constellation(alphabet)
    k = _BITS_PER_SYMBOL[alphabet]
    # argmin over points in label order: first minimum wins the tie-break
    dist = np.abs(values[:, None] - points[None, :])
    labels = np.argmin(dist, axis=1)
    hard = points[labels]
    shifts = np.arange(k - 1, -1, -1)
    bits = (labels[:, None] >> shifts[None, :]) & 1
    return hard, bits.reshape(-1).astype(np.int64)


def demap_symbols(symbols: np.ndarray, alphabet: str) -> np.ndarray:
    """Hard-demap symbols back to bits (inverse of map_bits in the noiseless case)."""
    return hard_decision(symbols, alphabet)[1]


def _mapped_spectrum(cfg: FrameConfig, x: np.ndarray) -> np.ndarray:
    """M-point DFT of x placed on the interleaved subcarriers (length N)."""
    spec = np.zeros(cfg.n_fft, dtype=np.complex128)
    spec[:: cfg.spreading_factor] = np.fft.fft(x, norm="ortho")
    return spec


def modulate(cfg: FrameConfig, x: np.ndarray, kind: str = CHIRPED_DFTS_OFDM,
             with_cp: bool = False) -> TimeFrame:
    """Modulate one symbol vector into a time-domain frame.

    x has length M for the DFT-spread kinds and length N for plain OFDM.  A
    cyclic prefix of cfg.cp_len samples (copy of the frame tail) is prepended
    when with_cp is set.
    """
    if kind not in _CORE_KINDS:
        raise ConfigError(f"unknown waveform kind {kind!r}")
    x = np.asarray(x, dtype=np.complex128)
    if kind == OFDM:
        if x.size != cfg.n_fft:
            raise ValueError(f"ofdm expects {cfg.n_fft} symbols, got {x.size}")
        body = np.fft.ifft(x, norm="ortho")
    else:
        if x.size != cfg.m_dft:
            raise ValueError(f"{kind} expects {cfg.m_dft} symbols, got {x.size}")
        body = np.fft.ifft(_mapped_spectrum(cfg, x), norm="ortho")
        if kind == CHIRPED_DFTS_OFDM:
            body = gen_chirp(cfg.n_fft, cfg.chirp_rate) * body
    cp = cfg.cp_len if with_cp else 0
    if cp > 0:
        return TimeFrame(np.concatenate([body[-cp:], body]), cp_len=cp)
    return TimeFrame(body, cp_len=0)


def demodulate_to_freq(cfg: FrameConfig, frame: TimeFrame, kind: str = CHIRPED_DFTS_OFDM) -> np.ndarray:
    """De-chirp (if applicable) and N-point DFT; strips the CP when present."""
    if kind not in _CORE_KINDS:
        raise ConfigError(f"unknown waveform kind {kind!r}")
    r = frame.body
    if r.size != cfg.n_fft:
        raise ValueError(f"frame body has {r.size} samples, expected {cfg.n_fft}")
    if kind == CHIRPED_DFTS_OFDM:
        r = np.conj(gen_chirp(cfg.n_fft, cfg.chirp_rate)) * r
    return np.fft.fft(r, norm="ortho")


@dataclass
class RecoveredSymbols:
    soft: np.ndarray
    hard: np.ndarray
    bits: np.ndarray


def recover_symbols(cfg: FrameConfig, freq_est: np.ndarray,
                    kind: str = CHIRPED_DFTS_OFDM) -> RecoveredSymbols:
    """Map equalized frequency-domain estimates back to data symbols.

    For the DFT-spread kinds this discards the unused subcarriers (length-N
    input) and applies the inverse M-point DFT; a length-M input skips the
    discard step.  For plain OFDM the estimates already are the symbols.
    """
    if kind not in _CORE_KINDS:
        raise ConfigError(f"unknown waveform kind {kind!r}")
    est = np.asarray(freq_est, dtype=np.complex128)
    if kind == OFDM:
        if est.size != cfg.n_fft:
            raise ValueError(f"ofdm expects {cfg.n_fft} estimates, got {est.size}")
        soft = est
    else:
        if est.size == cfg.n_fft:
            est = est[:: cfg.spreading_factor]
        elif est.size != cfg.m_dft:
            raise ValueError(f"expected {cfg.m_dft} or {cfg.n_fft} estimates, got {est.size}")
        soft = np.fft.ifft(est, norm="ortho")
    hard, bits = hard_decision(soft, cfg.alphabet)
    return RecoveredSymbols(soft=soft, hard=hard, bits=bits)


def transmit_matrix(cfg: FrameConfig, kind: str = CHIRPED_DFTS_OFDM) -> np.ndarray:
    """Dense N x M (N x N for OFDM) matrix mapping symbols to frame samples."""
    if kind not in _CORE_KINDS:
        raise ConfigError(f"unknown waveform kind {kind!r}")
    f_n = unitary_dft(cfg.n_fft)
    if kind == OFDM:
        return f_n.conj().T
    mat = f_n.conj().T @ interleaved_map(cfg.n_fft, cfg.m_dft) @ unitary_dft(cfg.m_dft)
    if kind == CHIRPED_DFTS_OFDM:
        mat = gen_chirp(cfg.n_fft, cfg.chirp_rate)[:, None] * mat
    return mat


def receive_matrix(cfg: FrameConfig, kind: str = CHIRPED_DFTS_OFDM) -> np.ndarray:
    """Dense N x N matrix applied to the received frame body before equalization."""
    if kind not in _CORE_KINDS:
        raise ConfigError(f"unknown waveform kind {kind!r}")
    f_n = unitary_dft(cfg.n_fft)
    if kind == CHIRPED_DFTS_OFDM:
        return f_n * np.conj(gen_chirp(cfg.n_fft, cfg.chirp_rate))[None, :]
    return f_n
