"""Doubly-selective multipath channel: generation, application, assembly.

The channel has one tap per integer sample delay 0..L.  Tap p carries a
complex gain h_p and a normalized Doppler shift v_p, so the time-varying
impulse response at frame sample n is h[n, p] = h_p * exp(j*2*pi*v_p*n/N).
Over one CP-protected frame this is equivalent to the N x N matrix

    H_t = sum_l  h_l * D_l * Pi^l,
    D_l = diag(exp(j*2*pi*v_l*n/N)),  Pi = one-sample cyclic delay,

which is what the equalizers and the pairwise error analysis consume.
Doppler phase is referenced to the first sample after the CP.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .numerics import complex_gaussian
from .waveform import TimeFrame

SPEED_OF_LIGHT = 299_792_458.0

DOPPLER_UNIFORM = "uniform"
DOPPLER_FIXED_EXTREMES = "fixed_extremes"
DOPPLER_STATIC = "static"
_DOPPLER_MODELS = (DOPPLER_UNIFORM, DOPPLER_FIXED_EXTREMES, DOPPLER_STATIC)


@dataclass(frozen=True)
class ChannelSpec:
    """Statistical description of the channel; realizations are drawn from it.

    Paths have equal average power 1/n_paths and integer delays 0..n_paths-1.
    `doppler_norm_max` overrides the Doppler limit derived from carrier
    frequency, velocity, and subcarrier spacing (useful to reproduce rounded
    figures such as 2 kHz at 15 kHz spacing).
    """

    n_paths: int = 3
    carrier_hz: float = 4e9
    subcarrier_hz: float = 15e3
    velocity_mps: float = 500.0 / 3.6
    doppler_model: str = DOPPLER_UNIFORM
    doppler_norm_max: float | None = None

    def __post_init__(self):
        if self.n_paths < 1:
            raise ConfigError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.doppler_model not in _DOPPLER_MODELS:
            raise ConfigError(
                f"unknown doppler_model {self.doppler_model!r}, expected one of {_DOPPLER_MODELS}"
            )
        if self.doppler_norm_max is not None and self.doppler_norm_max < 0:
            raise ConfigError("doppler_norm_max must be non-negative")

    @property
    def doppler_hz(self) -> float:
        """Maximum Doppler frequency f_c * v / c."""
        return self.carrier_hz * self.velocity_mps / SPEED_OF_LIGHT

    @property
    def nu_max(self) -> float:
        """Maximum Doppler shift normalized to the subcarrier spacing."""
        if self.doppler_norm_max is not None:
            return self.doppler_norm_max
        if self.doppler_model == DOPPLER_STATIC:
            return 0.0
        return self.doppler_hz / self.subcarrier_hz


@dataclass
class ChannelRealization:
    """One channel draw: per-path complex gains and normalized Doppler shifts."""

    gains: np.ndarray
    dopplers: np.ndarray

    def __post_init__(self):
        self.gains = np.asarray(self.gains, dtype=np.complex128)
        self.dopplers = np.asarray(self.dopplers, dtype=np.float64)
        if self.gains.shape != self.dopplers.shape or self.gains.ndim != 1:
            raise ValueError("gains and dopplers must be 1-D arrays of equal length")

    @property
    def n_paths(self) -> int:
        return self.gains.size

    @property
    def order(self) -> int:
        """Channel order L (largest delay in samples)."""
        return self.gains.size - 1


def sample_channel(spec: ChannelSpec, rng: np.random.Generator) -> ChannelRealization:
    """Draw a realization: gains i.i.d. CN(0, 1/n_paths), Doppler per model."""
    n = spec.n_paths
    gains = complex_gaussian(n, 1.0 / n, rng)
    if spec.doppler_model == DOPPLER_UNIFORM:
        nu = spec.nu_max
        dopplers = rng.uniform(-nu, nu, size=n) if nu > 0 else np.zeros(n)
    elif spec.doppler_model == DOPPLER_FIXED_EXTREMES:
        dopplers = spec.nu_max * (-1.0) ** np.arange(n)
    else:
        dopplers = np.zeros(n)
    return ChannelRealization(gains=gains, dopplers=dopplers)


def build_time_channel(real: ChannelRealization, n_fft: int) -> np.ndarray:
    """Dense N x N time-domain channel matrix sum_l h_l * D_l * Pi^l."""
    if n_fft < real.n_paths:
        raise ValueError(
            f"frame of {n_fft} samples cannot host delays up to {real.order}"
        )
    n = np.arange(n_fft)
    h_t = np.zeros((n_fft, n_fft), dtype=np.complex128)
    for l in range(real.n_paths):
        phase = np.exp(2j * np.pi * real.dopplers[l] * n / n_fft)
        h_t[n, (n - l) % n_fft] += real.gains[l] * phase
    return h_t


def apply_time_channel(real: ChannelRealization, mat: np.ndarray) -> np.ndarray:
    """H_t @ mat computed from the tap structure without forming H_t.

    mat is N x K; each tap contributes gain * doppler-phase * (rows of mat
    cyclically delayed by the tap delay).  Agrees with build_time_channel to
    machine precision and costs O(L*N*K) instead of O(N^2*K).
    """
    n_fft = mat.shape[0]
    if n_fft < real.n_paths:
        raise ValueError(f"matrix with {n_fft} rows cannot host delays up to {real.order}")
    phases = np.exp(
        2j * np.pi * real.dopplers[:, None] * np.arange(n_fft)[None, :] / n_fft
    )
    out = np.zeros_like(mat, dtype=np.complex128)
    for l in range(real.n_paths):
        shifted = np.roll(mat, l, axis=0)
        out += (real.gains[l] * phases[l])[:, None] * shifted
    return out


def apply_channel(frame: TimeFrame, real: ChannelRealization, noise_var: float,
                  rng: np.random.Generator | None = None) -> TimeFrame:
    """Propagate a CP-protected frame through the channel and add AWGN.

    Performs the honest sample-level time-varying convolution across
    CP + body, strips the CP, and adds complex Gaussian noise of variance
    noise_var per sample.  With the CP at least as long as the channel
    order, the result equals H_t @ body + noise.
    """
    if frame.cp_len < real.order:
        raise ValueError(
            f"cp_len={frame.cp_len} shorter than channel order {real.order}: model invalid"
        )
    u = frame.samples
    n_fft = frame.body.size
    t = np.arange(u.size) - frame.cp_len  # Doppler phase referenced to body start
    out = np.zeros(u.size, dtype=np.complex128)
    for l in range(real.n_paths):
        phase = np.exp(2j * np.pi * real.dopplers[l] * t / n_fft)
        delayed = np.concatenate([np.zeros(l, dtype=np.complex128), u[: u.size - l]])
        out += real.gains[l] * phase * delayed
    body = out[frame.cp_len:]
    if noise_var > 0:
        if rng is None:
            raise ValueError("rng required when noise_var > 0")
        body = body + complex_gaussian(n_fft, noise_var, rng)
    return TimeFrame(body, cp_len=0)


@dataclass
class EffectiveChannel:
    """Symbols-to-observations matrix seen by the equalizers, plus noise level."""

    matrix: np.ndarray
    noise_variance: float = 0.0

    @property
    def n_obs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.matrix.shape[1]


def assemble_effective(kind: str, cfg, real: ChannelRealization, noise_var: float,
                       tx: np.ndarray | None = None,
                       rx: np.ndarray | None = None) -> EffectiveChannel:
    """Receiver transform * H_t * transmit transform for any waveform kind.

    Precomputed transmit/receive matrices may be passed to amortize their
    construction across Monte Carlo trials.
    """
    from . import baselines  # deferred: baselines imports EffectiveChannel from here

    if tx is None:
        tx = baselines.transmit_matrix(kind, cfg)
    if rx is None:
        rx = baselines.receive_matrix(kind, cfg)
    if tx.shape[0] != rx.shape[1]:
        raise ValueError(f"transmit rows {tx.shape[0]} != receive cols {rx.shape[1]}")
    h_eff = rx @ apply_time_channel(real, tx)
    return EffectiveChannel(matrix=h_eff, noise_variance=noise_var)
