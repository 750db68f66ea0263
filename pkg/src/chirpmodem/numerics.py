"""Complex vector/matrix kernels used throughout the package.

Dense unitary DFT matrices, cyclic-delay permutations, Hermitian rank and
eigenvalue extraction, and seeded circularly-symmetric Gaussian sampling.
Everything is pure numpy; callers own parallelism and pass generators in
explicitly.
"""

from __future__ import annotations

import numpy as np

_UINT64_MASK = (1 << 64) - 1


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Deterministic generator for a (master seed, stream id) pair.

    The same pair always yields the same sequence; distinct stream ids give
    statistically independent streams, so per-trial streams can be handed to
    parallel workers without coordination.
    """
    if stream < 0:
        raise ValueError(f"stream id must be non-negative, got {stream}")
    ss = np.random.SeedSequence(entropy=int(seed) & _UINT64_MASK, spawn_key=(int(stream),))
    return np.random.default_rng(ss)


def unitary_dft(size: int) -> np.ndarray:
    """Unitary DFT matrix F with F[m, n] = exp(-2j*pi*m*n/size) / sqrt(size)."""
    if size < 1:
        raise ValueError(f"DFT size must be >= 1, got {size}")
    n = np.arange(size)
    return np.exp(-2j * np.pi * np.outer(n, n) / size) / np.sqrt(size)


def cyclic_shift_matrix(size: int, power: int = 1) -> np.ndarray:
    """Permutation matrix delaying a vector cyclically by `power` samples.

    With P = cyclic_shift_matrix(N, 1), (P @ v)[n] = v[(n-1) mod N]; applying
    the matrix `power` times composes the delay, so P**l shifts by l samples.
    """
    if size < 1:
        raise ValueError(f"matrix size must be >= 1, got {size}")
    if power < 0:
        raise ValueError(f"shift power must be non-negative, got {power}")
    return np.roll(np.eye(size, dtype=np.complex128), power % size, axis=0)


def hermitian_rank_eigs(a: np.ndarray, tol: float = 1e-9) -> tuple[int, np.ndarray]:
    """Rank and non-zero eigenvalues of a Hermitian matrix.

    Eigenvalues are returned sorted descending; the rank counts eigenvalues
    above tol * max(1, largest eigenvalue), and only those are returned.
    Raises if the input is not Hermitian to within 1e-10 (caller bug).
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if tol < 0:
        raise ValueError(f"tolerance must be non-negative, got {tol}")
    asym = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if asym > 1e-10:
        raise ValueError(f"matrix is not Hermitian (max deviation {asym:.3e})")
    eigs = np.linalg.eigvalsh(a)[::-1]
    threshold = tol * max(1.0, float(eigs[0]))
    nonzero = eigs[eigs > threshold]
    return int(nonzero.size), nonzero


def complex_gaussian(length: int, variance: float, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. circularly-symmetric complex Gaussian samples.

    Total per-entry variance equals `variance` (split evenly between the
    real and imaginary parts).
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if variance <= 0:
        raise ValueError(f"variance must be positive, got {variance}")
    z = rng.standard_normal((2, length))
    return np.sqrt(variance / 2.0) * (z[0] + 1j * z[1])
