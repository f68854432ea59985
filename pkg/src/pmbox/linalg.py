"""Dense complex-matrix primitives shared by the quantum modules.

All operators live in plain numpy arrays (complex128, row-major) and are tiny
(at most 16 x 16), so every routine favours clarity and exact contracts over
scalability.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_ATOL = 1e-10


class EigDecomposition(NamedTuple):
    """Hermitian eigendecomposition, eigenvalues sorted descending.

    ``eigenvectors[:, k]`` is the unit-norm eigenvector paired with
    ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermitize(m: np.ndarray) -> np.ndarray:
    """Symmetrized copy (m + m^dag)/2; removes numerical anti-Hermitian dust."""
    return (m + m.conj().T) / 2


def is_hermitian(m: np.ndarray, atol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= atol)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, dimensions multiply."""
    return np.kron(a, b)


def partial_trace(m: np.ndarray, dim_a: int, dim_b: int, traced: str) -> np.ndarray:
    """Trace out one tensor factor of an operator on C^dim_a (x) C^dim_b.

    ``traced='A'`` returns the marginal on the second factor, ``'B'`` on the
    first. The total trace is preserved.
    """
    m = np.asarray(m)
    if m.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ValueError(f"operator shape {m.shape} does not match dims ({dim_a}, {dim_b})")
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if traced == "A":
        return np.trace(t, axis1=0, axis2=2)
    if traced == "B":
        return np.trace(t, axis1=1, axis2=3)
    raise ValueError("traced must be 'A' or 'B'")


def eig_hermitian(h: np.ndarray, atol: float = HERMITIAN_ATOL) -> EigDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    h = np.asarray(h)
    if not is_hermitian(h, atol=atol):
        raise ValueError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(hermitize(h))
    return EigDecomposition(vals[::-1].copy(), vecs[:, ::-1].copy())


def psd_project(h: np.ndarray) -> np.ndarray:
    """Nearest positive-semidefinite matrix: clip negative eigenvalues to 0."""
    vals, vecs = eig_hermitian(h)
    clipped = np.clip(vals, 0.0, None)
    return hermitize((vecs * clipped) @ vecs.conj().T)


def inv_sqrt_psd(h: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Inverse square root of a PSD matrix, pseudo-inverted on its support.

    Eigenvalues below ``eps`` count as zero, so ``r @ h @ r`` with
    ``r = inv_sqrt_psd(h)`` is the projector onto the support of ``h``.
    """
    vals, vecs = eig_hermitian(h)
    inv = np.where(vals > eps, 1.0 / np.sqrt(np.clip(vals, eps, None)), 0.0)
    return hermitize((vecs * inv) @ vecs.conj().T)
