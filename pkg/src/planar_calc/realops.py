"""Real and imaginary parts of a complex matrix as a real block matrix.

``x = x0 + i x1`` is sent to ``[[x0, x1], [-x1, x0]]``.  The same matrix
arises from ``x ⊕ conj(x)`` by the rotation ``H = [[1, 1], [1, -1]] / sqrt 2``
(giving ``[[x0, i x1], [i x1, x0]]``) followed by conjugation with
``kappa = diag(1, i)``.  Since that chain is unitary, the embedding preserves
operator norms, and it does so at every matrix level.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import as_cmatrix, opnorm
from .errors import InvalidInputError

MAX_AMPLIFIED = 64


@dataclass(frozen=True, eq=False)
class RealPair:
    x0: np.ndarray
    x1: np.ndarray

    def combine(self):
        return self.x0 + 1j * self.x1


def decompose_real(x) -> RealPair:
    x = as_cmatrix(x)
    return RealPair(x.real.copy(), x.imag.copy())


def real_embed(x) -> np.ndarray:
    p = decompose_real(x)
    return np.block([[p.x0, p.x1], [-p.x1, p.x0]])


def rotate_pair(x) -> np.ndarray:
    """``H (x ⊕ conj x) H`` with ``H`` the normalized 2x2 Hadamard block."""
    x = as_cmatrix(x)
    n = x.shape[0]
    eye = np.eye(n)
    H = np.block([[eye, eye], [eye, -eye]]) / np.sqrt(2.0)
    zero = np.zeros_like(x)
    return H @ np.block([[x, zero], [zero, x.conj()]]) @ H


def kappa_conjugate(y) -> np.ndarray:
    """``kappa y kappa*`` with ``kappa = diag(I, i I)`` acting on 2x2 blocks."""
    y = np.asarray(y, complex)
    if y.ndim != 2 or y.shape[0] != y.shape[1] or y.shape[0] % 2:
        raise InvalidInputError(f"expected a square matrix of even size, got shape {y.shape}")
    n = y.shape[0] // 2
    k = np.concatenate([np.ones(n), 1j * np.ones(n)])
    return k[:, None] * y * np.conj(k)[None, :]


def _amplified_embed(A, x):
    """Blockwise embedding of ``A ⊗ x``: block ``(i, j)`` is ``real_embed(A[i, j] x)``."""
    k = A.shape[0]
    return np.block([[real_embed(A[i, j] * x) for j in range(k)] for i in range(k)])


@dataclass(frozen=True)
class IsometryReport:
    level: int
    samples: int
    max_defect: float


def isometry_check(x, level: int = 1, samples: int = 20, rng=None) -> IsometryReport:
    """Largest relative gap between ``||A ⊗ x||`` and the norm of its real embedding.

    ``A`` runs over ``samples`` random complex ``level x level`` matrices.
    """
    x = as_cmatrix(x)
    if not 1 <= level <= 4:
        raise InvalidInputError("amplification level must be between 1 and 4")
    if 2 * level * x.shape[0] > MAX_AMPLIFIED:
        raise InvalidInputError(f"amplified size exceeds {MAX_AMPLIFIED}")
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(samples):
        A = rng.standard_normal((level, level)) + 1j * rng.standard_normal((level, level))
        lhs = opnorm(np.kron(A, x))
        rhs = opnorm(_amplified_embed(A, x))
        if lhs == 0.0:
            defect = abs(rhs)
        else:
            defect = abs(lhs - rhs) / lhs
        worst = max(worst, defect)
    return IsometryReport(level, samples, float(worst))
