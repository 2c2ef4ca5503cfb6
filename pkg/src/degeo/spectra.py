"""Dense symmetric eigendecomposition and ground-eigenspace extraction.

The degeneracy tolerance is relative: level k belongs to the ground
multiplet iff E_k - E_1 <= deg_tol * max(1, |E_1|).  Within numerically
degenerate clusters the eigenvector basis is made reproducible by fixing
signs (largest-magnitude component positive) and re-orthonormalizing in
index order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fock import ManyBodyOperator

DEFAULT_DEG_TOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns


@dataclass(frozen=True)
class Eigenspace:
    energy: float
    degree: int
    basis: np.ndarray  # L x g, orthonormal columns
    gap: float
    ambiguous: bool = False


def _fix_signs(U: np.ndarray) -> np.ndarray:
    k = np.abs(U).argmax(axis=0)
    s = np.sign(U[k, np.arange(U.shape[1])])
    s[s == 0] = 1.0
    return U * s


def eig_sym(H: ManyBodyOperator | np.ndarray) -> Spectrum:
    """Ascending eigendecomposition of a real symmetric matrix."""
    A = H.H if isinstance(H, ManyBodyOperator) else np.asarray(H, dtype=float)
    asym = np.abs(A - A.T).max(initial=0.0)
    if asym > 1e-10 * max(1.0, np.abs(A).max(initial=0.0)):
        raise DomainError(f"matrix is not symmetric (max asymmetry {asym:g})")
    w, U = np.linalg.eigh(0.5 * (A + A.T))
    return Spectrum(w, _fix_signs(U))


def _gram_schmidt(V: np.ndarray) -> np.ndarray:
    Q = np.array(V, dtype=float)
    for k in range(Q.shape[1]):
        for j in range(k):
            Q[:, k] -= (Q[:, j] @ Q[:, k]) * Q[:, j]
        Q[:, k] /= np.linalg.norm(Q[:, k])
    return Q


def ground_eigenspace(H: ManyBodyOperator | np.ndarray,
                      deg_tol: float = DEFAULT_DEG_TOL) -> Eigenspace:
    """Ground multiplet with a real orthonormal basis and the gap above it."""
    if deg_tol <= 0:
        raise DomainError(f"deg_tol must be positive, got {deg_tol}")
    spec = eig_sym(H)
    w, U = spec.eigenvalues, spec.eigenvectors
    scale = max(1.0, abs(w[0]))
    g = int(np.sum(w - w[0] <= deg_tol * scale))
    gap = float(w[g] - w[g - 1]) if g < w.size else math.inf
    basis = _gram_schmidt(U[:, :g])
    return Eigenspace(
        energy=float(w[0]),
        degree=g,
        basis=basis,
        gap=gap,
        ambiguous=gap < 10 * deg_tol * scale,
    )
