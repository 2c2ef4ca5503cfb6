"""N-particle fermionic Fock space on M vertices.

Basis states are the N-subsets of {1..M} in lexicographic order, so
L = C(M,N).  Slater coefficients follow the convention that orbitals are
ordered by increasing vertex index inside each subset; the hopping sign
between subsets J and K = J \\ {i} u {j} is (-1)^(number of occupied sites
strictly between i and j).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError
from .lattice import OneBodyOperator


@dataclass(frozen=True)
class FockBasis:
    M: int
    N: int
    states: tuple[tuple[int, ...], ...]

    @property
    def L(self) -> int:
        return len(self.states)

    @cached_property
    def index(self) -> dict:
        return {st: k for k, st in enumerate(self.states)}

    @cached_property
    def occupations(self) -> np.ndarray:
        """L x M 0/1 matrix; row J marks the vertices occupied in state J."""
        O = np.zeros((self.L, self.M))
        for J, st in enumerate(self.states):
            for i in st:
                O[J, i - 1] = 1.0
        O.setflags(write=False)
        return O


@dataclass(frozen=True)
class ManyBodyOperator:
    H: np.ndarray
    basis: FockBasis

    def __post_init__(self):
        H = np.asarray(self.H, dtype=float)
        if H.shape != (self.basis.L, self.basis.L):
            raise DomainError(f"operator shape {H.shape} != (L,L) with L={self.basis.L}")
        object.__setattr__(self, "H", H)


@dataclass(frozen=True)
class State:
    """Real coefficient vector over the Slater basis."""

    psi: np.ndarray
    basis: FockBasis
    normalized: bool = False

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=float).reshape(-1)
        if psi.size != self.basis.L:
            raise DomainError(f"state length {psi.size} != L={self.basis.L}")
        if self.normalized and abs(psi @ psi - 1.0) > 2e-10:
            raise DomainError(f"state flagged normalized has |psi|^2 = {psi @ psi:.12g}")
        object.__setattr__(self, "psi", psi)


@dataclass(frozen=True)
class Density:
    """Vertex density; normalized means sum = N and 0 <= rho_i <= 1."""

    rho: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float).reshape(-1)
        if self.normalized:
            if rho.min() < -1e-10 or rho.max() > 1 + 1e-10:
                raise DomainError(f"density outside [0,1]: min={rho.min():g} max={rho.max():g}")
        object.__setattr__(self, "rho", rho)

    @property
    def M(self) -> int:
        return self.rho.size


def enumerate_basis(M: int, N: int) -> FockBasis:
    """Lexicographically ordered N-subsets of {1..M}."""
    if not (1 <= N <= M):
        raise DomainError(f"need 1 <= N <= M, got N={N}, M={M}")
    states = tuple(itertools.combinations(range(1, M + 1), N))
    assert len(states) == math.comb(M, N)
    return FockBasis(M, N, states)


def lift_one_body(h: OneBodyOperator, b: FockBasis) -> ManyBodyOperator:
    """Second-quantized one-body operator on the N-particle sector."""
    if h.M != b.M:
        raise DomainError(f"operator size {h.M} != basis M={b.M}")
    hm = h.h
    L = b.L
    H = np.zeros((L, L))
    index = b.index
    for J, st in enumerate(b.states):
        occ = set(st)
        H[J, J] = sum(hm[i - 1, i - 1] for i in st)
        for i in st:
            for j in range(1, b.M + 1):
                if j in occ:
                    continue
                w = hm[i - 1, j - 1]
                if w == 0.0:
                    continue
                K = index[tuple(sorted(occ - {i} | {j}))]
                lo, hi = min(i, j), max(i, j)
                nb = sum(1 for s in occ if s != i and lo < s < hi)
                H[J, K] += (-1.0) ** nb * w
    return ManyBodyOperator(H, b)


def add_interaction(H: ManyBodyOperator, W: np.ndarray) -> ManyBodyOperator:
    """Add the density-density term sum_{i<j} W_ij n_i n_j (diagonal here)."""
    W = np.asarray(W, dtype=float)
    b = H.basis
    if W.shape != (b.M, b.M):
        raise DomainError(f"interaction shape {W.shape} != ({b.M},{b.M})")
    if not np.allclose(W, W.T):
        raise DomainError("interaction matrix must be symmetric")
    if np.abs(np.diag(W)).max(initial=0.0) != 0.0:
        raise DomainError("interaction matrix must have zero diagonal")
    shift = np.zeros(b.L)
    for J, st in enumerate(b.states):
        shift[J] = sum(W[i - 1, j - 1] for i, j in itertools.combinations(st, 2))
    return ManyBodyOperator(H.H + np.diag(shift), b)


def density_of_state(psi: State, b: FockBasis | None = None) -> Density:
    """rho_i = sum over occupied configurations of |psi_J|^2, normalized."""
    b = b or psi.basis
    p = psi.psi
    n2 = float(p @ p)
    if n2 <= 0.0:
        raise DomainError("zero state has no density")
    rho = b.occupations.T @ (p * p) / n2
    return Density(rho)


def transition_density(phi_k: State, phi_l: State, b: FockBasis | None = None) -> np.ndarray:
    """Off-diagonal factor 2 <phi_k| n_i |phi_l> per vertex.

    For orthonormal inputs the components sum to 2 N <phi_k, phi_l>, hence
    to zero when the states are orthogonal.
    """
    b = b or phi_k.basis
    if phi_k.psi.size != phi_l.psi.size:
        raise DomainError("state length mismatch")
    return 2.0 * (b.occupations.T @ (phi_k.psi * phi_l.psi))


def slater(orbitals, b: FockBasis) -> State:
    """Slater determinant of N orthonormal orbitals, as a basis expansion.

    Coefficient on subset J is det of the orbital values on J's vertices
    (rows in increasing vertex order, orbital columns in the given order).
    """
    A = np.column_stack([np.asarray(o, dtype=float) for o in orbitals])
    if A.shape != (b.M, b.N):
        raise DomainError(f"need {b.N} orbitals of length {b.M}, got shape {A.shape}")
    gram = A.T @ A
    if np.abs(gram - np.eye(b.N)).max() > 1e-8:
        raise DomainError("orbitals are not orthonormal within 1e-8")
    psi = np.empty(b.L)
    for J, st in enumerate(b.states):
        rows = [i - 1 for i in st]
        psi[J] = np.linalg.det(A[rows, :])
    psi /= np.linalg.norm(psi)
    return State(psi, b, normalized=True)
