"""Factor vectors, the linear map P, and the quadratic density map.

For a g-fold eigenspace with real orthonormal basis {Phi_k}, the density
of the state sum_k x_k Phi_k factorizes as rho(x) = P nu(x) where nu is
the Veronese embedding

    nu(x) = (x_1^2, ..., x_g^2, x_1 x_2, x_1 x_3, ..., x_{g-1} x_g)

and the columns of P are the diagonal factors rho_k (densities of Phi_k)
followed by the off-diagonal factors rho_kl = 2 <Phi_k| n_i |Phi_l>, in
the same pair order (1,2), (1,3), ..., (g-1,g).  The nullity kappa of P
and the degree g classify the region; its affine dimension is
g(g+1)/2 - kappa - 1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fock import Density, FockBasis, State, density_of_state, transition_density
from .spectra import Eigenspace

DEFAULT_RANK_TOL = 1e-8


def pair_order(g: int) -> list[tuple[int, int]]:
    """Column order of the off-diagonal monomials, 0-based pairs."""
    return list(itertools.combinations(range(g), 2))


def veronese(x: np.ndarray) -> np.ndarray:
    """Second-order monomials of a unit vector, in the documented order."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if abs(x @ x - 1.0) > 1e-10:
        raise DomainError(f"veronese input must be a unit vector, |x|^2 = {x @ x:.12g}")
    return _veronese_rows(x[None, :])[0]


def _veronese_rows(X: np.ndarray) -> np.ndarray:
    """Row-wise Veronese map without the unit-norm check."""
    g = X.shape[1]
    cols = [X ** 2] + [(X[:, k] * X[:, l])[:, None] for k, l in pair_order(g)]
    return np.concatenate(cols, axis=1)


@dataclass(frozen=True)
class DegeneracyClass:
    g: int
    factors_diag: np.ndarray   # g x M
    factors_off: np.ndarray    # g(g-1)/2 x M
    P: np.ndarray              # M x g(g+1)/2
    kappa: int
    dimD: int
    kernel_basis: np.ndarray   # g(g+1)/2 x kappa, orthonormal columns
    central: np.ndarray        # mean of the diagonal factors

    @property
    def M(self) -> int:
        return self.P.shape[0]

    @property
    def n_cols(self) -> int:
        return self.P.shape[1]


def build_class(es: Eigenspace, b: FockBasis,
                rank_tol: float = DEFAULT_RANK_TOL) -> DegeneracyClass:
    """Factors, P, and the (g, kappa) classification of an eigenspace."""
    if rank_tol <= 0:
        raise DomainError(f"rank_tol must be positive, got {rank_tol}")
    g = es.degree
    states = [State(es.basis[:, k], b) for k in range(g)]
    fd = np.array([density_of_state(s).rho for s in states])
    fo = np.array([transition_density(states[k], states[l]) for k, l in pair_order(g)])
    fo = fo.reshape(len(pair_order(g)), b.M)
    P = np.concatenate([fd, fo], axis=0).T
    return class_from_factors(fd, fo, rank_tol)


def class_from_factors(factors_diag: np.ndarray, factors_off: np.ndarray,
                       rank_tol: float = DEFAULT_RANK_TOL) -> DegeneracyClass:
    """Assemble a DegeneracyClass from precomputed factor vectors."""
    fd = np.atleast_2d(np.asarray(factors_diag, dtype=float))
    g = fd.shape[0]
    npairs = g * (g - 1) // 2
    fo = np.asarray(factors_off, dtype=float).reshape(npairs, fd.shape[1])
    P = np.concatenate([fd, fo], axis=0).T
    ncols = P.shape[1]
    U, s, Vt = np.linalg.svd(P, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rank_tol * smax)) if smax > 0 else 0
    kappa = ncols - rank
    kernel = Vt[rank:].T  # orthonormal columns spanning ker P
    return DegeneracyClass(
        g=g,
        factors_diag=fd,
        factors_off=fo,
        P=P,
        kappa=kappa,
        dimD=ncols - kappa - 1,
        kernel_basis=kernel,
        central=fd.mean(axis=0),
    )


def rho_of_x(dc: DegeneracyClass, x: np.ndarray) -> Density:
    """Density of the real pure state with eigenspace coordinates x."""
    return Density(dc.P @ veronese(x))


def rho_of_x_many(dc: DegeneracyClass, X: np.ndarray) -> np.ndarray:
    """Row-wise rho(x) for pre-normalized rows of X."""
    return _veronese_rows(X) @ dc.P.T


def rho_of_ensemble(dc: DegeneracyClass, A: np.ndarray) -> Density:
    """Density of the ensemble with eigenspace-restricted matrix A.

    A must be symmetric PSD with unit trace; rho = sum_k A_kk rho_k
    + sum_{k<l} A_kl rho_kl.
    """
    A = np.asarray(A, dtype=float)
    g = dc.g
    if A.shape != (g, g):
        raise DomainError(f"ensemble matrix shape {A.shape} != ({g},{g})")
    if np.abs(A - A.T).max() > 1e-10:
        raise DomainError("ensemble matrix must be symmetric")
    ev = np.linalg.eigvalsh(A)
    if ev.min() < -1e-10:
        raise DomainError(f"ensemble matrix must be PSD (min eigenvalue {ev.min():g})")
    if abs(np.trace(A) - 1.0) > 1e-10:
        raise DomainError(f"ensemble matrix must have unit trace, got {np.trace(A):g}")
    return Density(dc.P @ ensemble_coords(A, g))


def ensemble_coords(A: np.ndarray, g: int) -> np.ndarray:
    """Monomial coordinates of an ensemble matrix (diag then ordered pairs)."""
    pairs = pair_order(g)
    out = np.empty(g + len(pairs))
    out[:g] = np.diag(A)
    for idx, (k, l) in enumerate(pairs):
        out[g + idx] = A[k, l]
    return out


def kernel_nonintersection_check(dc: DegeneracyClass, samples: int, rng) -> dict:
    """Sample the unit sphere and confirm P nu(x) is never the zero vector.

    Every image must carry the full density normalization |P nu(x)|_1 = N;
    the report records the minimal Euclidean norm seen.
    """
    if samples < 1:
        raise DomainError("need at least one sample")
    X = rng.normal(size=(samples, dc.g))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    R = rho_of_x_many(dc, X)
    l1 = np.abs(R).sum(axis=1)
    N = float(np.round(dc.central.sum()))
    ok = bool(np.all(np.abs(l1 - N) <= 1e-9 * max(1.0, N)))
    min_norm = float(np.linalg.norm(R, axis=1).min())
    return {
        "samples": samples,
        "particle_number": N,
        "l1_constant": ok,
        "max_l1_deviation": float(np.abs(l1 - N).max()),
        "min_norm": min_norm,
        "passed": ok and min_norm > 0.0,
    }
