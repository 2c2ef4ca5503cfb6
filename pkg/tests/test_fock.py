import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degeo import (DomainError, OneBodyOperator, State, add_interaction,
                   density_of_state, enumerate_basis, laplacian, lift_one_body,
                   named_graph, slater, transition_density)
from conftest import square_symmetric_orbitals, tetra_symmetric_orbitals
from oracles import lift_oracle


def test_enumerate_4_2():
    b = enumerate_basis(4, 2)
    assert b.states == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
    assert b.L == 6


def test_enumerate_3_2():
    assert enumerate_basis(3, 2).states == ((1, 2), (1, 3), (2, 3))


def test_enumerate_full_band():
    b = enumerate_basis(5, 5)
    assert b.L == 1 and b.states == ((1, 2, 3, 4, 5),)


@pytest.mark.parametrize("M,N", [(3, 4), (3, 0), (2, -1)])
def test_enumerate_domain_errors(M, N):
    with pytest.raises(DomainError):
        enumerate_basis(M, N)


def test_lift_tetrahedron_ground_energy():
    # complete-graph Laplacian spectrum is {0, M, M, M}; two-particle
    # ground energy is 0 + 4
    h = laplacian(named_graph("tetrahedron"))
    H = lift_one_body(h, enumerate_basis(4, 2))
    assert abs(np.linalg.eigvalsh(H.H)[0] - 4.0) < 1e-12


def test_lift_diagonal_is_number_operator():
    b = enumerate_basis(4, 2)
    v = np.array([0.3, -1.2, 2.0, 0.5])
    H = lift_one_body(OneBodyOperator(np.diag(v)), b).H
    assert np.allclose(H, np.diag([v[i - 1] + v[j - 1] for i, j in b.states]))


def test_lift_single_particle_identity():
    h = laplacian(named_graph("square"))
    H = lift_one_body(h, enumerate_basis(4, 1)).H
    assert np.allclose(H, h.h)


@pytest.mark.parametrize("M,N", [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3)])
def test_lift_matches_full_space_oracle(M, N, rng):
    for _ in range(3):
        A = rng.normal(size=(M, M))
        h = (A + A.T) / 2
        ours = lift_one_body(OneBodyOperator(h), enumerate_basis(M, N)).H
        assert np.allclose(ours, lift_oracle(h, N), atol=1e-12)


def test_lift_additivity(rng):
    b = enumerate_basis(4, 2)
    h = laplacian(named_graph("tetrahedron"))
    v = rng.normal(size=4)
    lhs = lift_one_body(OneBodyOperator(h.h + np.diag(v)), b).H
    rhs = lift_one_body(h, b).H + lift_one_body(OneBodyOperator(np.diag(v)), b).H
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_interaction_zero_noop():
    b = enumerate_basis(3, 2)
    H = lift_one_body(laplacian(named_graph("triangle")), b)
    assert np.array_equal(add_interaction(H, np.zeros((3, 3))).H, H.H)


def test_interaction_triangle_constant_shift():
    # every 2-subset of a triangle contains exactly one interacting pair
    b = enumerate_basis(3, 2)
    H = lift_one_body(laplacian(named_graph("triangle")), b)
    U = 1.7
    W = U * (np.ones((3, 3)) - np.eye(3))
    shifted = add_interaction(H, W).H
    assert np.allclose(shifted, H.H + U * np.eye(3), atol=1e-12)


def test_interaction_full_band_shift(rng):
    b = enumerate_basis(3, 3)
    H = lift_one_body(laplacian(named_graph("triangle")), b)
    A = rng.normal(size=(3, 3))
    W = A + A.T
    np.fill_diagonal(W, 0.0)
    total = sum(W[i, j] for i in range(3) for j in range(i + 1, 3))
    assert np.allclose(add_interaction(H, W).H, H.H + total, atol=1e-12)


def test_interaction_nonzero_diagonal_rejected():
    b = enumerate_basis(3, 2)
    H = lift_one_body(laplacian(named_graph("triangle")), b)
    with pytest.raises(DomainError):
        add_interaction(H, np.eye(3))


def test_density_single_determinant():
    b = enumerate_basis(4, 2)
    psi = np.zeros(6)
    psi[0] = 1.0  # state {1,2}
    assert np.array_equal(density_of_state(State(psi, b)).rho, [1, 1, 0, 0])


def test_density_tetra_slater_uniform():
    phi0, phi1, _, _ = tetra_symmetric_orbitals()
    b = enumerate_basis(4, 2)
    st_ = slater([phi0, phi1], b)
    assert np.allclose(density_of_state(st_).rho, 0.5, atol=1e-12)


def test_density_equal_weight_3_2():
    b = enumerate_basis(3, 2)
    rho = density_of_state(State(np.ones(3), b)).rho
    assert np.allclose(rho, 2 / 3, atol=1e-12)


def test_density_zero_state_rejected():
    b = enumerate_basis(3, 2)
    with pytest.raises(DomainError):
        density_of_state(State(np.zeros(3), b))


def test_transition_tetrahedron_factor():
    phi0, phi1, phi2, _ = tetra_symmetric_orbitals()
    b = enumerate_basis(4, 2)
    s1 = slater([phi0, phi1], b)
    s2 = slater([phi0, phi2], b)
    got = transition_density(s1, s2)
    assert np.allclose(np.abs(got), 0.5, atol=1e-12)
    assert np.allclose(got, 0.5 * np.array([1, -1, -1, 1]) * np.sign(got[0]), atol=1e-12)


def test_transition_square_factor():
    phi0, phi1, phi2 = square_symmetric_orbitals()
    b = enumerate_basis(4, 2)
    s1 = slater([phi0, phi1], b)
    s2 = slater([phi0, phi2], b)
    got = transition_density(s1, s2)
    assert np.allclose(got, 0.5 * np.array([1, -1, 1, -1]) * np.sign(got[0]), atol=1e-12)


def test_transition_diagonal_is_twice_density(rng):
    b = enumerate_basis(4, 2)
    psi = rng.normal(size=6)
    psi /= np.linalg.norm(psi)
    s = State(psi, b)
    assert np.allclose(transition_density(s, s), 2 * density_of_state(s).rho,
                       atol=1e-12)


def test_slater_standard_basis():
    b = enumerate_basis(4, 2)
    e1, e2 = np.eye(4)[0], np.eye(4)[1]
    psi = slater([e1, e2], b).psi
    expect = np.zeros(6)
    expect[0] = 1.0
    assert np.allclose(psi, expect)


def test_slater_swap_flips_sign():
    phi0, phi1, _, _ = tetra_symmetric_orbitals()
    b = enumerate_basis(4, 2)
    assert np.allclose(slater([phi0, phi1], b).psi, -slater([phi1, phi0], b).psi)


def test_slater_requires_orthonormal():
    b = enumerate_basis(4, 2)
    with pytest.raises(DomainError):
        slater([np.ones(4) / 2, np.ones(4) / 2], b)


@st.composite
def random_state(draw):
    M = draw(st.integers(2, 5))
    N = draw(st.integers(1, M))
    b = enumerate_basis(M, N)
    seed = draw(st.integers(0, 2 ** 31))
    psi = np.random.default_rng(seed).normal(size=b.L)
    return b, psi


@given(random_state())
@settings(max_examples=60, deadline=None)
def test_density_pauli_and_normalization(mn):
    b, psi = mn
    rho = density_of_state(State(psi, b)).rho
    assert rho.min() >= -1e-10 and rho.max() <= 1 + 1e-10
    assert abs(rho.sum() - b.N) < 1e-10


@given(random_state())
@settings(max_examples=40, deadline=None)
def test_orthogonal_transition_sums_to_zero(mn):
    b, psi = mn
    if b.L < 2:
        return
    rng = np.random.default_rng(1)
    phi = rng.normal(size=b.L)
    phi -= (phi @ psi) / (psi @ psi) * psi
    if np.linalg.norm(phi) < 1e-12 or np.linalg.norm(psi) < 1e-12:
        return
    s1 = State(psi / np.linalg.norm(psi), b)
    s2 = State(phi / np.linalg.norm(phi), b)
    assert abs(transition_density(s1, s2).sum()) < 1e-10


def test_lifted_symmetry(rng):
    for _ in range(5):
        A = rng.normal(size=(5, 5))
        h = (A + A.T) / 2
        H = lift_one_body(OneBodyOperator(h), enumerate_basis(5, 2)).H
        assert np.abs(H - H.T).max() < 1e-13


def test_normalized_flag_validated():
    b = enumerate_basis(3, 2)
    with pytest.raises(DomainError):
        State(np.array([1.0, 1.0, 0.0]), b, normalized=True)
    s = State(np.array([1.0, 0.0, 0.0]), b, normalized=True)
    assert s.normalized
