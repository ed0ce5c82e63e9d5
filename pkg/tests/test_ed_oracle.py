import itertools
import math

import numpy as np
import pytest

from chains import random_small_chain
from spinmirror.dynamics import ThermalState, zz_correlation
from spinmirror.ed_oracle import (
    MAX_SITES,
    build_spin_hamiltonian,
    ed_correlation,
    sector_spectrum,
    spin_operator,
    subset_sums,
    thermal_weights,
)
from spinmirror.errors import ValidationError
from spinmirror.inverse_problem import reconstruct_direct
from spinmirror.jacobi_core import SymmetricChainSpec, diagonalize
from spinmirror.mirror_design import linear_spectrum
from spinmirror.string_correlators import xx_cross_correlation


def test_two_site_hamiltonian_by_hand():
    model = build_spin_hamiltonian(SymmetricChainSpec([1.0], [0.0, 0.0]))
    expected = np.zeros((4, 4))
    expected[1, 2] = expected[2, 1] = 1.0  # |up,down> <-> |down,up>
    np.testing.assert_array_equal(model.hamiltonian, expected)


def test_field_term_counts_up_spins():
    model = build_spin_hamiltonian(SymmetricChainSpec([1.0], [0.5, 0.5]))
    np.testing.assert_array_equal(np.diag(model.hamiltonian), [0.0, 0.5, 0.5, 1.0])


def test_size_guard():
    with pytest.raises(ValidationError):
        build_spin_hamiltonian(SymmetricChainSpec.homogeneous(MAX_SITES + 1))


def test_spin_algebra():
    n = 3
    Sx, Sy, Sz = (spin_operator(n, 1, c) for c in "xyz")
    np.testing.assert_allclose(Sx @ Sy - Sy @ Sx, 1j * Sz, atol=1e-15)
    np.testing.assert_allclose(Sz @ Sz, 0.25 * np.eye(8), atol=0)
    np.testing.assert_allclose(spin_operator(n, 1, "+"), Sx + 1j * Sy, atol=1e-15)
    with pytest.raises(ValidationError):
        spin_operator(n, 0, "w")
    with pytest.raises(ValidationError):
        spin_operator(n, 3, "z")


def test_hamiltonian_conserves_magnetization(rng):
    model = build_spin_hamiltonian(random_small_chain(rng, 6))
    H = model.hamiltonian
    np.testing.assert_array_equal(H, H.T)
    Mz = np.diag(model.magnetization())
    np.testing.assert_allclose(H @ Mz - Mz @ H, 0.0, atol=0)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_spectrum_is_subset_sums(rng, n):
    spec = random_small_chain(rng, n)
    model = build_spin_hamiltonian(spec)
    eps = diagonalize(spec).eigenvalues
    np.testing.assert_allclose(model.energies, subset_sums(eps), atol=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_magnetization_sectors(rng, n):
    spec = random_small_chain(rng, n)
    model = build_spin_hamiltonian(spec)
    eps = diagonalize(spec).eigenvalues
    for k in range(n + 1):
        ref = sorted(sum(c) for c in itertools.combinations(eps, k))
        np.testing.assert_allclose(sector_spectrum(model, k), ref, atol=1e-12)


def test_thermal_weights():
    E = np.array([0.0, 0.0, 1.0, 3.0])
    np.testing.assert_allclose(thermal_weights(E, math.inf), [0.5, 0.5, 0.0, 0.0])
    np.testing.assert_allclose(thermal_weights(E, 0.0), 0.25)
    w = thermal_weights(E, 2.0)
    assert w.sum() == pytest.approx(1.0)
    assert w[2] / w[0] == pytest.approx(math.exp(-2.0))


@pytest.mark.parametrize("beta", [math.inf, 1.0, 0.0])
def test_equal_time_z_square(rng, beta):
    model = build_spin_hamiltonian(random_small_chain(rng, 4))
    assert ed_correlation(model, ("z", 0), ("z", 0), beta, [0.0]).values[0] == pytest.approx(0.25)


def test_four_site_mirror_transfers_z():
    spec = linear_spectrum(4, 0.0, 1.0)
    chain = reconstruct_direct(spec).chain
    model = build_spin_hamiltonian(chain)
    value = ed_correlation(model, ("z", 0), ("z", 3), math.inf, [spec.tau]).values[0]
    assert value.real == pytest.approx(0.25, abs=1e-10)


def test_accepts_matrix_operators(rng):
    model = build_spin_hamiltonian(random_small_chain(rng, 3))
    Sz = spin_operator(3, 1, "z")
    a = ed_correlation(model, Sz, Sz, 1.0, [0.5]).values
    b = ed_correlation(model, ("z", 1), ("z", 1), 1.0, [0.5]).values
    np.testing.assert_allclose(a, b, atol=1e-15)


@pytest.mark.parametrize("T", [0.0, 1.0, math.inf])
def test_agrees_with_fermionic_correlators(rng, T):
    spec = random_small_chain(rng, 6)
    eig = diagonalize(spec)
    model = build_spin_hamiltonian(spec)
    state = ThermalState.from_temperature(eig, T)
    beta = state.beta
    t = np.linspace(0, 3, 7)
    for j, k in [(0, 0), (1, 4), (5, 2), (3, 3)]:
        zz = zz_correlation(eig, state, j, k, t).values
        np.testing.assert_allclose(zz, ed_correlation(model, ("z", j), ("z", k), beta, t).values, atol=1e-10)
        xx = xx_cross_correlation(eig, state, j, k, t).values
        np.testing.assert_allclose(xx, ed_correlation(model, ("x", j), ("x", k), beta, t).values, atol=1e-10)


def test_degenerate_ground_state_matches_zero_mode_convention():
    # odd length, no field: a zero mode makes the ground state doubly degenerate
    spec = SymmetricChainSpec([1.0, 1.3, 1.3, 1.0], [0.0] * 5)
    eig = diagonalize(spec)
    assert abs(eig.eigenvalues[2]) < 1e-14
    model = build_spin_hamiltonian(spec)
    assert np.isclose(model.energies[0], model.energies[1])
    state = ThermalState.from_temperature(eig, 0.0)
    t = np.linspace(0, 2, 5)
    for j, k in [(0, 0), (1, 3), (2, 2)]:
        ed = ed_correlation(model, ("x", j), ("x", k), math.inf, t).values
        np.testing.assert_allclose(xx_cross_correlation(eig, state, j, k, t).values, ed, atol=1e-10)
        ed = ed_correlation(model, ("z", j), ("z", k), math.inf, t).values
        np.testing.assert_allclose(zz_correlation(eig, state, j, k, t).values, ed, atol=1e-10)
