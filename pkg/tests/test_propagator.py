import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from kerrnqs.fock import (
    FockBasis,
    JointOperator,
    NumericalError,
    StateVector,
    basis_state,
    coherent_state,
    identity,
    vacuum_state,
)
from kerrnqs.hamiltonian import CouplerConfig, build_h_nl, build_kick_generator
from kerrnqs.propagator import (
    build_propagators,
    build_u_k,
    build_u_nl,
    expm_hermitian_scaled,
    iterate_kicks,
    run_kicks,
)

FIG1 = CouplerConfig(chi_a=1, chi_b=1, chi_ab=1, epsilon=0.01, alpha=0.04, T=math.pi, dim_a=10, dim_b=10)


def random_hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (x + x.conj().T) / 2


def test_expm_of_zero_is_identity():
    basis = FockBasis(3, 2)
    out = expm_hermitian_scaled(JointOperator(basis, np.zeros((6, 6))), 2.5)
    np.testing.assert_allclose(out.matrix, np.eye(6), atol=1e-15)


def test_expm_diagonal_phases():
    basis = FockBasis(2, 2)
    h = JointOperator(basis, np.diag([0, 1, 0, 1]))
    out = expm_hermitian_scaled(h, math.pi)
    np.testing.assert_allclose(out.matrix, np.diag([1, -1, 1, -1]), atol=1e-15)


@given(st.integers(0, 10_000), st.floats(-5, 5, allow_nan=False))
@settings(max_examples=30)
def test_expm_matches_pade_oracle_and_is_unitary(seed, s):
    basis = FockBasis(3, 3)
    h = JointOperator(basis, random_hermitian(9, seed))
    u = expm_hermitian_scaled(h, s)
    assert u.is_unitary(1e-10)
    np.testing.assert_allclose(u.matrix, scipy.linalg.expm(-1j * s * h.matrix), atol=1e-10)
    inverse = expm_hermitian_scaled(h, -s)
    np.testing.assert_allclose((u @ inverse).matrix, np.eye(9), atol=1e-12)


def test_expm_rejects_non_hermitian():
    basis = FockBasis(2, 2)
    with pytest.raises(NumericalError):
        expm_hermitian_scaled(JointOperator(basis, np.triu(np.ones((4, 4)))), 1.0)


def test_u_nl_matches_pade_oracle():
    h = build_h_nl(FIG1).matrix
    np.testing.assert_allclose(build_u_nl(FIG1).matrix, scipy.linalg.expm(-1j * math.pi * h), atol=1e-10)


def test_vacuum_is_fixed_point_of_free_flight():
    u = build_u_nl(FIG1)
    np.testing.assert_allclose(u.matrix[:, 0], vacuum_state(FIG1.basis).amplitudes, atol=1e-12)


def test_phase_on_11_is_minus_one():
    cfg = FIG1.replace(epsilon=0)
    idx = cfg.basis.flat_index(1, 1)
    assert build_u_nl(cfg).matrix[idx, idx] == pytest.approx(-1, abs=1e-15)


def test_zero_time_free_flight_is_identity():
    h = build_h_nl(FIG1)
    np.testing.assert_allclose(expm_hermitian_scaled(h, 0.0).matrix, np.eye(100), atol=1e-12)


@given(st.floats(-2, 2, allow_nan=False), st.floats(-2, 2, allow_nan=False),
       st.floats(-2, 2, allow_nan=False), st.floats(0.01, 10))
@settings(max_examples=30)
def test_diagonal_fast_path_equals_spectral(chi_a, chi_b, chi_ab, T):
    cfg = CouplerConfig(chi_a=chi_a, chi_b=chi_b, chi_ab=chi_ab, epsilon=0, T=T, dim_a=6, dim_b=5)
    fast = build_u_nl(cfg, method="diagonal").matrix
    slow = build_u_nl(cfg, method="spectral").matrix
    assert np.max(np.abs(fast - slow)) <= 1e-12
    np.testing.assert_array_equal(build_u_nl(cfg).matrix, fast)


def test_diagonal_path_refused_with_coupling():
    with pytest.raises(ValueError):
        build_u_nl(FIG1, method="diagonal")


def test_u_k_zero_alpha_is_identity():
    np.testing.assert_allclose(build_u_k(FIG1.replace(alpha=0)).matrix, np.eye(100), atol=1e-15)


def test_u_k_vacuum_overlap():
    u = build_u_k(FIG1)
    assert abs(u.matrix[0, 0]) ** 2 == pytest.approx(math.exp(-(1 / 25) ** 2), abs=1e-12)
    assert abs(u.matrix[0, 0]) ** 2 == pytest.approx(0.99840128, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.04, 0.3 + 0.2j, -0.5j])
def test_u_k_column_is_displaced_vacuum(alpha):
    cfg = FIG1.replace(alpha=alpha, dim_a=30, dim_b=2)
    column = build_u_k(cfg).matrix[:, 0].reshape(30, 2)
    expected = coherent_state(-1j * alpha, 30).amplitudes
    assert np.max(np.abs(column[:, 0] - expected)) <= 1e-10
    assert not np.any(np.abs(column[:, 1]) > 1e-15)


def test_u_k_acts_trivially_on_mode_b():
    u = build_u_k(FIG1.replace(dim_a=5, dim_b=4)).matrix.reshape(5, 4, 5, 4)
    for n in range(4):
        for n2 in range(4):
            if n != n2:
                assert np.max(np.abs(u[:, n, :, n2])) < 1e-15


def test_propagators_compose_kick_after_flight():
    props = build_propagators(FIG1)
    for op in (props.u_nl, props.u_k, props.u_step):
        assert op.is_unitary(1e-10)
    np.testing.assert_array_equal(props.u_step.matrix, props.u_k.matrix @ props.u_nl.matrix)


def test_run_kicks_zero_drive_keeps_vacuum():
    cfg = FIG1.replace(alpha=0, epsilon=0, n_kicks=20)
    states = run_kicks(cfg, None, vacuum_state(cfg.basis))
    assert len(states) == 21
    for psi in states:
        np.testing.assert_allclose(psi.amplitudes, states[0].amplitudes, atol=1e-15)


def test_run_kicks_zero_kicks():
    psi0 = vacuum_state(FIG1.basis)
    states = run_kicks(FIG1, None, psi0, n_kicks=0)
    assert len(states) == 1
    np.testing.assert_array_equal(states[0].amplitudes, psi0.amplitudes)


def test_run_kicks_first_step_order():
    psi0 = basis_state(FIG1.basis, 1, 1)
    states = run_kicks(FIG1, None, psi0, n_kicks=1)
    u_nl, u_k = build_u_nl(FIG1).matrix, build_u_k(FIG1).matrix
    np.testing.assert_allclose(states[1].amplitudes, u_k @ (u_nl @ psi0.amplitudes), atol=1e-14)


def test_run_kicks_rejects_bad_inputs():
    with pytest.raises(ValueError):
        run_kicks(FIG1, None, vacuum_state(FockBasis(3, 3)))


def test_fig1_three_state_closure():
    states = run_kicks(FIG1, None, vacuum_state(FIG1.basis))
    tracked = [sum(psi.probability(*lab) for lab in [(0, 0), (0, 1), (1, 0)]) for psi in states]
    assert max(abs(1 - p) for p in tracked) < 1e-3


def test_semigroup_consistency():
    psi0 = vacuum_state(FIG1.basis)
    direct = run_kicks(FIG1, None, psi0, n_kicks=300)
    first = run_kicks(FIG1, None, psi0, n_kicks=120)
    second = run_kicks(FIG1, None, first[-1], n_kicks=180)
    assert np.max(np.abs(direct[-1].amplitudes - second[-1].amplitudes)) < 1e-10


def test_matrix_power_oracle():
    step = build_propagators(FIG1).u_step.matrix
    psi0 = vacuum_state(FIG1.basis)
    states = run_kicks(FIG1, None, psi0, n_kicks=64)
    expected = np.linalg.matrix_power(step, 64) @ psi0.amplitudes
    assert np.max(np.abs(states[-1].amplitudes - expected)) < 1e-10


def test_norm_preserved_over_ten_thousand_kicks():
    step = build_propagators(FIG1).u_step
    worst = max(abs(np.linalg.norm(c) - 1) for c in iterate_kicks(step, vacuum_state(FIG1.basis), 10_000))
    assert worst < 1e-10
