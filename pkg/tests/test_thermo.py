import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import linalg as sla

from ion_otto.linalg import SymMatrix
from ion_otto.model import FULL_DIMS, SYSTEM_DIMS, build_full_hamiltonian, build_system_hamiltonian
from ion_otto.thermo import (
    DensityMatrix,
    DimensionMismatch,
    InvalidTemperature,
    NotADensityMatrix,
    Populations,
    gibbs_state,
    partial_trace,
    populations,
    reduced_qubit,
    von_neumann_entropy,
)

SINGLET = np.array([0.0, -1.0, 1.0, 0.0]) / math.sqrt(2.0)


def _random_density(rng, n):
    a = rng.normal(size=(n, n))
    m = a @ a.T
    return m / np.trace(m)


def test_gibbs_two_level():
    delta, t = 1.3, 0.7
    rho = gibbs_state(SymMatrix(np.diag([0.0, delta])), t)
    w = math.exp(-delta / t)
    assert np.allclose(rho.entries, np.diag([1.0, w]) / (1.0 + w), atol=1e-15)


def test_gibbs_high_temperature_is_maximally_mixed():
    rho = gibbs_state(build_system_hamiltonian(10.0, 10.0), 1e12)
    assert np.allclose(rho.entries, np.eye(4) / 4, atol=1e-10)


def test_gibbs_low_temperature_does_not_overflow():
    rho = gibbs_state(build_system_hamiltonian(10.0, 10.0), 1e-3)
    assert np.allclose(rho.entries, np.diag([0.0, 0.0, 0.0, 1.0]), atol=1e-12)


def test_gibbs_system_hamiltonian_populations():
    rho = gibbs_state(build_system_hamiltonian(10.0, 10.0), 3.5, dims=SYSTEM_DIMS)
    z = 2 * math.cosh(20 / 3.5) + 2 * math.cosh(10 / 3.5)
    expected = [math.exp(-e / 3.5) / z for e in (-20.0, 20.0, -10.0, 10.0)]
    assert populations(rho, 10.0, 10.0).p == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_gibbs_full_hamiltonian_matches_expm(fig2_params):
    h = build_full_hamiltonian(10.0, fig2_params)
    rho = gibbs_state(h, 3.5, dims=FULL_DIMS)
    weights = sla.expm(-(h.entries - 20.0 * np.eye(16)) / 3.5)
    assert np.allclose(rho.entries, weights / np.trace(weights), rtol=0, atol=1e-12)


def test_gibbs_properties(rng):
    for _ in range(10):
        a = rng.normal(size=(16, 16))
        h = SymMatrix(a + a.T)
        rho = gibbs_state(h, 0.5 + rng.random(), dims=FULL_DIMS)
        eigenvalues = rho.check()
        assert rho.matrix.trace() == pytest.approx(1.0, abs=1e-12)
        assert eigenvalues.min() >= -1e-10
        assert np.linalg.norm(rho.entries @ h.entries - h.entries @ rho.entries) < 1e-9


@pytest.mark.parametrize("t", [0.0, -1.0])
def test_gibbs_rejects_bad_temperature(t):
    with pytest.raises(InvalidTemperature):
        gibbs_state(build_system_hamiltonian(1.0, 1.0), t)


def test_density_matrix_dims_must_match():
    with pytest.raises(DimensionMismatch):
        DensityMatrix.from_array(np.eye(4) / 4, dims=(2, 3))


def test_partial_trace_product_state(rng):
    rho_a = _random_density(rng, 2)
    rho_b = _random_density(rng, 8)
    joint = DensityMatrix.from_array(np.kron(rho_a, rho_b), dims=(2, 2, 2, 2))
    assert np.allclose(partial_trace(joint, keep=[0]).entries, rho_a, atol=1e-14)
    assert np.allclose(partial_trace(joint, keep=[1, 2, 3]).entries, rho_b, atol=1e-14)


@pytest.mark.parametrize("keep", [[0], [1]])
def test_partial_trace_singlet_is_maximally_mixed(keep):
    rho = DensityMatrix.from_array(np.outer(SINGLET, SINGLET), dims=SYSTEM_DIMS)
    assert np.allclose(partial_trace(rho, keep=keep).entries, np.eye(2) / 2, atol=1e-15)


def test_partial_trace_matches_einsum_oracle(fig2_params):
    rho = gibbs_state(build_full_hamiltonian(10.0, fig2_params), 3.5, dims=FULL_DIMS)
    tensor = rho.entries.reshape(FULL_DIMS + FULL_DIMS)
    oracle = np.einsum("abcdefcd->abef", tensor).reshape(4, 4)
    reduced = partial_trace(rho, keep=[0, 1])
    assert reduced.dims == SYSTEM_DIMS
    assert np.allclose(reduced.entries, oracle, rtol=0, atol=1e-15)


def test_partial_trace_in_steps_equals_joint(rng):
    rho = DensityMatrix.from_array(_random_density(rng, 16), dims=FULL_DIMS)
    joint = partial_trace(rho, keep=[0, 1])
    stepwise = partial_trace(partial_trace(rho, keep=[0, 1, 2]), keep=[0, 1])
    assert np.allclose(joint.entries, stepwise.entries, atol=1e-15)


def test_partial_trace_preserves_trace_and_positivity(rng):
    for keep in ([0], [1, 3], [0, 2, 3], [2]):
        reduced = partial_trace(DensityMatrix.from_array(_random_density(rng, 16), dims=FULL_DIMS), keep)
        assert reduced.matrix.trace() == pytest.approx(1.0, abs=1e-12)
        assert reduced.check().min() >= -1e-10


@pytest.mark.parametrize("keep", [[], [4], [-1]])
def test_partial_trace_rejects_bad_keep(keep):
    rho = DensityMatrix.from_array(np.eye(16) / 16, dims=FULL_DIMS)
    with pytest.raises(DimensionMismatch):
        partial_trace(rho, keep)


def test_populations_of_basis_state():
    down_down = np.zeros((4, 4))
    down_down[3, 3] = 1.0
    pops = populations(DensityMatrix.from_array(down_down, SYSTEM_DIMS), 10.0, 10.0)
    assert pops.p == pytest.approx((1.0, 0.0, 0.0, 0.0), abs=1e-15)


def test_populations_of_mixed_state():
    pops = populations(DensityMatrix.from_array(np.eye(4) / 4, SYSTEM_DIMS), 10.0, 10.0)
    assert pops.p == pytest.approx((0.25, 0.25, 0.25, 0.25), abs=1e-15)


def test_populations_sum_to_one(rng):
    for _ in range(10):
        rho = DensityMatrix.from_array(_random_density(rng, 4), SYSTEM_DIMS)
        pops = populations(rho, 1.0 + rng.random(), rng.random())
        assert pops.total() == pytest.approx(1.0, abs=1e-8)
        assert min(pops.p) >= -1e-10


def test_populations_requires_four_levels():
    with pytest.raises(DimensionMismatch):
        populations(DensityMatrix.from_array(np.eye(2) / 2), 1.0, 1.0)


def test_populations_type_checks_length():
    with pytest.raises(ValueError):
        Populations((0.5, 0.5))


def test_entropy_pure_state():
    rho = DensityMatrix.from_array(np.outer(SINGLET, SINGLET), dims=SYSTEM_DIMS)
    assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-12)


def test_entropy_maximally_mixed_qubit():
    assert von_neumann_entropy(DensityMatrix.from_array(np.eye(2) / 2)) == pytest.approx(math.log(2), abs=1e-15)


def test_entropy_bounds(rng):
    for n in (2, 4, 16):
        s = von_neumann_entropy(DensityMatrix.from_array(_random_density(rng, n)))
        assert 0.0 <= s <= math.log(n) + 1e-9


def test_entropy_rejects_non_density_matrix():
    with pytest.raises(NotADensityMatrix):
        von_neumann_entropy(DensityMatrix.from_array(np.eye(2)))
    with pytest.raises(NotADensityMatrix):
        von_neumann_entropy(DensityMatrix.from_array(np.diag([1.5, -0.5])))


@pytest.mark.parametrize("k", [0.0, 0.1, 0.2])
def test_single_ion_entropies_equal_without_ancilla_exchange(fig2_params, k):
    p = replace(fig2_params, j2=0.0, k=k)
    rho_s = partial_trace(gibbs_state(build_full_hamiltonian(10.0, p), 3.5, dims=FULL_DIMS), [0, 1])
    s1 = von_neumann_entropy(reduced_qubit(rho_s, 1))
    s2 = von_neumann_entropy(reduced_qubit(rho_s, 2))
    assert abs(s1 - s2) < 1e-9


def test_reduced_qubit_rejects_bad_input():
    rho_s = DensityMatrix.from_array(np.eye(4) / 4, SYSTEM_DIMS)
    with pytest.raises(DimensionMismatch):
        reduced_qubit(rho_s, 3)
    with pytest.raises(DimensionMismatch):
        reduced_qubit(DensityMatrix.from_array(np.eye(4) / 4), 1)
