import itertools
import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import linalg as sla

from ion_otto.linalg import eig_sym
from ion_otto.model import (
    InvalidParams,
    Measure,
    ModelParams,
    build_full_hamiltonian,
    build_system_hamiltonian,
    critical_field,
    ground_level,
    system_eigensystem,
    system_states,
)


def _spin(bit: int) -> int:
    return 1 if bit == 0 else -1


def _enumerated_hamiltonian(b, j1, j2, k, omega):
    """Hamiltonian built state by state from the index convention 8*b1 + 4*b2 + 2*b3 + j."""
    h = np.zeros((16, 16))
    for b1, b2, b3, j in itertools.product((0, 1), repeat=4):
        i = 8 * b1 + 4 * b2 + 2 * b3 + j
        h[i, i] = b * (_spin(b1) + _spin(b2) + _spin(b3)) + omega * j
        # exchange flips an antiparallel pair
        if b1 != b2:
            h[i, 8 * b2 + 4 * b1 + 2 * b3 + j] += j1
        if b2 != b3:
            h[i, 8 * b1 + 4 * b3 + 2 * b2 + j] += j2
        # a^dag sigma_- on each ion: |+, 0> -> |-, 1>, plus the conjugate
        bits = [b1, b2, b3]
        for ion in range(3):
            if bits[ion] == 0 and j == 0:
                flipped = list(bits)
                flipped[ion] = 1
                f = 8 * flipped[0] + 4 * flipped[1] + 2 * flipped[2] + 1
                h[i, f] += k
                h[f, i] += k
    return h


def test_full_hamiltonian_matches_enumeration(fig2_params):
    h = build_full_hamiltonian(10.0, fig2_params).entries
    oracle = _enumerated_hamiltonian(10.0, 10.0, 10.0, 0.1, 1.0)
    assert np.allclose(h, oracle, rtol=0, atol=1e-14)
    assert np.allclose(eig_sym(build_full_hamiltonian(10.0, fig2_params)).eigenvalues,
                       sla.eigh(oracle, eigvals_only=True), rtol=0, atol=1e-10)


@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
def test_full_hamiltonian_trace(fig2_params, omega):
    h = build_full_hamiltonian(3.0, replace(fig2_params, omega=omega))
    assert h.trace() == pytest.approx(8 * omega, abs=1e-12)
    assert np.array_equal(h.entries, h.entries.T)


def test_full_hamiltonian_decoupled_limit():
    p = ModelParams(b_high=1.0, b_low=1.0, j1=0.0, j2=0.0, k=0.0, omega=1.0, t_hot=1.0)
    h = build_full_hamiltonian(0.0, p).entries
    assert np.array_equal(h, np.diag([i % 2 for i in range(16)]).astype(float))


@pytest.mark.parametrize("b, j1", [(10.0, 10.0), (3.0, 1.0), (0.5, 4.0)])
def test_full_hamiltonian_tensor_sum_spectrum(b, j1):
    p = ModelParams(b_high=b, b_low=b, j1=j1, j2=0.0, k=0.0, omega=1.0, t_hot=1.0)
    energies, _ = system_eigensystem(b, j1)
    expected = sorted(e + s * b + j * 1.0 for e in energies for s in (1, -1) for j in (0, 1))
    assert np.allclose(eig_sym(build_full_hamiltonian(b, p)).eigenvalues, expected, rtol=0, atol=1e-10)


def test_full_hamiltonian_validates(fig2_params):
    with pytest.raises(InvalidParams):
        build_full_hamiltonian(10.0, replace(fig2_params, j2=-1.0))


def test_system_hamiltonian_cases():
    assert np.allclose(eig_sym(build_system_hamiltonian(10.0, 10.0)).eigenvalues, [-20, -10, 10, 20], atol=1e-10)
    assert np.array_equal(build_system_hamiltonian(3.0, 0.0).entries, np.diag([6.0, 0.0, 0.0, -6.0]))
    assert np.allclose(eig_sym(build_system_hamiltonian(0.0, 1.0)).eigenvalues, [-1, 0, 0, 1], atol=1e-12)


@pytest.mark.parametrize("b, j1", list(itertools.product([0.0, 0.7, 5.0, 10.0], [0.0, 1.0, 10.0])))
def test_system_eigensystem_diagonalizes_system_hamiltonian(b, j1):
    energies, states = system_eigensystem(b, j1)
    h = build_system_hamiltonian(b, j1).entries
    assert np.allclose(h @ states, states * energies, rtol=0, atol=1e-12)
    assert np.allclose(np.sort(energies), eig_sym(build_system_hamiltonian(b, j1)).eigenvalues, atol=1e-10)


def test_system_eigensystem_order_and_states():
    energies, states = system_eigensystem(10.0, 10.0)
    assert list(energies) == [-20.0, 20.0, -10.0, 10.0]
    assert np.allclose(states.T @ states, np.eye(4), atol=1e-15)
    # E1 is |-->, E2 is |++>
    assert states[3, 0] == 1.0
    assert states[0, 1] == 1.0
    r = 1 / math.sqrt(2)
    assert np.allclose(states[:, 2], [0, -r, r, 0])
    assert np.array_equal(states, system_states())


def test_system_levels_cross_at_critical_field():
    energies, _ = system_eigensystem(5.0, 10.0)
    assert energies[0] == energies[2] == -10.0


@pytest.mark.parametrize("j1, expected", [(10.0, 5.0), (0.0, 0.0), (1.0, 0.5)])
def test_critical_field(j1, expected):
    assert critical_field(j1) == expected


def test_critical_field_rejects_negative():
    with pytest.raises(InvalidParams):
        critical_field(-1.0)


@pytest.mark.parametrize("b, expected", [(6.0, "E1"), (4.0, "E3"), (5.0, "E1=E3")])
def test_ground_level(b, expected):
    assert ground_level(b, 10.0) == expected


@pytest.mark.parametrize("field, value", [
    ("j1", -0.1), ("j2", -1.0), ("k", -0.01), ("b_high", 0.0), ("omega", 0.0), ("t_hot", -3.5),
    ("b_low", float("nan")), ("j1", float("inf")),
])
def test_params_validation(fig2_params, field, value):
    with pytest.raises(InvalidParams):
        replace(fig2_params, **{field: value}).validate()


def test_params_inverted_fields(fig2_params):
    assert not fig2_params.inverted_fields
    assert replace(fig2_params, b_low=12.0).validate().inverted_fields


@pytest.mark.parametrize("text, expected", [("e1", Measure.E1), ("E3", Measure.E3), (" e1 ", Measure.E1)])
def test_measure_parse(text, expected):
    assert Measure.parse(text) is expected


def test_measure_parse_rejects_unknown():
    with pytest.raises(InvalidParams):
        Measure.parse("e2")
