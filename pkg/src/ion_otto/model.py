"""Hamiltonians of the three-ion chain with one truncated phonon mode.

Basis ordering is fixed: ion 1, ion 2, ion 3, phonon, with |+> before |->
and |0> before |1>, i.e. index(b1, b2, b3, j) = 8*b1 + 4*b2 + 2*b3 + j.
Units: hbar = k_B = 1, every parameter is an energy.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np

from .linalg import SymMatrix, kron_all

# single-ion operators, index 0 = |+>, index 1 = |->
SIGMA_Z = np.diag([1.0, -1.0])
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]])
SIGMA_MINUS = SIGMA_PLUS.T
# phonon mode truncated to {|0>, |1>}
ANNIHILATE = np.array([[0.0, 1.0], [0.0, 0.0]])
CREATE = ANNIHILATE.T
NUMBER = CREATE @ ANNIHILATE
I2 = np.eye(2)

FULL_DIMS = (2, 2, 2, 2)
SYSTEM_DIMS = (2, 2)
SYSTEM_IONS = (0, 1)
LEVELS = ("E1", "E2", "E3", "E4")
DEGENERACY_TOL = 1e-12


class InvalidParams(ValueError):
    '''Model parameters outside the allowed domain.'''
    pass


class Measure(Enum):
    """Eigenstate of H_S onto which the cooling stroke projects."""
    E1 = "e1"
    E3 = "e3"

    @classmethod
    def parse(cls, text: str) -> "Measure":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise InvalidParams(f"Unknown measurement basis '{text}' (expected e1 or e3)") from None


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of one engine configuration."""
    b_high: float
    b_low: float
    j1: float
    j2: float
    k: float
    omega: float
    t_hot: float
    measure: Measure = Measure.E1

    def validate(self) -> "ModelParams":
        checks = [
            (self.j1 >= 0, f"j1 must be >= 0 (antiferromagnetic coupling), got {self.j1}"),
            (self.j2 >= 0, f"j2 must be >= 0 (antiferromagnetic coupling), got {self.j2}"),
            (self.k >= 0, f"k must be >= 0, got {self.k}"),
            (self.b_high > 0, f"b_high must be > 0, got {self.b_high}"),
            (self.omega > 0, f"omega must be > 0, got {self.omega}"),
            (self.t_hot > 0, f"t_hot must be > 0, got {self.t_hot}"),
        ]
        for value in (self.b_high, self.b_low, self.j1, self.j2, self.k, self.omega, self.t_hot):
            if not math.isfinite(value):
                raise InvalidParams(f"Parameters must be finite, got {value}")
        for ok, message in checks:
            if not ok:
                raise InvalidParams(message)
        if not isinstance(self.measure, Measure):
            raise InvalidParams(f"measure must be a Measure, got {self.measure!r}")
        return self

    @property
    def inverted_fields(self) -> bool:
        return self.b_high < self.b_low


def _site_operator(op: np.ndarray, site: int) -> np.ndarray:
    """Embed a one-site operator at position `site` of the four-factor basis."""
    factors = [I2] * len(FULL_DIMS)
    factors[site] = op
    return kron_all(*factors)


def _hopping(site_a: int, site_b: int) -> np.ndarray:
    """sigma_+^(a) sigma_-^(b) + sigma_-^(a) sigma_+^(b) on the full basis."""
    return (_site_operator(SIGMA_PLUS, site_a) @ _site_operator(SIGMA_MINUS, site_b)
            + _site_operator(SIGMA_MINUS, site_a) @ _site_operator(SIGMA_PLUS, site_b))


def build_full_hamiltonian(b: float, p: ModelParams) -> SymMatrix:
    """16x16 Hamiltonian with the common field b on all three ions."""
    p.validate()
    phonon = 3
    a = _site_operator(ANNIHILATE, phonon)
    a_dag = _site_operator(CREATE, phonon)

    h = np.zeros((16, 16))
    for ion in range(3):
        h += b * _site_operator(SIGMA_Z, ion)
    h += p.j1 * _hopping(0, 1)
    h += p.j2 * _hopping(1, 2)
    h += p.omega * _site_operator(NUMBER, phonon)
    for ion in range(3):
        h += p.k * (a_dag @ _site_operator(SIGMA_MINUS, ion) + _site_operator(SIGMA_PLUS, ion) @ a)
    return SymMatrix(h)


def build_system_hamiltonian(b: float, j1: float) -> SymMatrix:
    """4x4 H_S = b(sz x I + I x sz) + j1(s+ x s- + s- x s+) in the (ion 1, ion 2) basis."""
    zeeman = np.kron(SIGMA_Z, I2) + np.kron(I2, SIGMA_Z)
    exchange = np.kron(SIGMA_PLUS, SIGMA_MINUS) + np.kron(SIGMA_MINUS, SIGMA_PLUS)
    return SymMatrix(b * zeeman + j1 * exchange)


def system_states() -> np.ndarray:
    """Fixed eigenvectors of H_S as columns, ordered E1, E2, E3, E4.

    Two-ion index is 2*b1 + b2: |++> = 0, |+-> = 1, |-+> = 2, |--> = 3.
    """
    r = 1.0 / math.sqrt(2.0)
    return np.array([
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, -r, r],
        [0.0, 0.0, r, r],
        [1.0, 0.0, 0.0, 0.0],
    ])


def system_eigensystem(b: float, j1: float) -> Tuple[np.ndarray, np.ndarray]:
    """Analytic spectrum of H_S in the fixed labelling (E1, E2, E3, E4).

    E1 = -2b |-->, E2 = +2b |++>, E3 = -j1 singlet, E4 = +j1 triplet. The order
    is the labelling the heat and work sums index over, not a numeric sort.
    """
    energies = np.array([-2.0 * b, 2.0 * b, -j1, j1])
    return energies, system_states()


def critical_field(j1: float) -> float:
    """Field at which E1 and E3 cross."""
    if j1 < 0:
        raise InvalidParams(f"j1 must be >= 0, got {j1}")
    return j1 / 2.0


def ground_level(b: float, j1: float) -> str:
    """Label of the H_S ground level: 'E1', 'E3', or 'E1=E3' at the crossing."""
    energies, _ = system_eigensystem(b, j1)
    lowest = energies.min()
    labels: List[str] = [label for label, e in zip(LEVELS, energies)
                         if e - lowest <= DEGENERACY_TOL * max(1.0, abs(lowest))]
    return "=".join(labels)
