"""Thermal states, partial traces, level populations and von Neumann entropy."""

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .linalg import SymMatrix, eig_sym, matrix_function
from .model import SYSTEM_DIMS, system_eigensystem

TRACE_TOL = 1e-10
PSD_TOL = 1e-10
ZERO_EIGENVALUE = 1e-14


class InvalidTemperature(ValueError):
    '''Temperature must be strictly positive.'''
    pass


class DimensionMismatch(ValueError):
    '''Factor dimensions do not match the density matrix.'''
    pass


class NotADensityMatrix(ValueError):
    '''Matrix fails the unit-trace or positivity checks.'''
    pass


@dataclass(frozen=True)
class DensityMatrix:
    """Real symmetric density matrix over a tensor product of factors `dims`."""
    matrix: SymMatrix
    dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d <= 0 for d in dims) or math.prod(dims) != self.matrix.dim:
            raise DimensionMismatch(
                f"Factor dims {dims} do not multiply to matrix dimension {self.matrix.dim}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_array(cls, array, dims: Iterable[int] = None) -> "DensityMatrix":
        matrix = SymMatrix(array)
        return cls(matrix, tuple(dims) if dims is not None else (matrix.dim,))

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries

    @property
    def dim(self) -> int:
        return self.matrix.dim

    def check(self) -> np.ndarray:
        """Validate trace and positivity; return the eigenvalues.

        Raises:
            NotADensityMatrix: if trace differs from 1 or an eigenvalue is negative beyond tolerance.
        """
        trace = self.matrix.trace()
        if abs(trace - 1.0) > TRACE_TOL:
            raise NotADensityMatrix(f"Trace is {trace:.12g}, expected 1")
        eigenvalues = eig_sym(self.matrix).eigenvalues
        if eigenvalues[0] < -PSD_TOL:
            raise NotADensityMatrix(f"Negative eigenvalue {eigenvalues[0]:.3e}")
        return eigenvalues


@dataclass(frozen=True)
class Populations:
    """Occupations of the four H_S levels in the fixed order E1, E2, E3, E4."""
    p: Tuple[float, float, float, float]

    def __post_init__(self):
        values = tuple(float(x) for x in self.p)
        if len(values) != 4:
            raise ValueError(f"Expected 4 populations, got {len(values)}")
        object.__setattr__(self, "p", values)

    def as_array(self) -> np.ndarray:
        return np.array(self.p)

    def total(self) -> float:
        return math.fsum(self.p)


def gibbs_state(h: SymMatrix, t: float, dims: Iterable[int] = None) -> DensityMatrix:
    """exp(-h/t)/Z from the spectrum of h, with exponents shifted by the lowest eigenvalue.

    Raises:
        InvalidTemperature: if t <= 0.
    """
    if not t > 0:
        raise InvalidTemperature(f"Temperature must be > 0, got {t}")
    decomp = eig_sym(h)
    ground = float(decomp.eigenvalues[0])
    weights = matrix_function(decomp, lambda e: math.exp(-(e - ground) / t))
    z = weights.trace()
    return DensityMatrix(SymMatrix(weights.entries / z), tuple(dims) if dims is not None else (h.dim,))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every factor not listed in `keep`; kept factors stay in ascending order.

    Raises:
        DimensionMismatch: if `keep` is empty or names a factor that does not exist.
    """
    keep = sorted(set(int(i) for i in keep))
    n = len(rho.dims)
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise DimensionMismatch(f"Cannot keep factors {keep} of a {n}-factor state")

    tensor = rho.entries.reshape(rho.dims + rho.dims)
    for axis in reversed(range(n)):
        if axis in keep:
            continue
        half = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=axis, axis2=axis + half)
    kept_dims = tuple(rho.dims[i] for i in keep)
    d = math.prod(kept_dims)
    return DensityMatrix(SymMatrix(tensor.reshape(d, d)), kept_dims)


def reduced_qubit(rho_s: DensityMatrix, ion: int) -> DensityMatrix:
    """Single-ion state of ion 1 or ion 2 of the two-ion system."""
    if rho_s.dims != SYSTEM_DIMS:
        raise DimensionMismatch(f"Expected a two-ion state with dims {SYSTEM_DIMS}, got {rho_s.dims}")
    if ion not in (1, 2):
        raise DimensionMismatch(f"ion must be 1 or 2, got {ion}")
    return partial_trace(rho_s, keep=[ion - 1])


def populations(rho_s: DensityMatrix, b: float, j1: float) -> Populations:
    """Diagonal of rho_S in the fixed H_S eigenbasis; coherences between levels are dropped."""
    if rho_s.dim != 4:
        raise DimensionMismatch(f"Expected a 4x4 system state, got dimension {rho_s.dim}")
    _, states = system_eigensystem(b, j1)
    diag = np.einsum("ij,ik,kj->j", states, rho_s.entries, states)
    return Populations(tuple(diag))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-Tr(rho ln rho) in nats; eigenvalues clamped to [0, 1], 0 ln 0 = 0 below 1e-14."""
    eigenvalues = np.clip(rho.check(), 0.0, 1.0)
    terms = [-lam * math.log(lam) for lam in eigenvalues if lam >= ZERO_EIGENVALUE]
    return max(0.0, math.fsum(terms))
