"""Dense real symmetric linear algebra for the small operators of the engine.

Every operator in the model has real matrix elements in the product basis, so
the whole package works with real symmetric matrices. Dimensions stay at 2, 4
and 16; a cyclic Jacobi sweep is plenty at that size and gives a deterministic
eigenbasis for identical input.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

SYMMETRY_RTOL = 1e-12
JACOBI_RTOL = 1e-12
MAX_SWEEPS = 100


class NonConvergence(ArithmeticError):
    '''Jacobi iteration did not reach the off-diagonal tolerance.'''

    def __init__(self, sweeps: int, off_norm: float):
        super().__init__(f"Jacobi eigensolver did not converge after {sweeps} sweeps "
                         f"(off-diagonal norm {off_norm:.3e})")
        self.sweeps = sweeps
        self.off_norm = off_norm


class DomainError(ValueError):
    '''Scalar function is undefined at one of the eigenvalues.'''
    pass


def _read_only(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric matrix, symmetrized on construction and immutable afterwards."""
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"Expected a non-empty square matrix, got shape {a.shape}")
        scale = max(1.0, float(np.linalg.norm(a)))
        if np.linalg.norm(a - a.T) > 1e-8 * scale:
            raise ValueError("Matrix is not symmetric")
        object.__setattr__(self, "entries", _read_only(0.5 * (a + a.T)))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.entries))

    def trace(self) -> float:
        return float(np.trace(self.entries))


@dataclass(frozen=True)
class SpectralDecomp:
    """Ascending eigenvalues with orthonormal eigenvectors; column i pairs with eigenvalue i."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _read_only(np.array(self.eigenvalues, dtype=float)))
        object.__setattr__(self, "eigenvectors", _read_only(np.array(self.eigenvectors, dtype=float)))

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def kron(a, b) -> np.ndarray:
    """Kronecker product; row (i_a*dim(b) + i_b), column (j_a*dim(b) + j_b)."""
    a = a.entries if isinstance(a, SymMatrix) else np.asarray(a, dtype=float)
    b = b.entries if isinstance(b, SymMatrix) else np.asarray(b, dtype=float)
    return np.kron(a, b)


def kron_all(*factors) -> np.ndarray:
    """Left-to-right Kronecker product of several factors."""
    result = np.ones((1, 1))
    for factor in factors:
        result = kron(result, factor)
    return result


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Apply the Jacobi rotation that zeroes a[p, q], in place."""
    apq = a[p, q]
    tau = (a[q, q] - a[p, p]) / (2.0 * apq)
    if abs(tau) > 1e150:
        t = 0.5 / tau
    else:
        t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    a[p, q] = a[q, p] = 0.0

    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def eig_sym(matrix: SymMatrix) -> SpectralDecomp:
    """Cyclic Jacobi eigendecomposition with a threshold skip for negligible entries.

    Pairs are visited in fixed row-major order every sweep, so the result is
    deterministic. Converged once the off-diagonal Frobenius norm falls to
    1e-12 of the matrix norm.

    Raises:
        NonConvergence: if MAX_SWEEPS sweeps are not enough.
    """
    a = np.array(matrix.entries, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    norm = float(np.linalg.norm(a))
    target = JACOBI_RTOL * norm
    skip = 1e-3 * target / n

    off = _off_norm(a)
    sweeps = 0
    while off > target:
        if sweeps == MAX_SWEEPS:
            raise NonConvergence(sweeps, off)
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > skip:
                    _rotate(a, v, p, q)
        sweeps += 1
        off = _off_norm(a)

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return SpectralDecomp(eigenvalues=eigenvalues[order], eigenvectors=v[:, order])


def matrix_function(decomp: SpectralDecomp, f: Callable[[float], float]) -> SymMatrix:
    """V f(D) V^T for a scalar function f evaluated on each eigenvalue.

    Raises:
        DomainError: if f fails or returns a non-finite value at some eigenvalue.
    """
    values = []
    for eigenvalue in decomp.eigenvalues:
        try:
            value = float(f(float(eigenvalue)))
        except (ValueError, OverflowError, ZeroDivisionError) as exc:
            raise DomainError(f"Function undefined at eigenvalue {eigenvalue:.6g}: {exc}") from exc
        if not math.isfinite(value):
            raise DomainError(f"Function not finite at eigenvalue {eigenvalue:.6g}")
        values.append(value)
    v = decomp.eigenvectors
    return SymMatrix((v * np.array(values)) @ v.T)
