"""Truncated two-mode Fock space: basis bookkeeping, boson operators, states.

Joint basis states |m>_a (x) |n>_b are flattened mode-a-major, i.e. the flat
index of (m, n) is ``m * dim_b + n``; the amplitude vector therefore reads
c_00, c_01, ..., c_0(dim_b-1), c_10, c_11, ...
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

NORM_TOL = 1e-10


class NumericalError(ArithmeticError):
    """A numerical invariant (hermiticity, unitarity, norm) was violated."""


class NormalizationError(NumericalError, ValueError):
    pass


@dataclass(frozen=True)
class FockBasis:
    """Per-mode truncation dimensions (levels 0..dim-1 in each mode)."""

    dim_a: int
    dim_b: int

    def __post_init__(self):
        for name in ("dim_a", "dim_b"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise TypeError(f"{name} must be an integer, got {value!r}")
            if value < 2:
                raise ValueError(f"{name} must be >= 2 (qubit subspace), got {value}")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def flat_index(self, m: int, n: int) -> int:
        if not (0 <= m < self.dim_a and 0 <= n < self.dim_b):
            raise IndexError(f"label ({m}, {n}) outside basis ({self.dim_a}, {self.dim_b})")
        return m * self.dim_b + n

    def unflatten(self, index: int) -> tuple[int, int]:
        if not 0 <= index < self.dim:
            raise IndexError(f"flat index {index} outside joint dimension {self.dim}")
        return divmod(index, self.dim_b)

    def labels(self) -> Iterator[tuple[int, int]]:
        for m in range(self.dim_a):
            for n in range(self.dim_b):
                yield m, n


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.complex128, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class JointOperator:
    """Dense complex matrix acting on the joint two-mode basis."""

    basis: FockBasis
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        if matrix.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(
                f"operator shape {matrix.shape} does not match joint dimension {self.basis.dim}"
            )
        object.__setattr__(self, "matrix", matrix)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def is_unitary(self, tol: float = 1e-10) -> bool:
        gram = self.matrix.conj().T @ self.matrix
        return bool(np.max(np.abs(gram - np.eye(self.basis.dim))) <= tol)

    def dagger(self) -> JointOperator:
        return JointOperator(self.basis, self.matrix.conj().T)

    def __matmul__(self, other):
        if isinstance(other, JointOperator):
            _check_same_basis(self.basis, other.basis)
            return JointOperator(self.basis, self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            _check_same_basis(self.basis, other.basis)
            return StateVector(self.basis, self.matrix @ other.amplitudes)
        return NotImplemented

    def __add__(self, other: JointOperator) -> JointOperator:
        _check_same_basis(self.basis, other.basis)
        return JointOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other: JointOperator) -> JointOperator:
        _check_same_basis(self.basis, other.basis)
        return JointOperator(self.basis, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> JointOperator:
        return JointOperator(self.basis, scalar * self.matrix)

    __rmul__ = __mul__


def _check_same_basis(left: FockBasis, right: FockBasis) -> None:
    if left != right:
        raise ValueError(f"basis mismatch: {left} vs {right}")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state over the joint basis."""

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen(np.ravel(self.amplitudes))
        if amplitudes.shape != (self.basis.dim,):
            raise ValueError(
                f"expected {self.basis.dim} amplitudes, got {amplitudes.shape[0]}"
            )
        norm_error = abs(np.linalg.norm(amplitudes) - 1.0)
        if norm_error > NORM_TOL:
            raise NormalizationError(f"state is not normalized (|norm - 1| = {norm_error:.3e})")
        object.__setattr__(self, "amplitudes", amplitudes)

    def amplitude(self, m: int, n: int) -> complex:
        return complex(self.amplitudes[self.basis.flat_index(m, n)])

    def probability(self, m: int, n: int) -> float:
        return abs(self.amplitude(m, n)) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``(dim_a, dim_b)`` so that ``[m, n] == c_mn``."""
        return self.amplitudes.reshape(self.basis.dim_a, self.basis.dim_b)


def single_mode_annihilation(dim: int) -> np.ndarray:
    """``dim x dim`` lowering matrix with sqrt(1)..sqrt(dim-1) on the superdiagonal."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(np.complex128)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a))
    b = np.atleast_2d(np.asarray(b))
    if a.size == 0 or b.size == 0:
        raise ValueError("kron operands must be non-empty")
    return np.kron(a, b)


def mode_a_annihilation(basis: FockBasis) -> JointOperator:
    return JointOperator(
        basis, kron(single_mode_annihilation(basis.dim_a), np.eye(basis.dim_b))
    )


def mode_b_annihilation(basis: FockBasis) -> JointOperator:
    return JointOperator(
        basis, kron(np.eye(basis.dim_a), single_mode_annihilation(basis.dim_b))
    )


def dagger(op: JointOperator) -> JointOperator:
    return op.dagger()


def mode_a_creation(basis: FockBasis) -> JointOperator:
    return dagger(mode_a_annihilation(basis))


def mode_b_creation(basis: FockBasis) -> JointOperator:
    return dagger(mode_b_annihilation(basis))


def identity(basis: FockBasis) -> JointOperator:
    return JointOperator(basis, np.eye(basis.dim))


def basis_state(basis: FockBasis, m: int, n: int) -> StateVector:
    amplitudes = np.zeros(basis.dim, dtype=np.complex128)
    amplitudes[basis.flat_index(m, n)] = 1.0
    return StateVector(basis, amplitudes)


def vacuum_state(basis: FockBasis) -> StateVector:
    return basis_state(basis, 0, 0)


class TruncatedCoherent(NamedTuple):
    amplitudes: np.ndarray  # renormalized, unit norm
    raw: np.ndarray  # exp(-|alpha|^2/2) alpha^n / sqrt(n!) as-is
    deficit: float  # 1 - sum |raw|^2


def coherent_state(alpha: complex, dim: int) -> TruncatedCoherent:
    """Single-mode coherent amplitudes on levels 0..dim-1.

    The raw Poisson amplitudes are built by the recursion
    c_n = c_{n-1} * alpha / sqrt(n), which avoids overflowing factorials.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    alpha = complex(alpha)
    raw = np.empty(dim, dtype=np.complex128)
    raw[0] = np.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, dim):
        raw[n] = raw[n - 1] * alpha / np.sqrt(n)
    weight = float(np.sum(np.abs(raw) ** 2))
    return TruncatedCoherent(raw / np.sqrt(weight), raw, 1.0 - weight)


def product_state(
    basis: FockBasis, mode_a: np.ndarray, mode_b: np.ndarray
) -> StateVector:
    """|psi_a> (x) |psi_b> from single-mode amplitude vectors."""
    mode_a = np.asarray(mode_a, dtype=np.complex128)
    mode_b = np.asarray(mode_b, dtype=np.complex128)
    if mode_a.shape != (basis.dim_a,) or mode_b.shape != (basis.dim_b,):
        raise ValueError("single-mode vectors do not match the basis dimensions")
    return StateVector(basis, np.kron(mode_a, mode_b))
