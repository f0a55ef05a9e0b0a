"""Complex linear algebra for one- and two-qubit systems.

Kets are 1-D complex numpy arrays (length 2 or 4), operators are square complex
arrays. Two-qubit amplitudes are ordered |00>, |01>, |10>, |11> with the first
qubit (Alice) most significant, so ``np.kron(a, b)`` is the product ket.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import unitary_group

from .exceptions import (
    DimensionError,
    HermiticityError,
    InvalidInputError,
    NormalizationError,
    UnitarityError,
)

Ket = NDArray[np.complex128]
Operator = NDArray[np.complex128]

TAU_NORM = 1e-10
TAU_HERM = 1e-10
TAU_UNIT = 1e-10
TAU_PSD = 1e-9
TAU_REC = 1e-10
PRODUCT_TOL = 1e-8

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)


def as_ket(vector: ArrayLike, dim: int | None = None, *, tol: float = TAU_NORM) -> Ket:
    """Return ``vector`` as a complex ket after checking its size and norm."""
    ket = np.asarray(vector, dtype=complex)
    if ket.ndim != 1 or ket.shape[0] not in (2, 4) or (dim is not None and ket.shape[0] != dim):
        expected = dim if dim is not None else "2 or 4"
        raise DimensionError(f"expected a ket of length {expected}, got shape {ket.shape}")
    norm_sq = float(np.vdot(ket, ket).real)
    if abs(norm_sq - 1.0) > tol:
        raise NormalizationError(f"ket is not normalized: sum |a_i|^2 = {norm_sq:.12g}")
    return ket


def as_operator(matrix: ArrayLike, dim: int | None = None) -> Operator:
    op = np.asarray(matrix, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or (dim is not None and op.shape[0] != dim):
        expected = f"{dim}x{dim}" if dim is not None else "square"
        raise DimensionError(f"expected a {expected} matrix, got shape {op.shape}")
    return op


def dagger(matrix: ArrayLike) -> Operator:
    return np.conj(np.asarray(matrix, dtype=complex)).T


def projector(ket: ArrayLike) -> Operator:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, np.conj(ket))


def unitarity_error(matrix: ArrayLike) -> float:
    op = np.asarray(matrix, dtype=complex)
    return float(np.max(np.abs(dagger(op) @ op - np.eye(op.shape[0]))))


def check_unitary(matrix: ArrayLike, dim: int | None = None, *, tol: float = TAU_UNIT) -> Operator:
    """Return ``matrix`` as an operator, raising ``UnitarityError`` if U†U != I."""
    op = as_operator(matrix, dim)
    error = unitarity_error(op)
    if error > tol:
        raise UnitarityError(f"matrix is not unitary: max|U†U - I| = {error:.3g} > {tol:g}")
    return op


def check_hermitian(matrix: ArrayLike, *, tol: float = TAU_HERM) -> Operator:
    op = as_operator(matrix)
    error = float(np.max(np.abs(op - dagger(op))))
    if error > tol:
        raise HermiticityError(f"matrix is not Hermitian: max|M - M†| = {error:.3g} > {tol:g}")
    return op


def validate_density_matrix(
    rho: ArrayLike,
    dim: int | None = None,
    *,
    tol_norm: float = TAU_NORM,
    tol_herm: float = TAU_HERM,
    tol_psd: float = TAU_PSD,
) -> Operator:
    """Check Hermiticity, unit trace and positivity of a 2x2 or 4x4 state."""
    op = as_operator(rho, dim)
    if op.shape[0] not in (2, 4):
        raise DimensionError(f"density matrices are 2x2 or 4x4, got {op.shape}")
    check_hermitian(op, tol=tol_herm)
    trace = np.trace(op)
    if abs(trace - 1.0) > tol_norm:
        raise NormalizationError(f"density matrix trace is {trace.real:.12g}, expected 1")
    smallest = float(np.linalg.eigvalsh(op)[0])
    if smallest < -tol_psd:
        raise InvalidInputError(f"density matrix is not positive: eigenvalue {smallest:.3g}")
    return op


def tensor(a: ArrayLike, b: ArrayLike, *, tol: float = TAU_NORM) -> Ket:
    """Product ket a ⊗ b; amplitude 2i + j is a_i * b_j."""
    return np.kron(as_ket(a, 2, tol=tol), as_ket(b, 2, tol=tol))


def partial_trace(rho: ArrayLike, keep: Literal["A", "B"] = "A") -> Operator:
    """Trace out one qubit of a 4x4 operator, keeping subsystem ``keep``.

    Works on any 4x4 operator; positivity is never checked here.
    """
    op = as_operator(rho)
    if op.shape != (4, 4):
        raise DimensionError(f"partial trace needs a 4x4 operator, got {op.shape}")
    blocks = op.reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", blocks)
    if keep == "B":
        return np.einsum("ijil->jl", blocks)
    raise InvalidInputError(f"unknown subsystem label {keep!r}; use 'A' or 'B'")


def canonical_phase(ket: ArrayLike, *, atol: float = 1e-12) -> Ket:
    """Fix the global phase so the first non-negligible amplitude is real positive."""
    ket = np.asarray(ket, dtype=complex)
    for amplitude in ket:
        if abs(amplitude) > atol:
            return ket * (np.conj(amplitude) / abs(amplitude))
    return ket.copy()


def equal_up_to_phase(a: ArrayLike, b: ArrayLike, *, tol: float = 1e-10) -> bool:
    """True when the normalized kets a and b describe the same ray."""
    return 1.0 - abs(np.vdot(a, b)) <= tol


def orthogonal_complement(ket: ArrayLike) -> Ket:
    """The single-qubit ket orthogonal to ``ket``, in canonical phase."""
    a, b = np.asarray(ket, dtype=complex)
    return canonical_phase(np.array([-np.conj(b), np.conj(a)]))


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """psi = Σ_k coefficients[k] · left[:, k] ⊗ right[:, k]."""

    coefficients: NDArray[np.float64]
    left: Operator
    right: Operator

    @property
    def second(self) -> float:
        return float(self.coefficients[1])

    def reassemble(self) -> Ket:
        return sum(
            self.coefficients[k] * np.kron(self.left[:, k], self.right[:, k]) for k in range(2)
        )


def schmidt_decompose(psi: ArrayLike, *, tol: float = TAU_NORM) -> SchmidtForm:
    """Schmidt form of a two-qubit ket via the SVD of its 2x2 amplitude matrix."""
    ket = as_ket(psi, 4, tol=tol)
    u, s, vh = np.linalg.svd(ket.reshape(2, 2))
    return SchmidtForm(coefficients=s, left=u, right=vh.T)


@dataclass(frozen=True, eq=False)
class ProductCheck:
    is_product: bool
    schmidt2: float
    factors: tuple[Ket, Ket] | None

    def __bool__(self) -> bool:
        return self.is_product


def is_product(psi: ArrayLike, tol: float = PRODUCT_TOL) -> ProductCheck:
    """Schmidt-rank test; when product, also return canonical-phase factor kets."""
    form = schmidt_decompose(psi)
    if form.second >= tol:
        return ProductCheck(False, form.second, None)
    a = canonical_phase(form.left[:, 0])
    b = canonical_phase(form.right[:, 0])
    return ProductCheck(True, form.second, (a, b))


def trace_norm(matrix: ArrayLike, *, tol: float = TAU_HERM) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    op = check_hermitian(matrix, tol=tol)
    return float(np.sum(np.abs(np.linalg.eigvalsh(op))))


def haar_random_unitary(dim: int, seed: int | np.random.Generator | None = None) -> Operator:
    """Haar-distributed unitary (QR of a complex Ginibre matrix, phase-corrected)."""
    if dim not in (2, 4):
        raise DimensionError(f"only 1- and 2-qubit unitaries are supported, got dim={dim}")
    return np.asarray(unitary_group.rvs(dim, random_state=seed), dtype=complex)


def haar_random_ket(dim: int, seed: int | np.random.Generator | None = None) -> Ket:
    return haar_random_unitary(dim, seed)[:, 0]
