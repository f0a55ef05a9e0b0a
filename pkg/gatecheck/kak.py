"""Canonical (KAK) decomposition of two-qubit gates.

Every two-qubit unitary factors as

    U = e^{i g} (uA ⊗ uB) · U_d(λ) · (vA ⊗ vB),   U_d(λ) = Σ_j e^{iλ_j} |Φ_j><Φ_j|

with Φ_1..Φ_4 the Bell states (|00>+|11>)/√2, (|00>-|11>)/√2, (|01>-|10>)/√2,
(|01>+|10>)/√2. The decomposition is computed in a phased copy of that basis
in which SU(2)⊗SU(2) acts as SO(4), so both local layers become real
orthogonal matrices.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import DecompositionError
from .qmath import TAU_UNIT, Operator, check_unitary, dagger

logger = logging.getLogger(__name__)

TAU_KAK = 1e-9

_S2 = np.sqrt(0.5)
MAGIC_BASIS = np.array(
    [
        [_S2, _S2, 0, 0],
        [0, 0, _S2, _S2],
        [0, 0, -_S2, _S2],
        [_S2, -_S2, 0, 0],
    ],
    dtype=complex,
)
# Same rays as MAGIC_BASIS; the extra phases make local gates real in this frame.
_REAL_FRAME = MAGIC_BASIS @ np.diag([1, 1j, 1, 1j])
_REAL_FRAME_H = dagger(_REAL_FRAME)

# Fixed mixing angles for diagonalizing the complex-symmetric M^T M; the first
# almost always succeeds, the rest only matter for accidental coincidences.
_MIXING_ANGLES = (0.0, 0.6180339887, 1.2360679775, 2.2360679775, 2.8541019662)
_CLUSTER_TOL = 1e-9
_DIAGONAL_TOL = 1e-11


def magic_basis() -> Operator:
    """The Bell states Φ_1..Φ_4 as the columns of a 4x4 unitary."""
    return MAGIC_BASIS.copy()


def to_magic_basis(matrix: ArrayLike) -> Operator:
    m = np.asarray(matrix, dtype=complex)
    return dagger(MAGIC_BASIS) @ m @ MAGIC_BASIS


def from_magic_basis(matrix: ArrayLike) -> Operator:
    m = np.asarray(matrix, dtype=complex)
    return MAGIC_BASIS @ m @ dagger(MAGIC_BASIS)


def entangling_core(lambdas: ArrayLike) -> Operator:
    """U_d(λ) = Σ_j e^{iλ_j} |Φ_j><Φ_j|."""
    phases = np.exp(1j * np.asarray(lambdas, dtype=float))
    return from_magic_basis(np.diag(phases))


@dataclass(frozen=True, eq=False)
class KakDecomposition:
    u_a: Operator
    u_b: Operator
    v_a: Operator
    v_b: Operator
    lambdas: NDArray[np.float64]
    global_phase: float

    @property
    def core(self) -> Operator:
        return entangling_core(self.lambdas)

    def reconstruct(self) -> Operator:
        return kak_reconstruct(self)

    def reconstruction_error(self, unitary: ArrayLike) -> float:
        """Max-norm distance to ``unitary`` after aligning the global phase."""
        target = np.asarray(unitary, dtype=complex)
        rebuilt = self.reconstruct()
        overlap = np.vdot(rebuilt, target)
        phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        return float(np.max(np.abs(rebuilt * phase - target)))


def kron_factor(matrix: ArrayLike) -> tuple[complex, Operator, Operator]:
    """Split K = g · (A ⊗ B) into a scalar and two unit-determinant 2x2 factors."""
    k = np.asarray(matrix, dtype=complex)
    a, b = max(((i, j) for i in range(4) for j in range(4)), key=lambda t: abs(k[t]))

    f1 = np.zeros((2, 2), dtype=complex)
    f2 = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            f1[(a >> 1) ^ i, (b >> 1) ^ j] = k[a ^ (i << 1), b ^ (j << 1)]
            f2[(a & 1) ^ i, (b & 1) ^ j] = k[a ^ i, b ^ j]

    det1 = np.linalg.det(f1)
    det2 = np.linalg.det(f2)
    if abs(det1) < 1e-12 or abs(det2) < 1e-12:
        raise DecompositionError("matrix is not a tensor product of two 2x2 unitaries")
    f1 /= np.sqrt(det1)
    f2 /= np.sqrt(det2)

    g = k[a, b] / (f1[a >> 1, b >> 1] * f2[a & 1, b & 1])
    residual = float(np.max(np.abs(g * np.kron(f1, f2) - k)))
    if residual > 1e-8:
        raise DecompositionError(f"local factorization residual {residual:.3g} too large")
    return complex(g), f1, f2


def _real_orthogonal_eigenbasis(m2: Operator) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """Diagonalize the symmetric unitary m2 as P diag(D) P^T with P real orthogonal.

    Re(m2) and Im(m2) are commuting real-symmetric matrices. A fixed mix of the two
    is diagonalized first; each remaining eigenvalue cluster is resolved by the
    orthogonal mix restricted to that cluster.
    """
    real, imag = m2.real, m2.imag
    for angle in _MIXING_ANGLES:
        c, s = np.cos(angle), np.sin(angle)
        values, vectors = np.linalg.eigh(c * real + s * imag)
        companion = -s * real + c * imag

        basis = vectors.copy()
        start = 0
        while start < 4:
            stop = start + 1
            while stop < 4 and abs(values[stop] - values[start]) < _CLUSTER_TOL:
                stop += 1
            if stop - start > 1:
                block = basis[:, start:stop]
                _, rotation = np.linalg.eigh(block.T @ companion @ block)
                basis[:, start:stop] = block @ rotation
            start = stop

        diagonal = np.diag(basis.T @ m2 @ basis)
        error = float(np.max(np.abs(basis @ np.diag(diagonal) @ basis.T - m2)))
        if error < _DIAGONAL_TOL:
            return basis, diagonal
        logger.debug("eigenbasis at mixing angle %.3f missed by %.3g; retrying", angle, error)
    raise DecompositionError("could not find a real orthogonal eigenbasis of M^T M")


def _fold_pauli_shifts(d: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Move π shifts on pairs of phases out of the core.

    diag(±1) with an even number of -1 entries is a Pauli⊗Pauli up to sign, so it
    belongs to the local layers. Each phase is brought within π/2 of the first one;
    with an odd number of shifts the last shifted phase keeps its π.
    Returns the reduced phases and the signs that were removed.
    """
    shifts = np.rint((d - d[0]) / np.pi).astype(int)
    odd = np.flatnonzero(shifts % 2)
    if len(odd) % 2:
        shifts[odd[-1]] -= 1
    signs = np.where(shifts % 2, -1.0, 1.0)
    return d - np.pi * shifts, signs


def _canonical_order(d: NDArray[np.float64]) -> tuple[NDArray[np.float64], float, NDArray[np.int64]]:
    """Center the phases, wrap them into (-π, π] and sort descending (stable)."""
    mean = float(np.mean(d))
    centered = d - mean
    wrapped = np.pi - np.mod(np.pi - centered, 2 * np.pi)
    order = np.argsort(-wrapped, kind="stable")
    return wrapped[order], mean, order


def kak_decompose(unitary: ArrayLike, *, tol: float = TAU_UNIT) -> KakDecomposition:
    """Factor a two-qubit unitary into local layers around a magic-diagonal core."""
    u = check_unitary(unitary, 4, tol=tol)

    det = np.linalg.det(u)
    global_phase = cmath.phase(det) / 4
    u_special = u * np.exp(-1j * global_phase)

    up = _REAL_FRAME_H @ u_special @ _REAL_FRAME
    m2 = up.T @ up
    p, d2 = _real_orthogonal_eigenbasis(m2)
    if np.linalg.det(p) < 0:
        p[:, -1] = -p[:, -1]

    d = np.angle(d2) / 2
    o1 = up @ p @ np.diag(np.exp(-1j * d))
    if np.real(np.linalg.det(o1)) < 0:
        d[0] += np.pi
        o1[:, 0] = -o1[:, 0]

    # up = o1 · diag(e^{id}) · p^T; the removed signs go into the right layer.
    d, signs = _fold_pauli_shifts(d)
    p = p * signs

    lambdas, mean, order = _canonical_order(d)
    global_phase += mean
    permutation = np.eye(4)[:, order]
    if np.linalg.det(permutation) < 0:
        permutation[:, -1] = -permutation[:, -1]
    o1 = o1 @ permutation
    o2 = permutation.T @ p.T

    imaginary = float(np.max(np.abs(o1.imag)))
    if imaginary > 1e-6:
        raise DecompositionError(f"left local layer is not real in the magic frame ({imaginary:.3g})")

    k1 = _REAL_FRAME @ o1.real @ _REAL_FRAME_H
    k2 = _REAL_FRAME @ o2 @ _REAL_FRAME_H
    g1, u_a, u_b = kron_factor(k1)
    g2, v_a, v_b = kron_factor(k2)
    global_phase += cmath.phase(g1) + cmath.phase(g2)

    result = KakDecomposition(
        u_a=u_a,
        u_b=u_b,
        v_a=v_a,
        v_b=v_b,
        lambdas=lambdas,
        global_phase=float(np.angle(np.exp(1j * global_phase))),
    )
    error = result.reconstruction_error(u)
    if error > TAU_KAK:
        raise DecompositionError(f"KAK reconstruction error {error:.3g} exceeds {TAU_KAK:g}")
    return result


def kak_reconstruct(decomposition: KakDecomposition, *, tol: float = TAU_UNIT) -> Operator:
    """e^{ig} (uA ⊗ uB) U_d(λ) (vA ⊗ vB)."""
    factors = [
        check_unitary(m, 2, tol=tol)
        for m in (decomposition.u_a, decomposition.u_b, decomposition.v_a, decomposition.v_b)
    ]
    u_a, u_b, v_a, v_b = factors
    return (
        np.exp(1j * decomposition.global_phase)
        * np.kron(u_a, u_b)
        @ entangling_core(decomposition.lambdas)
        @ np.kron(v_a, v_b)
    )
