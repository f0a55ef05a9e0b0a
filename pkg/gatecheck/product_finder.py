"""Find a product input that a two-qubit gate maps to a product output.

Write the input in the Bell basis as Σ α_j Φ_j. It is a product state iff
α_1² − α_2² + α_3² − α_4² = 0, and after the entangling core U_d(λ) the output is
a product state iff Σ ± e^{2iλ_j} α_j² = 0. Restricting the squares v_j = α_j² to
reals turns both into three linear conditions t·v = u_re·v = u_im·v = 0 on v ∈ R⁴,
which always have a nonzero solution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import ConstructionError, ProductStateError
from .kak import MAGIC_BASIS, kak_decompose
from .qmath import (
    TAU_NORM,
    Ket,
    as_ket,
    check_unitary,
    dagger,
    is_product,
    schmidt_decompose,
)

logger = logging.getLogger(__name__)

TAU_NULL = 1e-10
TAU_PROD = 1e-8

T_VECTOR = np.array([1.0, -1.0, 1.0, -1.0])
_SIGNS = T_VECTOR
_GRID_STEP = np.deg2rad(1.0)


@dataclass(frozen=True, eq=False)
class InvarianceVectors:
    t: NDArray[np.float64]
    u_re: NDArray[np.float64]
    u_im: NDArray[np.float64]

    def stacked(self) -> NDArray[np.float64]:
        return np.vstack([self.t, self.u_re, self.u_im])


@dataclass(frozen=True, eq=False)
class ProductKet:
    alice: Ket
    bob: Ket

    @property
    def state(self) -> Ket:
        return np.kron(self.alice, self.bob)


@dataclass(frozen=True, eq=False)
class ProductPair:
    """A product input whose image under the gate is again a product state."""

    input: ProductKet
    output: ProductKet
    residual: float
    lambdas: NDArray[np.float64] | None = None
    null_vector: NDArray[np.float64] | None = None


@dataclass(frozen=True)
class PreservationReport:
    input_schmidt2: float
    output_schmidt2: float
    passed: bool


def invariance_vectors(lambdas: ArrayLike) -> InvarianceVectors:
    two_lambda = 2 * np.asarray(lambdas, dtype=float)
    return InvarianceVectors(
        t=T_VECTOR.copy(),
        u_re=_SIGNS * np.cos(two_lambda),
        u_im=_SIGNS * np.sin(two_lambda),
    )


def _canonical_sign(v: NDArray[np.float64]) -> NDArray[np.float64]:
    for component in v:
        if abs(component) > 1e-12:
            return v if component > 0 else -v
    return v


def _sphere_directions(dim: int) -> NDArray[np.float64]:
    """Unit directions on the half-sphere of R^dim at one-degree resolution."""
    if dim == 2:
        theta = np.arange(0.0, np.pi, _GRID_STEP)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    theta = np.arange(0.0, np.pi + _GRID_STEP / 2, _GRID_STEP)
    phi = np.arange(0.0, 2 * np.pi, _GRID_STEP)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    return np.column_stack(
        [np.cos(tt).ravel(), (np.sin(tt) * np.cos(pp)).ravel(), (np.sin(tt) * np.sin(pp)).ravel()]
    )


def _select_from_null_space(basis: NDArray[np.float64]) -> NDArray[np.float64]:
    """Pick the null vector whose sorted |components| are lexicographically largest."""
    candidates = _sphere_directions(basis.shape[0]) @ basis
    candidates /= np.sum(np.abs(candidates), axis=1, keepdims=True)
    ranked = np.round(np.sort(np.abs(candidates), axis=1), 12)
    # lexsort treats the last key as primary: smallest magnitude first.
    best = np.lexsort(ranked.T[::-1])[-1]
    return candidates[best]


def null_space_vector(vectors: InvarianceVectors, *, tol: float = TAU_NULL) -> NDArray[np.float64]:
    """A real v ⟂ {t, u_re, u_im}, scaled so Σ|v_j| = 1, chosen deterministically."""
    _, singular, vh = np.linalg.svd(vectors.stacked(), full_matrices=True)
    padded = np.concatenate([singular, np.zeros(4 - singular.size)])
    basis = vh[padded < tol]
    logger.debug("null space of the invariance vectors has dimension %d", basis.shape[0])
    if basis.shape[0] == 0:
        raise ConstructionError("invariance vectors span R^4; no null vector exists")

    if basis.shape[0] == 1:
        v = basis[0] / np.sum(np.abs(basis[0]))
    else:
        v = _select_from_null_space(basis)
    return _canonical_sign(v)


def amplitudes_from_squares(v: ArrayLike, *, tol: float = TAU_NORM) -> NDArray[np.complex128]:
    """α_j = √v_j for v_j ≥ 0 and i√|v_j| otherwise, so that α_j² = v_j."""
    v = np.asarray(v, dtype=float)
    total = float(np.sum(np.abs(v)))
    if abs(total - 1.0) > tol:
        raise ConstructionError(f"Σ|v_j| = {total:.12g}, expected 1")
    return np.where(v >= 0, np.sqrt(np.abs(v)) + 0j, 1j * np.sqrt(np.abs(v)))


def product_condition(alpha: ArrayLike, lambdas: ArrayLike | None = None) -> complex:
    """Σ ± (e^{iλ_j} α_j)²; zero exactly when Σ α_j Φ_j (after U_d) is a product state."""
    alpha = np.asarray(alpha, dtype=complex)
    phases = np.ones(4) if lambdas is None else np.exp(2j * np.asarray(lambdas, dtype=float))
    return complex(np.sum(_SIGNS * phases * alpha**2))


def find_product_preserving_state(unitary: ArrayLike, *, tol: float = TAU_PROD) -> ProductPair:
    """Product |ψ> with U|ψ> also product, built through the KAK decomposition of U."""
    u = check_unitary(unitary, 4)
    kak = kak_decompose(u)
    v = null_space_vector(invariance_vectors(kak.lambdas))
    alpha = amplitudes_from_squares(v)

    core_input = MAGIC_BASIS @ alpha
    psi = dagger(np.kron(kak.v_a, kak.v_b)) @ core_input
    psi = psi / np.linalg.norm(psi)

    input_check = is_product(psi, tol)
    output_check = is_product(u @ psi, tol)
    residuals = (input_check.schmidt2, output_check.schmidt2)
    if not (input_check and output_check):
        raise ProductStateError(
            "product-state certificate failed",
            lambdas=kak.lambdas,
            null_vector=v,
            residuals=residuals,
        )
    return ProductPair(
        input=ProductKet(*input_check.factors),
        output=ProductKet(*output_check.factors),
        residual=max(residuals),
        lambdas=kak.lambdas,
        null_vector=v,
    )


def verify_product_preservation(
    unitary: ArrayLike, psi: ArrayLike, tol: float = TAU_PROD
) -> PreservationReport:
    u = check_unitary(unitary, 4)
    ket = as_ket(psi, 4)
    before = schmidt_decompose(ket).second
    after = schmidt_decompose(u @ ket).second
    return PreservationReport(
        input_schmidt2=before,
        output_schmidt2=after,
        passed=before < tol and after < tol,
    )
