"""Optimal discrimination between a gate U and a noisy counterpart.

The box applies U with prior 1 - q and the noisy channel with prior q. For the
depolarized counterpart the best global strategy succeeds with probability

    ½ (1 + ¾pq + |1 - 2q + ¾pq|)

and the same value is reached by preparing a product state that U keeps product
and measuring each qubit locally.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .channels import ChannelSpec, Depolarized, MixedUnitary, apply_channel
from .exceptions import InvalidInputError, NotProductError, ProbabilityError, ProductStateError
from .product_finder import TAU_PROD, find_product_preserving_state
from .qmath import (
    Ket,
    Operator,
    as_ket,
    check_unitary,
    dagger,
    equal_up_to_phase,
    is_product,
    orthogonal_complement,
    projector,
    validate_density_matrix,
)


class Strategy(StrEnum):
    MEASURE = "measure"
    ALWAYS_NOISY = "always-noisy"


def _check_prior(q: float) -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ProbabilityError(f"prior q must lie in [0, 1], got {q!r}")
    return q


@dataclass(frozen=True, eq=False)
class DiscriminationTask:
    gate: Operator
    channel: ChannelSpec
    prior_noisy: float

    def __post_init__(self):
        object.__setattr__(self, "gate", check_unitary(self.gate, 4))
        object.__setattr__(self, "prior_noisy", _check_prior(self.prior_noisy))

    @classmethod
    def for_gate(cls, gate: ArrayLike, p: float, q: float) -> "DiscriminationTask":
        """U against its depolarized counterpart with noise fraction p."""
        return cls(np.asarray(gate, dtype=complex), Depolarized(gate, p), q)

    @property
    def is_depolarized_counterpart(self) -> bool:
        return isinstance(self.channel, Depolarized) and np.allclose(
            self.channel.unitary, self.gate, atol=1e-12
        )


@dataclass(frozen=True, eq=False)
class PovmPair:
    """pi1 concludes "unitary", pi2 concludes "noisy"."""

    pi1: Operator
    pi2: Operator

    def normalized(self) -> tuple[Operator, Operator]:
        """Trace-normalized elements; for the rank-1/rank-3 pair, (Π₁, Π₂/3)."""
        return self.pi1 / np.trace(self.pi1).real, self.pi2 / np.trace(self.pi2).real

    def is_valid(self, tol: float = 1e-9) -> bool:
        dim = self.pi1.shape[0]
        complete = np.allclose(self.pi1 + self.pi2, np.eye(dim), atol=tol)
        positive = all(np.linalg.eigvalsh(m)[0] >= -tol for m in (self.pi1, self.pi2))
        return complete and positive


@dataclass(frozen=True, eq=False)
class HelstromResult:
    p_guess: float
    povm: PovmPair


def helstrom(rho0: ArrayLike, rho1: ArrayLike, q: float) -> HelstromResult:
    """Minimum-error discrimination of rho0 (prior 1 - q) against rho1 (prior q)."""
    q = _check_prior(q)
    first = validate_density_matrix(rho0)
    second = validate_density_matrix(rho1, first.shape[0])

    gamma = (1 - q) * first - q * second
    gamma = (gamma + dagger(gamma)) / 2
    values, vectors = np.linalg.eigh(gamma)
    keep = vectors[:, values >= 0]
    pi1 = keep @ dagger(keep)
    pi2 = np.eye(first.shape[0]) - pi1
    return HelstromResult(
        p_guess=float(0.5 * (1 + np.sum(np.abs(values)))),
        povm=PovmPair(pi1, pi2),
    )


def lambda_condition(p: float, q: float) -> float:
    """1 - 2q + ¾pq; its sign separates the measuring regime from always guessing noisy."""
    return 1 - 2 * q + 0.75 * p * q


def closed_form_guess(p: float, q: float) -> float:
    p = float(p)
    q = _check_prior(q)
    if not 0.0 <= p <= 1.0:
        raise ProbabilityError(f"noise fraction p must lie in [0, 1], got {p!r}")
    # ½(1 + ¾pq + |1 - 2q + ¾pq|), split on the sign of the absolute value
    if lambda_condition(p, q) < 0:
        return q
    return 1 - q + 0.75 * p * q


def preferred_strategy(p: float, q: float) -> Strategy:
    return Strategy.ALWAYS_NOISY if lambda_condition(p, q) < 0 else Strategy.MEASURE


def optimal_povm(unitary: ArrayLike, psi: ArrayLike) -> PovmPair:
    """Π₁ = U|ψ><ψ|U†, Π₂ = I - Π₁."""
    u = check_unitary(unitary, 4)
    pi1 = projector(u @ as_ket(psi, 4))
    return PovmPair(pi1, np.eye(4) - pi1)


def locc_discriminable(unitary: ArrayLike, psi: ArrayLike, tol: float = TAU_PROD) -> bool:
    """For a product input, the optimal POVM is locally implementable iff U|ψ> is product."""
    u = check_unitary(unitary, 4)
    ket = as_ket(psi, 4)
    if not is_product(ket, tol):
        raise NotProductError("input state must be a product state")
    return is_product(u @ ket, tol).is_product


@dataclass(frozen=True, eq=False)
class LoccProtocol:
    """Prepare input_a ⊗ input_b, measure each qubit in its local basis (columns).

    The outcome pair ``accept`` concludes "unitary"; every other pair concludes "noisy".
    """

    input_a: Ket
    input_b: Ket
    basis_a: Operator
    basis_b: Operator
    accept: tuple[int, int]

    @property
    def input_state(self) -> Ket:
        return np.kron(self.input_a, self.input_b)

    @property
    def accept_index(self) -> int:
        return 2 * self.accept[0] + self.accept[1]

    def outcome_probabilities(self, unitary: ArrayLike) -> NDArray[np.float64]:
        """Born probabilities of the four outcome pairs (index 2i + j) after ``unitary``."""
        amplitudes = dagger(np.kron(self.basis_a, self.basis_b)) @ (
            np.asarray(unitary, dtype=complex) @ self.input_state
        )
        probabilities = np.clip(np.abs(amplitudes) ** 2, 0.0, None)
        return probabilities / probabilities.sum()

    def accept_probability(self, unitary: ArrayLike) -> float:
        return float(self.outcome_probabilities(unitary)[self.accept_index])


def _local_basis(c: Ket) -> tuple[Operator, int]:
    """{c, c⊥} ordered so the vector closer to |0> comes first; returns basis and c's index."""
    c_perp = orthogonal_complement(c)
    if abs(c[0]) >= abs(c_perp[0]) - 1e-12:
        return np.column_stack([c, c_perp]), 0
    return np.column_stack([c_perp, c]), 1


def build_locc_protocol(
    unitary: ArrayLike, input_state: ArrayLike | None = None, *, tol: float = TAU_PROD
) -> LoccProtocol:
    """Local protocol from a product-preserving input (constructed when not given)."""
    u = check_unitary(unitary, 4)
    if input_state is None:
        pair = find_product_preserving_state(u, tol=tol)
        a, b = pair.input.alice, pair.input.bob
        c, d = pair.output.alice, pair.output.bob
    else:
        check = is_product(as_ket(input_state, 4), tol)
        if not check:
            raise NotProductError(
                f"protocol input must be a product state (second Schmidt coefficient {check.schmidt2:.3g})"
            )
        a, b = check.factors
        image = is_product(u @ np.kron(a, b), tol)
        if not image:
            raise ProductStateError(
                "the gate entangles this input; the optimal measurement is not local",
                residuals=(check.schmidt2, image.schmidt2),
            )
        c, d = image.factors

    basis_a, accept_a = _local_basis(c)
    basis_b, accept_b = _local_basis(d)
    return LoccProtocol(
        input_a=a, input_b=b, basis_a=basis_a, basis_b=basis_b, accept=(accept_a, accept_b)
    )


def protocol_guess(task: DiscriminationTask, protocol: LoccProtocol, strategy: Strategy) -> float:
    """Exact success probability of running ``protocol`` (or always guessing noisy) on ``task``."""
    q = task.prior_noisy
    if strategy is Strategy.ALWAYS_NOISY:
        return q
    accept_unitary = protocol.accept_probability(task.gate)
    noisy_output = apply_channel(task.channel, projector(protocol.input_state))
    measurement = np.kron(protocol.basis_a, protocol.basis_b)[:, protocol.accept_index]
    accept_noisy = float(np.real(np.conj(measurement) @ noisy_output @ measurement))
    return (1 - q) * accept_unitary + q * (1 - accept_noisy)


def estimate_noise(f1: float) -> float:
    """Noise fraction from the non-accept frequency: p = 4/3 · f1, clamped to [0, 1]."""
    f1 = float(f1)
    if not 0.0 <= f1 <= 1.0:
        raise ProbabilityError(f"frequency f1 must lie in [0, 1], got {f1!r}")
    return min(1.0, 4.0 * f1 / 3.0)


def two_pure_state_trace_norm(a: float, b: float, overlap: float) -> float:
    """‖a|x><x| - b|y><y|‖₁ for unit kets with |<x|y>|² = overlap."""
    overlap = min(max(float(overlap), 0.0), 1.0)
    discriminant = max((a - b) ** 2 + 4 * a * b * (1 - overlap), 0.0)
    root = np.sqrt(discriminant)
    return float(abs((a - b + root) / 2) + abs((a - b - root) / 2))


def input_guess(gate: ArrayLike, channel: ChannelSpec, psi: ArrayLike, q: float) -> float:
    """Helstrom value of a fixed pure input."""
    ket = as_ket(psi, 4, tol=1e-8)
    rho = projector(ket)
    u = np.asarray(gate, dtype=complex)
    return helstrom(u @ rho @ dagger(u), apply_channel(channel, rho), q).p_guess


def pure_branch_guess(gate: ArrayLike, channel: MixedUnitary, psi: ArrayLike, q: float) -> float:
    """Exact guessing probability when the channel differs from the gate in one branch.

    Branches acting like the gate on ``psi`` fold into the gate's weight, leaving
    a difference of two weighted pure states.
    """
    q = _check_prior(q)
    if not isinstance(channel, MixedUnitary):
        raise InvalidInputError("the two-pure-state formula needs a mixed-unitary channel")
    ket = as_ket(psi, 4, tol=1e-8)
    x = np.asarray(gate, dtype=complex) @ ket
    a = 1 - q
    others = []
    for u, weight in channel.branches:
        y = u @ ket
        if equal_up_to_phase(x, y, tol=1e-12):
            a -= q * weight
        else:
            others.append((q * weight, y))
    if not others:
        return 0.5 * (1 + abs(a))
    if len(others) > 1:
        raise InvalidInputError("more than one branch differs from the gate on this input")
    b, y = others[0]
    overlap = abs(np.vdot(x, y)) ** 2
    return 0.5 * (1 + two_pure_state_trace_norm(a, b, overlap))
