"""Depolarized and mixed-unitary two-qubit channels in convex-mixture form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import ProbabilityError
from .qmath import TAU_NORM, Operator, check_unitary, dagger, validate_density_matrix

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=complex,
)
PHASE_GATE = np.diag([1, 1j])
MAXIMALLY_MIXED = np.eye(4, dtype=complex) / 4


def _check_probability(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0 or not np.isfinite(value):
        raise ProbabilityError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True, eq=False)
class Depolarized:
    """ρ -> (1 - p) UρU† + p I/4."""

    unitary: Operator
    p: float

    def __post_init__(self):
        object.__setattr__(self, "unitary", check_unitary(self.unitary, 4))
        object.__setattr__(self, "p", _check_probability(self.p, "noise fraction p"))


@dataclass(frozen=True, eq=False)
class MixedUnitary:
    """ρ -> Σ_i p_i U_i ρ U_i†."""

    branches: tuple[tuple[Operator, float], ...]

    def __post_init__(self):
        if not self.branches:
            raise ProbabilityError("a mixed-unitary channel needs at least one branch")
        checked = tuple(
            (check_unitary(u, 4), _check_probability(weight, "branch probability"))
            for u, weight in self.branches
        )
        total = sum(weight for _, weight in checked)
        if abs(total - 1.0) > TAU_NORM:
            raise ProbabilityError(f"branch probabilities sum to {total:.12g}, expected 1")
        object.__setattr__(self, "branches", checked)

    @property
    def probabilities(self) -> NDArray[np.float64]:
        return np.array([weight for _, weight in self.branches])


ChannelSpec = Depolarized | MixedUnitary


@dataclass(frozen=True, eq=False)
class SampledBranch:
    """One realization of a channel: a unitary, or full depolarization when ``unitary`` is None."""

    unitary: Operator | None

    @property
    def depolarize(self) -> bool:
        return self.unitary is None


def mixed_unitary(branches: Sequence[tuple[ArrayLike, float]]) -> MixedUnitary:
    """Build a mixed-unitary channel, dropping branches of zero weight."""
    kept = tuple((np.asarray(u, dtype=complex), float(w)) for u, w in branches if float(w) != 0.0)
    return MixedUnitary(kept)


def apply_channel(channel: ChannelSpec, rho: ArrayLike) -> Operator:
    """Channel output for a valid 4x4 density matrix; the result is exactly Hermitian."""
    state = validate_density_matrix(rho, 4)
    if isinstance(channel, Depolarized):
        u = channel.unitary
        out = (1 - channel.p) * (u @ state @ dagger(u)) + channel.p * MAXIMALLY_MIXED
    else:
        out = sum(weight * (u @ state @ dagger(u)) for u, weight in channel.branches)
    return (out + dagger(out)) / 2


def branch_table(channel: ChannelSpec) -> tuple[list[Operator], NDArray[np.float64]]:
    """Unitary branches and their weights; a trailing extra weight is full depolarization."""
    if isinstance(channel, Depolarized):
        return [channel.unitary], np.array([1 - channel.p, channel.p])
    unitaries = [u for u, _ in channel.branches]
    return unitaries, np.append(channel.probabilities, 0.0)


def sample_channel_branch(channel: ChannelSpec, rng: np.random.Generator) -> SampledBranch:
    unitaries, weights = branch_table(channel)
    index = int(rng.choice(len(weights), p=weights / weights.sum()))
    if index == len(unitaries):
        return SampledBranch(None)
    return SampledBranch(unitaries[index])


def sample_branch_counts(
    channel: ChannelSpec, rng: np.random.Generator, shots: int
) -> NDArray[np.int64]:
    """How many of ``shots`` uses realize each branch (last entry: depolarized)."""
    _, weights = branch_table(channel)
    return rng.multinomial(shots, weights / weights.sum())


def counterexample_channel(p: float) -> MixedUnitary:
    """(1 - p) CNOT ρ CNOT† + p U' ρ U'† with U' = CNOT (S ⊗ S), S = diag(1, i)."""
    p = _check_probability(p, "p")
    primed = CNOT @ np.kron(PHASE_GATE, PHASE_GATE)
    return mixed_unitary([(CNOT, 1 - p), (primed, p)])
