"""Shot-level simulation of the local discrimination protocol.

Shots are drawn in fixed-size blocks. Block k owns the counter-based stream
Philox(SeedSequence(seed, spawn_key=(k,))), so merged counts depend only on
the seed and the shot count, never on how many workers share the blocks.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.stats import binomtest

from .channels import Depolarized, branch_table, sample_branch_counts
from .discrimination import (
    DiscriminationTask,
    LoccProtocol,
    Strategy,
    build_locc_protocol,
    closed_form_guess,
    estimate_noise,
    preferred_strategy,
    protocol_guess,
)
from .exceptions import InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SHOTS = 100_000
UNIFORM_OUTCOMES = np.full(4, 0.25)
TRUTH_LABELS = ("unitary", "noisy")


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    """95% Wilson score interval; (0, 1) when there are no trials."""
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(int(successes), int(trials)).proportion_ci(confidence_level=0.95, method="wilson")
    return max(0.0, float(ci.low)), min(1.0, float(ci.high))


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """Outcome counts indexed [truth, 2 * outcome_a + outcome_b]; truth 0 is the unitary."""

    counts: NDArray[np.int64]
    shots: int
    seed: int
    strategy: Strategy
    accept: tuple[int, int]
    empirical_guess: float
    guess_ci95: tuple[float, float]
    f1: float
    p_hat: float
    p_hat_raw: float
    ci95: tuple[float, float]

    def outcome_table(self) -> list[dict[str, object]]:
        rows = []
        for truth, label in enumerate(TRUTH_LABELS):
            for outcome in range(4):
                rows.append(
                    {
                        "truth": label,
                        "outcome_a": outcome // 2,
                        "outcome_b": outcome % 2,
                        "count": int(self.counts[truth, outcome]),
                    }
                )
        return rows

    def as_dict(self) -> dict[str, object]:
        return {
            "shots": self.shots,
            "seed": self.seed,
            "strategy": str(self.strategy),
            "accept": list(self.accept),
            "counts": {label: self.counts[i].tolist() for i, label in enumerate(TRUTH_LABELS)},
            "empirical_guess": self.empirical_guess,
            "guess_ci95": list(self.guess_ci95),
            "f1": self.f1,
            "p_hat": self.p_hat,
            "p_hat_raw": self.p_hat_raw,
            "ci95": list(self.ci95),
        }


@dataclass(frozen=True, eq=False)
class _BlockPlan:
    gate_probabilities: NDArray[np.float64]
    branch_probabilities: list[NDArray[np.float64]] = field(default_factory=list)


def _plan(task: DiscriminationTask, protocol: LoccProtocol) -> _BlockPlan:
    unitaries, _ = branch_table(task.channel)
    return _BlockPlan(
        gate_probabilities=protocol.outcome_probabilities(task.gate),
        branch_probabilities=[protocol.outcome_probabilities(u) for u in unitaries]
        + [UNIFORM_OUTCOMES],
    )


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _simulate_block(
    task: DiscriminationTask, plan: _BlockPlan, seed: int, block: int, shots: int
) -> NDArray[np.int64]:
    rng = _block_rng(seed, block)
    counts = np.zeros((2, 4), dtype=np.int64)
    noisy = int(rng.binomial(shots, task.prior_noisy))
    counts[0] = rng.multinomial(shots - noisy, plan.gate_probabilities)
    for branch_shots, probabilities in zip(
        sample_branch_counts(task.channel, rng, noisy), plan.branch_probabilities
    ):
        if branch_shots:
            counts[1] += rng.multinomial(branch_shots, probabilities)
    return counts


def simulate(
    task: DiscriminationTask,
    protocol: LoccProtocol,
    shots: int,
    seed: int,
    *,
    strategy: Strategy = Strategy.MEASURE,
    shards: int = 1,
    block_shots: int = DEFAULT_BLOCK_SHOTS,
) -> SimulationResult:
    """Run ``shots`` one-shot identifications and tally outcomes and decisions."""
    if isinstance(shots, bool) or not isinstance(shots, (int, np.integer)) or shots < 1:
        raise InvalidInputError(f"shots must be a positive integer, got {shots!r}")
    if shards < 1 or block_shots < 1:
        raise InvalidInputError("shards and block_shots must be positive")
    shots = int(shots)

    plan = _plan(task, protocol)
    sizes = [min(block_shots, shots - start) for start in range(0, shots, block_shots)]
    logger.debug("simulating %d shots in %d blocks on %d shard(s)", shots, len(sizes), shards)

    counts = np.zeros((2, 4), dtype=np.int64)
    with ThreadPoolExecutor(max_workers=shards) as executor:
        for block_counts in executor.map(
            lambda item: _simulate_block(task, plan, seed, item[0], item[1]), enumerate(sizes)
        ):
            counts += block_counts

    accept = protocol.accept_index
    noisy_total = int(counts[1].sum())
    non_accept = noisy_total - int(counts[1, accept])
    if strategy is Strategy.ALWAYS_NOISY:
        correct = noisy_total
    else:
        correct = int(counts[0, accept]) + non_accept

    f1 = non_accept / noisy_total if noisy_total else 0.0
    low, high = wilson_interval(non_accept, noisy_total)
    return SimulationResult(
        counts=counts,
        shots=shots,
        seed=seed,
        strategy=strategy,
        accept=protocol.accept,
        empirical_guess=correct / shots,
        guess_ci95=wilson_interval(correct, shots),
        f1=f1,
        p_hat=estimate_noise(f1),
        p_hat_raw=4.0 * f1 / 3.0,
        ci95=(estimate_noise(low), estimate_noise(high)),
    )


def sigma(probability: float, shots: int) -> float:
    return float(np.sqrt(probability * (1 - probability) / shots))


@dataclass(frozen=True)
class ConvergencePoint:
    shots: int
    empirical: float
    analytic: float
    sigma: float

    @property
    def within_3sigma(self) -> bool:
        return abs(self.empirical - self.analytic) <= 3 * self.sigma + 1e-12


def convergence_table(
    task: DiscriminationTask,
    protocol: LoccProtocol,
    shot_grid: list[int],
    seed: int,
    *,
    strategy: Strategy = Strategy.MEASURE,
) -> list[ConvergencePoint]:
    """Empirical against exact success probability for growing shot counts."""
    analytic = protocol_guess(task, protocol, strategy)
    points = []
    for shots in shot_grid:
        result = simulate(task, protocol, shots, seed, strategy=strategy)
        points.append(ConvergencePoint(shots, result.empirical_guess, analytic, sigma(analytic, shots)))
    return points


@dataclass(frozen=True, eq=False)
class LoccGlobalReport:
    p: float
    q: float
    strategy: Strategy
    p_global: float
    p_locc_analytic: float
    p_locc_simulated: float
    ci95: tuple[float, float]
    shots: int
    p_hat: float
    seed: int
    equal: bool

    def as_dict(self) -> dict[str, object]:
        return {
            "p": self.p,
            "q": self.q,
            "strategy": str(self.strategy),
            "p_global": self.p_global,
            "p_locc_analytic": self.p_locc_analytic,
            "p_locc_simulated": self.p_locc_simulated,
            "ci95": list(self.ci95),
            "shots": self.shots,
            "p_hat": self.p_hat,
            "seed": self.seed,
            "equal": self.equal,
        }


def locc_vs_global_report(
    gate,
    p: float,
    q: float,
    *,
    shots: int = DEFAULT_BLOCK_SHOTS,
    seed: int = 0,
    shards: int = 1,
    protocol: LoccProtocol | None = None,
) -> LoccGlobalReport:
    """Global closed form against the exact and simulated value of the local protocol."""
    task = DiscriminationTask(gate, Depolarized(gate, p), q)
    protocol = protocol or build_locc_protocol(task.gate)
    strategy = preferred_strategy(p, q)

    p_global = closed_form_guess(p, q)
    p_locc = protocol_guess(task, protocol, strategy)
    result = simulate(task, protocol, shots, seed, strategy=strategy, shards=shards)
    within = abs(result.empirical_guess - p_locc) <= 3 * sigma(p_locc, shots) + 1e-12
    return LoccGlobalReport(
        p=float(p),
        q=float(q),
        strategy=strategy,
        p_global=p_global,
        p_locc_analytic=p_locc,
        p_locc_simulated=result.empirical_guess,
        ci95=result.guess_ci95,
        shots=shots,
        p_hat=result.p_hat,
        seed=seed,
        equal=abs(p_global - p_locc) < 1e-12 and within,
    )
