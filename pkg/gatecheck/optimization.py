"""Numerical search for the best pure input state.

The guessing probability of a fixed input is a Helstrom value; the global optimum
maximizes it over pure two-qubit inputs. States are parameterized by eight reals
(real and imaginary parts of four amplitudes) and normalized inside the
objective, so the search is unconstrained. Each restart runs L-BFGS-B from a
Haar-random start; the best restart wins.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import minimize

from .channels import CNOT, ChannelSpec, counterexample_channel
from .discrimination import input_guess, pure_branch_guess
from .exceptions import InvalidInputError
from .qmath import PHI_PLUS, Ket, check_unitary, haar_random_ket

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 500
    tol: float = 1e-8
    # restarts within this distance of the best value count as agreeing
    agreement: float = 1e-6

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1 or self.tol <= 0:
            raise InvalidInputError("optimizer restarts, max_iters and tol must be positive")


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    p_guess: float
    argmax: Ket
    converged: bool
    agreeing_restarts: int
    restart_values: NDArray[np.float64] = field(repr=False)


def _full_state(x: NDArray[np.float64]) -> Ket:
    psi = x[:4] + 1j * x[4:]
    return psi / np.linalg.norm(psi)


def _product_state(x: NDArray[np.float64]) -> Ket:
    a = x[0:2] + 1j * x[2:4]
    b = x[4:6] + 1j * x[6:8]
    return np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))


def _start_point(rng: np.random.Generator, product_only: bool) -> NDArray[np.float64]:
    if product_only:
        a, b = haar_random_ket(2, rng), haar_random_ket(2, rng)
        return np.concatenate([a.real, a.imag, b.real, b.imag])
    psi = haar_random_ket(4, rng)
    return np.concatenate([psi.real, psi.imag])


def optimize_input(
    gate: ArrayLike,
    channel: ChannelSpec,
    q: float,
    config: OptimizerConfig | None = None,
    *,
    seed: int = 0,
    product_only: bool = False,
) -> OptimizationResult:
    """Maximize the guessing probability over pure inputs (product inputs with ``product_only``).

    Never raises on non-convergence; ``converged`` is False when fewer than two
    restarts agree on the best value.
    """
    config = config or OptimizerConfig()
    u = check_unitary(gate, 4)
    to_state = _product_state if product_only else _full_state
    rng = np.random.default_rng(seed)

    def objective(x: NDArray[np.float64]) -> float:
        halves = (x[:4], x[4:]) if product_only else (x,)
        if min(np.linalg.norm(h) for h in halves) < 1e-12:
            return 0.0
        return -input_guess(u, channel, to_state(x), q)

    values = np.empty(config.restarts)
    points = []
    for restart in range(config.restarts):
        outcome = minimize(
            objective,
            _start_point(rng, product_only),
            method="L-BFGS-B",
            options={"maxiter": config.max_iters, "ftol": config.tol * 1e-2, "gtol": config.tol},
        )
        values[restart] = -outcome.fun
        points.append(outcome.x)
        logger.debug("restart %d: value %.12f (%s)", restart, values[restart], outcome.message)

    best = int(np.argmax(values))
    agreeing = int(np.sum(values >= values[best] - config.agreement))
    converged = agreeing >= min(2, config.restarts)
    if not converged:
        logger.warning("optimizer restarts disagree; best value %.12f from a single restart", values[best])
    return OptimizationResult(
        p_guess=float(values[best]),
        argmax=to_state(points[best]),
        converged=converged,
        agreeing_restarts=agreeing,
        restart_values=values,
    )


def published_counterexample_value(p: float) -> float:
    """The ½ + 3p/8 figure quoted for the counterexample channel at q = ½."""
    return 0.5 + 3 * p / 8


@dataclass(frozen=True, eq=False)
class CounterexampleReport:
    p: float
    q: float
    optimizer: OptimizationResult
    argmax_bound: float
    phi_plus_value: float
    product_input_bound: OptimizationResult
    published: float | None

    def as_dict(self) -> dict[str, object]:
        argmax = self.optimizer.argmax
        return {
            "p": self.p,
            "q": self.q,
            "p_guess_optimizer": self.optimizer.p_guess,
            "converged": self.optimizer.converged,
            "agreeing_restarts": self.optimizer.agreeing_restarts,
            "argmax": [[float(a.real), float(a.imag)] for a in argmax],
            "argmax_two_state_value": self.argmax_bound,
            "p_guess_phi_plus": self.phi_plus_value,
            "locc_upper_bound_product_inputs": self.product_input_bound.p_guess,
            "published_value": self.published,
        }


def counterexample_report(
    p: float, q: float = 0.5, config: OptimizerConfig | None = None, *, seed: int = 0
) -> CounterexampleReport:
    """Compare CNOT against the CNOT / CNOT(S⊗S) mixture.

    Product inputs bound every local strategy from above, since local operations
    cannot create entanglement.
    """
    channel = counterexample_channel(p)
    best = optimize_input(CNOT, channel, q, config, seed=seed)
    product = optimize_input(CNOT, channel, q, config, seed=seed, product_only=True)
    return CounterexampleReport(
        p=float(p),
        q=float(q),
        optimizer=best,
        argmax_bound=pure_branch_guess(CNOT, channel, best.argmax, q),
        phi_plus_value=pure_branch_guess(CNOT, channel, PHI_PLUS, q),
        product_input_bound=product,
        published=published_counterexample_value(p) if abs(q - 0.5) < 1e-12 else None,
    )
