"""Single entry point behind every management command.

``run`` validates a ``RunConfig``, dispatches to the library, and returns a
``RunOutcome`` holding the exit code and the report document. Library
exceptions become exit codes here: 2 for invalid input, 3 for construction
failures.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .channels import Depolarized
from .discrimination import (
    DiscriminationTask,
    Strategy,
    build_locc_protocol,
    lambda_condition,
    preferred_strategy,
    protocol_guess,
)
from .exceptions import ConstructionError, GatecheckError, InvalidInputError
from .gates import channel_from_document, gate_description, resolve_gate
from .kak import kak_decompose
from .optimization import OptimizerConfig, counterexample_report, optimize_input
from .product_finder import TAU_PROD, find_product_preserving_state
from .qmath import Operator, TAU_UNIT, is_product
from .reports import render_csv, render_json
from .simulation import DEFAULT_BLOCK_SHOTS, locc_vs_global_report, simulate

logger = logging.getLogger(__name__)

COMMANDS = ("decompose", "find_state", "discriminate", "simulate", "estimate_noise", "counterexample")
FORMATS = ("json", "csv")
DEFAULT_SHOTS = 100_000


@dataclass
class RunConfig:
    command: str
    gate: str | None = None
    p: float | None = None
    q: float = 0.5
    shots: int = DEFAULT_SHOTS
    seed: int | None = None
    output: str | None = None
    format: str = "json"
    tol: float | None = None
    shards: int = 1
    block_shots: int = DEFAULT_BLOCK_SHOTS
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)


@dataclass
class RunOutcome:
    exit_code: int
    report: dict[str, Any] | None = None
    error: str | None = None
    rows: list[dict[str, Any]] | None = None

    def render(self, fmt: str = "json") -> str:
        if fmt == "csv":
            return render_csv(self.rows or [])
        return render_json(self.report or {})


def _matrix(m: Operator) -> list[list[list[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _ket(v) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v)]


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return int(seed)
    drawn = int(np.random.default_rng().integers(2**63))
    logger.warning("no seed given; drew seed %d", drawn)
    return drawn


def _require_gate(config: RunConfig):
    if not config.gate:
        raise InvalidInputError(f"{config.command} needs --gate")
    return resolve_gate(config.gate, tol=config.tol or TAU_UNIT)


def _channel(config: RunConfig, gate: Operator, document):
    has_noise = bool(document and document.get("noise"))
    if config.p is None and not has_noise:
        raise InvalidInputError(f"{config.command} needs --p (or a gate file with a 'noise' field)")
    return channel_from_document(document, gate, config.p)


def _decompose(config: RunConfig) -> RunOutcome:
    gate, _ = _require_gate(config)
    kak = kak_decompose(gate)
    return RunOutcome(
        0,
        {
            "command": "decompose",
            "gate": config.gate,
            "description": gate_description(config.gate),
            "lambdas": kak.lambdas.tolist(),
            "global_phase": kak.global_phase,
            "u_a": _matrix(kak.u_a),
            "u_b": _matrix(kak.u_b),
            "v_a": _matrix(kak.v_a),
            "v_b": _matrix(kak.v_b),
            "reconstruction_error": kak.reconstruction_error(gate),
        },
    )


def _find_state(config: RunConfig) -> RunOutcome:
    gate, _ = _require_gate(config)
    pair = find_product_preserving_state(gate, tol=config.tol or TAU_PROD)
    return RunOutcome(
        0,
        {
            "command": "find_state",
            "gate": config.gate,
            "description": gate_description(config.gate),
            "input": {"alice": _ket(pair.input.alice), "bob": _ket(pair.input.bob)},
            "output": {"alice": _ket(pair.output.alice), "bob": _ket(pair.output.bob)},
            "input_schmidt2": is_product(pair.input.state).schmidt2,
            "output_schmidt2": is_product(gate @ pair.input.state).schmidt2,
            "lambdas": pair.lambdas.tolist(),
            "null_vector": pair.null_vector.tolist(),
        },
    )


def _protocol_fields(protocol) -> dict[str, Any]:
    return {
        "input": {"alice": _ket(protocol.input_a), "bob": _ket(protocol.input_b)},
        "accept": list(protocol.accept),
    }


def _discriminate(config: RunConfig) -> RunOutcome:
    gate, document = _require_gate(config)
    channel = _channel(config, gate, document)
    seed = _resolve_seed(config.seed)
    protocol = build_locc_protocol(gate, tol=config.tol or TAU_PROD)

    if isinstance(channel, Depolarized):
        comparison = locc_vs_global_report(
            gate, channel.p, config.q, shots=config.shots, seed=seed,
            shards=config.shards, protocol=protocol,
        )
        report = comparison.as_dict()
        report["lambda_condition"] = lambda_condition(channel.p, config.q)
    else:
        task = DiscriminationTask(gate, channel, config.q)
        best = optimize_input(gate, channel, config.q, config.optimizer, seed=seed)
        report = {
            "q": config.q,
            "seed": seed,
            "strategy": str(Strategy.MEASURE),
            "p_global": best.p_guess,
            "p_global_converged": best.converged,
            "p_locc_analytic": protocol_guess(task, protocol, Strategy.MEASURE),
        }
    report.update(_protocol_fields(protocol), command="discriminate", gate=config.gate)
    return RunOutcome(0, report)


def _run_simulation(config: RunConfig, command: str):
    gate, document = _require_gate(config)
    channel = _channel(config, gate, document)
    seed = _resolve_seed(config.seed)
    task = DiscriminationTask(gate, channel, config.q)
    protocol = build_locc_protocol(gate, tol=config.tol or TAU_PROD)
    strategy = Strategy.MEASURE
    if command == "simulate" and isinstance(channel, Depolarized):
        strategy = preferred_strategy(channel.p, config.q)
    result = simulate(
        task, protocol, config.shots, seed,
        strategy=strategy, shards=config.shards, block_shots=config.block_shots,
    )
    report = result.as_dict()
    report.update(_protocol_fields(protocol), command=command, gate=config.gate, q=config.q)
    if isinstance(channel, Depolarized):
        report["p"] = channel.p
    return task, protocol, result, report


def _simulate(config: RunConfig) -> RunOutcome:
    task, protocol, result, report = _run_simulation(config, "simulate")
    report["analytic_guess"] = protocol_guess(task, protocol, result.strategy)
    return RunOutcome(0, report, rows=result.outcome_table())


def _estimate_noise(config: RunConfig) -> RunOutcome:
    _, _, result, report = _run_simulation(config, "estimate_noise")
    keep = ("command", "gate", "p", "q", "shots", "seed", "f1", "p_hat", "p_hat_raw", "ci95", "accept")
    return RunOutcome(0, {k: report[k] for k in keep if k in report})


def _counterexample(config: RunConfig) -> RunOutcome:
    if config.p is None:
        raise InvalidInputError("counterexample needs --p")
    seed = _resolve_seed(config.seed)
    report = counterexample_report(config.p, config.q, config.optimizer, seed=seed).as_dict()
    report.update(command="counterexample", gate="cnot", seed=seed)
    return RunOutcome(0, report)


_HANDLERS: dict[str, Callable[[RunConfig], RunOutcome]] = {
    "decompose": _decompose,
    "find_state": _find_state,
    "discriminate": _discriminate,
    "simulate": _simulate,
    "estimate_noise": _estimate_noise,
    "counterexample": _counterexample,
}


def _validate(config: RunConfig) -> None:
    if config.command not in _HANDLERS:
        raise InvalidInputError(f"unknown command {config.command!r}; use one of {', '.join(COMMANDS)}")
    if config.format not in FORMATS:
        raise InvalidInputError(f"unknown format {config.format!r}; use json or csv")
    if config.format == "csv" and config.command != "simulate":
        raise InvalidInputError("csv output is only available for simulate")
    if config.shots < 1:
        raise InvalidInputError(f"--shots must be positive, got {config.shots}")
    if config.shards < 1:
        raise InvalidInputError(f"--shards must be positive, got {config.shards}")
    if config.tol is not None and config.tol <= 0:
        raise InvalidInputError(f"--tol must be positive, got {config.tol}")


def run(config: RunConfig) -> RunOutcome:
    """Execute one command; never raises for library errors."""
    try:
        _validate(config)
        return _HANDLERS[config.command](config)
    except InvalidInputError as e:
        logger.debug("invalid input for %s: %s", config.command, e)
        return RunOutcome(InvalidInputError.exit_code, error=str(e))
    except ConstructionError as e:
        logger.debug("construction failed for %s: %s", config.command, e)
        return RunOutcome(ConstructionError.exit_code, error=str(e))
    except GatecheckError as e:
        return RunOutcome(ConstructionError.exit_code, error=str(e))
