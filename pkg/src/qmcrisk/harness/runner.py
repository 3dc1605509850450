"""Build, simulate and score one scenario over an n sweep."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .. import gates
from ..models import (
    BinomialParams,
    DefaultRegion,
    calibrate_binomial,
    calibrate_hazard,
    calibrate_trinomial,
    migration_params,
)
from ..qae import build_full_circuit, error_bound, estimate, full_circuit_decomposed_depth, theta_of
from ..scenarios import (
    DEFAULT_MIGRATION,
    Scenario,
    credit_default_problem,
    equity_problem,
    worked_example_problem,
    lattice_problem,
    qubits_required,
    survival_problem,
)
from ..statevector import CapacityError, max_qubits, qubit_budget
from .config import ExperimentConfig


@dataclass(frozen=True)
class RunRecord:
    """One sweep point.

    ``delta_p`` is the error bound sin(theta) pi / 2^n at the oracle angle
    theta = 2 arcsin sqrt(p_oracle), the bound the estimate is checked against.
    """

    scenario: str
    n: int
    z0: int
    p_est: float
    delta_p: float
    p_oracle: float
    abs_error: float
    qubits: int
    depth: int
    seconds: float

    def to_dict(self) -> dict:
        return asdict(self)


class RefusalError(RuntimeError):
    """A sweep point does not fit the qubit budget."""

    def __init__(self, scenario: str, n: int, required: int, budget: int):
        self.scenario, self.n = scenario, n
        self.required, self.budget = required, budget
        self.shortfall = required - budget
        super().__init__(
            f"{scenario} at n={n} needs {required} qubits; budget is {budget} (short by {self.shortfall})"
        )

    def payload(self) -> dict:
        return {
            "error": "qubit budget exceeded",
            "scenario": self.scenario,
            "n": self.n,
            "required_qubits": self.required,
            "budget_qubits": self.budget,
            "shortfall": self.shortfall,
        }


def region_for(config: ExperimentConfig, params: BinomialParams) -> DefaultRegion:
    if config.j_set is not None:
        return DefaultRegion(frozenset(config.j_set), "explicit j_set")
    return DefaultRegion.from_down_steps(params.m, config.barrier_down_steps)


def build_scenario(config: ExperimentConfig, n: int) -> Scenario:
    name = config.scenario
    if name in ("eq-max", "eq-min"):
        params = calibrate_binomial(config.mu, config.sigma, config.T, config.m)
        return equity_problem(params, n, name.split("-")[1])
    if name == "worked-example":
        q = math.sin(math.pi / 8) if config.q is None else config.q
        return worked_example_problem(q, n, config.m)
    if name == "credit-default":
        params = calibrate_binomial(config.mu, config.sigma, config.T, config.m)
        return credit_default_problem(params, region_for(config, params), n)
    if name == "credit-survival":
        params = calibrate_hazard(config.q_def, config.m, config.T, config.hazard_rate)
        return survival_problem(params, n)
    if name == "ir-mid":
        params = calibrate_trinomial(config.a_dt_fraction(), config.m, config.initial_level or "m")
        return lattice_problem(params, n, "m")
    if name == "migration":
        params = migration_params(config.transition or DEFAULT_MIGRATION, config.m, config.initial_level or "h")
        return lattice_problem(params, n, "l", migration=True)
    raise ValueError(f"unknown scenario {name!r}")


def required_qubits(config: ExperimentConfig, n: int) -> int:
    size = len(config.j_set) if config.j_set is not None else None
    if config.scenario == "credit-default" and size is None:
        size = len(DefaultRegion.from_down_steps(config.m, config.barrier_down_steps).j_set)
    return qubits_required(config.scenario, n, config.m, size or 2)


def check_budget(config: ExperimentConfig) -> None:
    """Refuse the whole sweep before any work if a circuit is wider than the budget.

    The check uses the full register width whichever engine is selected.
    """
    budget = max_qubits()
    for n in config.n:
        need = required_qubits(config, n)
        if need > budget:
            raise RefusalError(config.scenario, n, need, budget)


def run_point(config: ExperimentConfig, n: int, dump_dir: str | None = None) -> RunRecord:
    sc = build_scenario(config, n)
    start = time.perf_counter()
    try:
        result = estimate(sc.problem, config.mode, config.shots, config.seed, config.engine, sc.p_oracle)
    except CapacityError as exc:
        raise RefusalError(config.scenario, n, exc.required, exc.budget) from exc
    seconds = 0.0 if config.deterministic else time.perf_counter() - start
    if dump_dir is not None:
        path = Path(dump_dir) / f"circuit_{config.scenario}_n{n}.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(gates.dumps(build_full_circuit(sc.problem)))
    bound = error_bound(theta_of(sc.p_oracle), n)
    return RunRecord(
        scenario=config.scenario,
        n=n,
        z0=result.z0,
        p_est=result.p_est,
        delta_p=bound,
        p_oracle=sc.p_oracle,
        abs_error=abs(result.p_est - sc.p_oracle),
        qubits=sc.problem.num_qubits,
        depth=full_circuit_decomposed_depth(sc.problem),
        seconds=seconds,
    )


def _run_point_args(args):
    return run_point(*args)


HIGH_MEMORY_QUBITS = 28


def effective_budget(config: ExperimentConfig) -> int:
    budget = max_qubits()
    return max(budget, HIGH_MEMORY_QUBITS) if config.high_memory else budget


def run(config: ExperimentConfig, workers: int = 1, dump_dir: str | None = None) -> list[RunRecord]:
    """All sweep points of ``config``, ordered by (scenario, n).

    ``high_memory`` lifts the budget to at least 28 qubits (4 GiB of amplitudes).
    """
    with qubit_budget(effective_budget(config)):
        return _run(config, workers, dump_dir)


def _run(config: ExperimentConfig, workers: int, dump_dir: str | None) -> list[RunRecord]:
    check_budget(config)
    jobs = [(config, n, dump_dir) for n in config.n]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_point_args, jobs))
    else:
        records = [run_point(*job) for job in jobs]
    return sorted(records, key=lambda r: (r.scenario, r.n))
