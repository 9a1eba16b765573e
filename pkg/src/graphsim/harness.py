"""Experiment runner: configuration, trial orchestration, CSV emission, and
analytic planners for the modeled state-distribution schemes.

Each trial generates a base graph, deforms it, builds the cost diagonal and
mixer, optimizes the evolve-expectation objective under the evaluation
budget, samples the final state, and scores the result against the
brute-force optimum.  Every random draw comes from a stream keyed by
(master_seed, trial, purpose, ...), so a re-run with the same master seed
reproduces the CSV byte for byte.
"""

from __future__ import annotations

import concurrent.futures
import configparser
import csv
import io
import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import graphs, permutations
from .evolution import ExpmWorkspace
from .hamiltonians import COST_MODES, build_cost_diagonal, build_mixer
from .optimize import DEFAULT_F_TOL, DEFAULT_X_TOL, METHODS, OptimizerBudget, SearchBox, minimize
from .qaoa import Metrics, QaoaParams, compute_metrics, evolve, expectation
from .rng import ALGORITHMS, DEFAULT_ALGORITHM, make_generator

# Stream purposes; part of the replay contract, do not renumber.
_STREAM_BASE_GRAPH = 0
_STREAM_DEFORM = 1
_STREAM_INITIAL_PARAMS = 2
_STREAM_SAMPLING = 3

DISTRIBUTION_SCHEMES = ("column", "row", "checkerboard")

CSV_COLUMNS = (
    "graph_size",
    "directed",
    "deformation",
    "cost_mode",
    "method",
    "p",
    "budget_scaling",
    "max_evaluations",
    "sample_count",
    "rng",
    "master_seed",
    "trial_id",
    "best_parameters",
    "termination_reason",
    "Number of Evaluations",
    "Sample Error",
    "Expectation Error",
    "Classical Comparison",
    "Expectation Improvement",
    "Infeasible Sample Fraction",
    "time_build_cost_s",
    "time_build_mixer_s",
    "time_evolve_mean_s",
    "time_total_s",
    "error",
)


@dataclass
class ExperimentConfig:
    graph_size: int = 4
    directed: bool = True
    deformation: str = "add_remove"
    cost_mode: str = "edge_difference"
    p_list: tuple[int, ...] = (1,)
    methods: tuple[str, ...] = ("nelder_mead",)
    budget_scaling: int = 200
    max_evaluations: Optional[int] = None
    master_seed: int = 0
    trials: int = 1
    samples: Optional[int] = None
    output: Optional[str] = "results.csv"
    threads: int = 1
    rng: str = DEFAULT_ALGORITHM
    x_tol: float = DEFAULT_X_TOL
    f_tol: float = DEFAULT_F_TOL
    record_timings: bool = False
    brute_force_cap: int = graphs.BRUTE_FORCE_CAP
    max_q: int = 24

    def validate(self) -> None:
        if self.graph_size < 2:
            raise ValueError("graph_size must be >= 2")
        if self.graph_size > self.brute_force_cap:
            raise ValueError(f"graph_size {self.graph_size} exceeds brute-force cap {self.brute_force_cap}")
        q = permutations.qubit_count(self.graph_size)
        if q > self.max_q:
            raise ValueError(f"graph_size {self.graph_size} needs q={q} > maximum {self.max_q}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.deformation not in graphs.DEFORMATIONS:
            raise ValueError(f"unknown deformation {self.deformation!r}")
        if self.cost_mode not in COST_MODES:
            raise ValueError(f"unknown cost mode {self.cost_mode!r}")
        if not self.p_list or any(p < 1 for p in self.p_list):
            raise ValueError("p_list must contain depths >= 1")
        for method in self.methods:
            if method not in METHODS:
                raise ValueError(f"unknown optimizer method {method!r}")
        if self.rng not in ALGORITHMS:
            raise ValueError(f"unknown rng {self.rng!r}")
        if self.samples is not None and self.samples < 1:
            raise ValueError("samples override must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.budget_scaling < 1:
            raise ValueError("budget_scaling must be >= 1")

    @property
    def sample_count(self) -> int:
        return self.samples if self.samples is not None else self.graph_size**2

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
        cfg = cls()

        def get(section: str, key: str, convert, fallback):
            raw = parser.get(section, key, fallback=None)
            if raw is None or raw.strip() == "":
                return fallback
            return convert(raw.strip())

        as_bool = lambda s: s.lower() in ("1", "true", "yes", "on")
        int_list = lambda s: tuple(int(tok) for tok in s.replace(",", " ").split())
        str_list = lambda s: tuple(tok for tok in s.replace(",", " ").split())
        return replace(
            cfg,
            graph_size=get("graph", "size", int, cfg.graph_size),
            directed=get("graph", "directed", as_bool, cfg.directed),
            deformation=get("graph", "deformation", str, cfg.deformation),
            cost_mode=get("qaoa", "cost_mode", str, cfg.cost_mode),
            p_list=get("qaoa", "p", int_list, cfg.p_list),
            methods=get("optimizer", "methods", str_list, cfg.methods),
            budget_scaling=get("optimizer", "scaling", int, cfg.budget_scaling),
            max_evaluations=get("optimizer", "max_evaluations", int, cfg.max_evaluations),
            x_tol=get("optimizer", "x_tol", float, cfg.x_tol),
            f_tol=get("optimizer", "f_tol", float, cfg.f_tol),
            master_seed=get("run", "master_seed", int, cfg.master_seed),
            trials=get("run", "trials", int, cfg.trials),
            samples=get("run", "samples", int, cfg.samples),
            output=get("run", "out", str, cfg.output),
            threads=get("run", "threads", int, cfg.threads),
            rng=get("run", "rng", str, cfg.rng),
            record_timings=get("run", "record_timings", as_bool, cfg.record_timings),
        )


@dataclass
class TrialRecord:
    """One optimizer run: configuration echo, trace summary, metrics, timings."""

    config: ExperimentConfig
    trial_id: int
    p: int
    method: str
    max_evaluations: int
    best_parameters: np.ndarray = field(default_factory=lambda: np.zeros(0))
    termination_reason: str = ""
    metrics: Optional[Metrics] = None
    time_build_cost_s: float = 0.0
    time_build_mixer_s: float = 0.0
    time_evolve_mean_s: float = 0.0
    time_total_s: float = 0.0
    error: str = ""


def _format_number(x) -> str:
    """17 significant digits, enough to round-trip doubles exactly."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _record_to_row(record: TrialRecord) -> list[str]:
    cfg = record.config
    timings = ("0", "0", "0", "0")
    if cfg.record_timings:
        timings = tuple(
            _format_number(v)
            for v in (
                record.time_build_cost_s,
                record.time_build_mixer_s,
                record.time_evolve_mean_s,
                record.time_total_s,
            )
        )
    m = record.metrics
    metric_cells = [""] * 6
    if m is not None:
        metric_cells = [
            str(m.evaluations),
            _format_number(m.sample_error),
            _format_number(m.expectation_error),
            _format_number(m.classical_comparison),
            _format_number(m.expectation_improvement),
            _format_number(m.infeasible_sample_fraction),
        ]
    return [
        str(cfg.graph_size),
        "true" if cfg.directed else "false",
        cfg.deformation,
        cfg.cost_mode,
        record.method,
        str(record.p),
        str(cfg.budget_scaling),
        str(record.max_evaluations),
        str(cfg.sample_count),
        cfg.rng,
        str(cfg.master_seed),
        str(record.trial_id),
        ";".join(_format_number(v) for v in record.best_parameters),
        record.termination_reason,
        *metric_cells,
        *timings,
        record.error,
    ]


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        writer.writerow(_record_to_row(record))
    return buffer.getvalue()


def _stream(cfg: ExperimentConfig, *key: int) -> np.random.Generator:
    return make_generator(cfg.master_seed, *key, algorithm=cfg.rng)


def _run_single_trial(cfg: ExperimentConfig, trial_id: int) -> list[TrialRecord]:
    t_trial = time.perf_counter()
    base = graphs.erdos_renyi(cfg.graph_size, cfg.directed, _stream(cfg, trial_id, _STREAM_BASE_GRAPH))
    partner = graphs.deform(base, cfg.deformation, _stream(cfg, trial_id, _STREAM_DEFORM))

    t0 = time.perf_counter()
    diag = build_cost_diagonal(base, partner, cfg.cost_mode, cap=cfg.brute_force_cap, max_q=cfg.max_q)
    time_build_cost = time.perf_counter() - t0
    t0 = time.perf_counter()
    mixer = build_mixer(diag.q, max_q=cfg.max_q)
    time_build_mixer = time.perf_counter() - t0
    _, d_min = graphs.brute_force_best(base, partner, cap=cfg.brute_force_cap)

    records = []
    for p_index, p in enumerate(cfg.p_list):
        for method_index, method in enumerate(cfg.methods):
            budget = OptimizerBudget(
                p=p,
                graph_size=cfg.graph_size,
                scaling=cfg.budget_scaling,
                max_evaluations=cfg.max_evaluations,
            )
            record = TrialRecord(
                config=cfg,
                trial_id=trial_id,
                p=p,
                method=method,
                max_evaluations=budget.max_evaluations,
                time_build_cost_s=time_build_cost,
                time_build_mixer_s=time_build_mixer,
            )
            try:
                workspace = ExpmWorkspace()
                evolve_seconds = [0.0, 0]

                def objective(x: np.ndarray) -> float:
                    t_eval = time.perf_counter()
                    psi = evolve(QaoaParams.from_vector(x), diag, mixer, workspace=workspace)
                    value = expectation(psi, diag)
                    evolve_seconds[0] += time.perf_counter() - t_eval
                    evolve_seconds[1] += 1
                    if cfg.cost_mode == "alternate_penalty":
                        value = -value
                    return value

                box = SearchBox.default(2 * p)
                x0 = box.lower + _stream(cfg, trial_id, _STREAM_INITIAL_PARAMS, p_index, method_index).random(
                    2 * p
                ) * box.widths
                result = minimize(
                    objective,
                    x0,
                    box=box,
                    budget=budget,
                    method=method,
                    tolerances=(cfg.x_tol, cfg.f_tol),
                    seed=_stream(cfg, trial_id, _STREAM_INITIAL_PARAMS, p_index, method_index, 1),
                )
                final_psi = evolve(QaoaParams.from_vector(result.best_x), diag, mixer, workspace=workspace)
                record.metrics = compute_metrics(
                    diag,
                    final_psi,
                    d_min,
                    evaluations=result.evaluations,
                    f_initial=result.f_initial,
                    num_samples=cfg.sample_count,
                    seed=_stream(cfg, trial_id, _STREAM_SAMPLING, p_index, method_index),
                )
                record.best_parameters = result.best_x
                record.termination_reason = result.termination_reason
                record.time_evolve_mean_s = evolve_seconds[0] / max(evolve_seconds[1], 1)
            except Exception as exc:  # recorded, the batch continues
                record.error = f"{type(exc).__name__}: {exc}"
            record.time_total_s = time.perf_counter() - t_trial
            records.append(record)
    return records


def run_experiment(cfg: ExperimentConfig) -> list[TrialRecord]:
    """Run all trials and, when cfg.output is set, write the CSV."""
    cfg.validate()
    if cfg.threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            per_trial = list(pool.map(lambda t: _run_single_trial(cfg, t), range(cfg.trials)))
    else:
        per_trial = [_run_single_trial(cfg, t) for t in range(cfg.trials)]
    records = [record for batch in per_trial for record in batch]
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(records_to_csv(records))
    return records


def state_partition(q: int, processors: int) -> list[tuple[int, int]]:
    """Contiguous (offset, length) chunks; the remainder rides on the last one."""
    n = 1 << q
    if not 1 <= processors <= n:
        raise ValueError(f"processor count {processors} outside [1, {n}]")
    base = n // processors
    lengths = [base] * (processors - 1) + [base + n % processors]
    offsets = np.concatenate([[0], np.cumsum(lengths[:-1])]) if processors > 1 else np.zeros(1, dtype=int)
    return [(int(o), int(l)) for o, l in zip(offsets, lengths)]


@dataclass
class DistributionPlan:
    """Inputs of the analytic execution-time models (nothing is executed)."""

    scheme: str
    n: int
    processors: int
    alpha: float = 1e-9  # seconds per scalar operation
    latency: float = 1e-6  # seconds per message
    buffer_length: float = 65536.0  # message buffer length

    def __post_init__(self) -> None:
        if self.scheme not in DISTRIBUTION_SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {DISTRIBUTION_SCHEMES}")
        if self.processors < 1:
            raise ValueError("processors must be >= 1")
        if min(self.alpha, self.latency, self.buffer_length) <= 0:
            raise ValueError("model constants must be positive")


def distribution_cost(plan: DistributionPlan) -> float:
    """Evaluate the selected scheme's execution-time expression literally."""
    n, p = float(plan.n), float(plan.processors)
    alpha, lam, buf = plan.alpha, plan.latency, plan.buffer_length
    if plan.scheme == "column":
        return alpha * n * math.ceil(n / p) + (p - 1.0) * (lam + 32.0 / (p * buf))
    if plan.scheme == "row":
        return alpha * n * math.ceil(n / p) + lam * math.ceil(math.log2(p)) + 32.0 * n / buf
    return alpha * n * n / (p * p) + lam * 32.0 * n * math.log2(p * p) / (math.sqrt(p * p) * buf)
