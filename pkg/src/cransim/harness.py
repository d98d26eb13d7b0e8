"""Experiment sweeps: config validation, seeded trial execution on a worker
pool, and the on-disk result layout.

Layout of an output directory::

    manifest.json                 config echo + content hash
    summary.csv                   rows = metric, columns = cells
    cells/<label>/trials.jsonl    one TrialReport per line, trial order
    cells/<label>/cdf_<name>.csv  value,probability
    cells/<label>/traces/         per-trial scenario/trace/episode files
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .baselines import BaselineConfig, activation_scheme, sleep_scheme
from .metrics import TrialReport, build_report, empirical_cdf
from .network import NetworkState
from .radio import RadioConfig
from .scenario import RateProfile, Scenario, build_scenario, build_topology
from .sdql import DeepQTable, EpisodeTrace, Hyperparams, run_episode

log = logging.getLogger(__name__)

WORKERS_ENV = "CRANSIM_WORKERS"
ALGORITHMS = ("sdql", "activation", "sleep")

SUMMARY_ROWS = [
    ("power_offset_db", "avg_power_offset_db"),
    ("power_reduction_db", "avg_power_reduction_db"),
    ("interference_reduction_db", "avg_interference_reduction_db"),
    ("interference_db", "avg_interference_db"),
    ("throughput_loss_mbps", "throughput_loss_total"),
    ("weak_to_central", "weak_to_central"),
    ("central_to_weak", "central_to_weak"),
    ("iterations", "iterations"),
    ("converged_fraction", "converged"),
]

CDF_SAMPLES = ("power_offset_db", "power_reduction_db", "interference_reduction_db", "throughput_loss_mbps")


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RadioSection(_Strict):
    p_max_dbw: float = 15.2
    noise_dbw: float = -125.0
    bandwidth_hz: float = Field(10e6, gt=0)
    tx_gain_dbi: float = 17.5
    center_freq_hz: float = Field(1.8e9, gt=0)
    speed_of_light_mps: float = Field(3e8, gt=0)
    pathloss_exponent: float = Field(1.0, ge=1)

    @model_validator(mode="after")
    def _noise_below_pmax(self):
        if self.p_max_dbw <= self.noise_dbw:
            raise ValueError("p_max_dbw must exceed noise_dbw")
        return self


class ScenarioSection(_Strict):
    b_count: int = Field(57, ge=1)
    inter_site_distance_m: float = Field(200.0, gt=0)
    activated_counts: List[int] = [11, 17, 22, 28, 34]
    rates_mbps: List[float] = [0.5, 1.0, 1.5, 2.0]
    rate_weights: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check(self):
        if not self.activated_counts:
            raise ValueError("activated_counts must not be empty")
        for n in self.activated_counts:
            if not 1 <= n <= self.b_count:
                raise ValueError(f"activated count {n} outside [1, b_count={self.b_count}]")
        if not self.rates_mbps or min(self.rates_mbps) <= 0:
            raise ValueError("rates_mbps needs positive values")
        if self.rate_weights is not None and len(self.rate_weights) != len(self.rates_mbps):
            raise ValueError("rate_weights must match rates_mbps")
        return self


class SdqlSection(_Strict):
    alpha: float = Field(0.1, ge=0, le=1)
    lam: float = Field(0.9, ge=0, le=1)
    epsilon: float = Field(0.1, ge=0, lt=1)
    max_iterations: int = Field(100, ge=1)
    convergence_window: int = Field(10, ge=1)
    window_len: int = Field(10, ge=1)
    state_bound: int = Field(150, ge=1)
    gamma_tolerance: float = Field(1e-9, ge=0)
    warm_start: bool = False


class BaselineSection(_Strict):
    sleep_power_dbw: Optional[float] = None


class ExperimentConfig(_Strict):
    trials: int = Field(100, ge=1)
    base_seed: int = 0
    output_dir: str = "results"
    algorithms: List[Literal["sdql", "activation", "sleep"]] = list(ALGORITHMS)
    sweep: List[Tuple[float, float]] = [(0.5, 0.5)]
    save_traces: bool = False
    radio: RadioSection = RadioSection()
    scenario: ScenarioSection = ScenarioSection()
    sdql: SdqlSection = SdqlSection()
    baseline: BaselineSection = BaselineSection()

    @model_validator(mode="after")
    def _check(self):
        for w0, w1 in self.sweep:
            if w0 < 0 or w1 < 0 or not math.isclose(w0 + w1, 1.0, abs_tol=1e-9):
                raise ValueError(f"weights ({w0}, {w1}) must be non-negative and sum to 1")
        if not self.sweep:
            raise ValueError("sweep needs at least one (w0, w1) pair")
        if self.baseline.sleep_power_dbw is not None and self.baseline.sleep_power_dbw >= self.radio.p_max_dbw:
            raise ValueError("baseline.sleep_power_dbw must be below radio.p_max_dbw")
        return self

    def radio_config(self) -> RadioConfig:
        return RadioConfig(**self.radio.model_dump())

    def rate_profile(self) -> RateProfile:
        w = tuple(self.scenario.rate_weights) if self.scenario.rate_weights else None
        return RateProfile(tuple(r * 1e6 for r in self.scenario.rates_mbps), w)

    def hyperparams(self, w0: float, w1: float) -> Hyperparams:
        d = self.sdql.model_dump()
        d.pop("warm_start")
        return Hyperparams(w0=w0, w1=w1, **d)

    def baseline_config(self) -> BaselineConfig:
        return BaselineConfig(self.baseline.sleep_power_dbw)


def validate_config(raw: Optional[dict]) -> ExperimentConfig:
    """Fill defaults and check ranges; unknown keys are rejected.

    Raises ConfigError whose message lists one ``path: problem`` per line.
    """
    try:
        return ExperimentConfig.model_validate(raw or {})
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            path = ".".join(str(p) for p in err["loc"]) or "<root>"
            lines.append(f"{path}: {err['msg']}")
        raise ConfigError("\n".join(lines)) from None


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        return validate_config(tomllib.load(fh))


def config_hash(config: ExperimentConfig) -> str:
    canon = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclasses.dataclass(frozen=True)
class Cell:
    algo: str
    activated: int
    w0: Optional[float] = None
    w1: Optional[float] = None

    @property
    def label(self) -> str:
        if self.algo == "sdql":
            return f"sdql_k{self.activated}_w{self.w0:g}-{self.w1:g}"
        return f"{self.algo}_k{self.activated}"


def plan_cells(config: ExperimentConfig) -> list:
    cells = []
    for k in config.scenario.activated_counts:
        for algo in config.algorithms:
            if algo == "sdql":
                cells.extend(Cell(algo, k, w0, w1) for w0, w1 in config.sweep)
            else:
                cells.append(Cell(algo, k))
    return cells


def sdql_rng(seed: int) -> np.random.Generator:
    # separate stream from the scenario draw, which uses default_rng(seed)
    return np.random.default_rng([seed, 1])


def make_scenario(config: ExperimentConfig, activated: int, seed: int) -> Scenario:
    sc = config.scenario
    topo = build_topology(sc.b_count, sc.inter_site_distance_m)
    return build_scenario(config.radio_config(), sc.b_count, sc.inter_site_distance_m, activated,
                          seed, config.rate_profile(), topology=topo)


def run_trial(config: ExperimentConfig, cell: Cell, seed: int,
              qtable: Optional[DeepQTable] = None, trace_dir: Optional[Path] = None):
    """One seeded trial. Returns (TrialReport, qtable or None)."""
    cfg = config.radio_config()
    scenario = make_scenario(config, cell.activated, seed)
    start = NetworkState.full_power(scenario, cfg)
    if cell.algo == "activation":
        return build_report("activation", seed, start, activation_scheme(scenario, cfg)), None
    if cell.algo == "sleep":
        final = sleep_scheme(scenario, cfg, config.baseline_config())
        return build_report("sleep", seed, start, final), None

    hp = config.hyperparams(cell.w0, cell.w1)
    res = run_episode(scenario, cfg, hp, sdql_rng(seed), deep_qtable=qtable)
    if trace_dir is not None:
        write_trace_files(trace_dir, seed, scenario, res.trace, cfg, hp)
    report = build_report("sdql", seed, res.initial, res.final, cell.w0, cell.w1,
                          res.trace.iterations, res.trace.converged)
    return report, res.qtable


def write_trace_files(trace_dir: Path, seed: int, scenario: Scenario, trace: EpisodeTrace,
                      cfg: RadioConfig, hp: Hyperparams) -> None:
    trace_dir.mkdir(parents=True, exist_ok=True)
    (trace_dir / f"scenario_{seed}.json").write_text(scenario.to_json())
    (trace_dir / f"trace_{seed}.csv").write_text(trace.to_csv())
    episode = {"seed": seed, "radio": dataclasses.asdict(cfg), "hyperparams": dataclasses.asdict(hp),
               **trace.summary()}
    (trace_dir / f"episode_{seed}.json").write_text(json.dumps(episode, indent=1))


def _failed_report(cell: Cell, seed: int, exc: BaseException) -> TrialReport:
    return TrialReport(algo=cell.algo, seed=seed, activated=cell.activated, w0=cell.w0, w1=cell.w1,
                       avg_power_reduction_db=None, avg_power_reduction_w=math.nan,
                       avg_power_offset_db=None, avg_interference_reduction_db=None,
                       avg_interference_reduction_w=math.nan, avg_interference_db=None,
                       avg_interference_w=math.nan, throughput_loss_total=math.nan,
                       weak_to_central=0, central_to_weak=0, iterations=0, converged=False,
                       error=f"{type(exc).__name__}: {exc}")


def _run_cell(config: ExperimentConfig, cell: Cell, trial_indices, trace_root: Optional[str]) -> list:
    """Trials of one cell, in order. Failures become error reports."""
    out = []
    qtable = None
    for i in trial_indices:
        seed = config.base_seed + i
        tdir = Path(trace_root) / cell.label / "traces" if trace_root and cell.algo == "sdql" else None
        try:
            report, q = run_trial(config, cell, seed,
                                  qtable if config.sdql.warm_start else None, tdir)
            qtable = q
        except Exception as exc:  # isolate the trial, keep the sweep going
            log.warning("trial %s seed %d failed: %s", cell.label, seed, exc)
            report = _failed_report(cell, seed, exc)
        out.append(report)
    return out


def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "off"
    return f"{x:.6f}"


def _mean(values) -> Optional[float]:
    vals = [float(v) for v in values if v is not None and not (isinstance(v, float) and math.isnan(v))]
    if not vals:
        return None
    return math.fsum(vals) / len(vals)


def aggregate(reports) -> dict:
    ok = [r for r in reports if r.error is None]
    agg = {name: _mean(getattr(r, attr) for r in ok) for name, attr in SUMMARY_ROWS}
    agg["failed_trials"] = float(len(reports) - len(ok))
    return agg


def summary_csv(cell_reports: dict) -> str:
    """Table-shaped summary: one row per metric, one column per cell."""
    labels = list(cell_reports)
    aggs = {lab: aggregate(cell_reports[lab]) for lab in labels}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric"] + labels)
    for name in [n for n, _ in SUMMARY_ROWS] + ["failed_trials"]:
        w.writerow([name] + [_fmt(aggs[lab][name]) for lab in labels])
    return buf.getvalue()


def cdf_csv(samples) -> str:
    x, p = empirical_cdf(samples)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "probability"])
    for xi, pi in zip(x, p):
        w.writerow([repr(float(xi)), repr(float(pi))])
    return buf.getvalue()


def write_cell(cell_dir: Path, reports: list) -> None:
    cell_dir.mkdir(parents=True, exist_ok=True)
    with open(cell_dir / "trials.jsonl", "w") as fh:
        for r in reports:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
    ok = [r for r in reports if r.error is None]
    for name in CDF_SAMPLES:
        pooled = [v for r in ok for v in r.samples.get(name, []) if math.isfinite(v)]
        if pooled:
            (cell_dir / f"cdf_{name}.csv").write_text(cdf_csv(pooled))
    its = [r.iterations for r in ok]
    if its:
        (cell_dir / "cdf_iterations.csv").write_text(cdf_csv(its))


def read_cell(cell_dir: Path) -> list:
    with open(Path(cell_dir) / "trials.jsonl") as fh:
        return [TrialReport.from_dict(json.loads(line)) for line in fh if line.strip()]


@dataclasses.dataclass
class RunResult:
    output_dir: Path
    cells: dict  # label -> list[TrialReport]
    failed: int

    @property
    def exit_status(self) -> int:
        return 0 if self.failed == 0 else 1


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> RunResult:
    """Run every (activated count x weight pair x algorithm) cell and write
    all artifacts under ``config.output_dir``."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = plan_cells(config)
    n_workers = resolve_workers(workers)
    trace_root = str(out / "cells") if config.save_traces else None

    # warm-started cells carry a Q-table across trials, so run them whole
    jobs = []
    for cell in cells:
        if cell.algo == "sdql" and config.sdql.warm_start:
            jobs.append((cell, range(config.trials)))
        else:
            jobs.extend((cell, range(i, i + 1)) for i in range(config.trials))

    if n_workers == 1:
        results = [_run_cell(config, cell, idx, trace_root) for cell, idx in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            futures = [pool.submit(_run_cell, config, cell, idx, trace_root) for cell, idx in jobs]
            results = [f.result() for f in futures]  # submission order, not completion order

    cell_reports = {c.label: [] for c in cells}
    for (cell, _), reps in zip(jobs, results):
        cell_reports[cell.label].extend(reps)

    for label, reps in cell_reports.items():
        write_cell(out / "cells" / label, reps)
    (out / "summary.csv").write_text(summary_csv(cell_reports))
    manifest = {
        "package_version": __version__,
        "config": config.model_dump(mode="json"),
        "config_sha256": config_hash(config),
        "cells": list(cell_reports),
        "created_unix": time.time(),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1))
    failed = sum(1 for reps in cell_reports.values() for r in reps if r.error is not None)
    return RunResult(out, cell_reports, failed)


def summarize(run_dirs, out_csv: Optional[Path] = None) -> str:
    """Rebuild the summary table from existing ``cells/*/trials.jsonl`` files.

    Cells keep manifest order when a manifest exists; trials from several
    directories with the same cell label are pooled.
    """
    cell_reports: dict = {}
    for d in run_dirs:
        d = Path(d)
        manifest = d / "manifest.json"
        if manifest.exists():
            labels = json.loads(manifest.read_text())["cells"]
        else:
            labels = sorted(p.name for p in (d / "cells").iterdir() if (p / "trials.jsonl").exists())
        for lab in labels:
            cell_reports.setdefault(lab, []).extend(read_cell(d / "cells" / lab))
    if not cell_reports:
        raise FileNotFoundError("no trial reports found")
    text = summary_csv(cell_reports)
    if out_csv is not None:
        Path(out_csv).write_text(text)
    return text


def replay(scenario_path, trace_path, episode_path=None, config: Optional[ExperimentConfig] = None) -> dict:
    """Re-run a saved episode and compare it step by step with its trace.

    Radio/hyperparameters and seed come from the episode JSON when given,
    otherwise from ``config`` and the scenario's own seed.
    """
    scenario = Scenario.from_json(Path(scenario_path).read_text())
    recorded = EpisodeTrace.steps_from_csv(Path(trace_path).read_text())
    if episode_path is not None:
        ep = json.loads(Path(episode_path).read_text())
        cfg = RadioConfig(**ep["radio"])
        hp = Hyperparams(**ep["hyperparams"])
        seed = ep["seed"]
    else:
        config = config or validate_config({})
        cfg = config.radio_config()
        w0, w1 = config.sweep[0]
        hp = config.hyperparams(w0, w1)
        seed = scenario.seed
    res = run_episode(scenario, cfg, hp, sdql_rng(seed))
    replayed = res.trace.steps
    mismatch = next((i for i, (a, b) in enumerate(zip(recorded, replayed)) if a != b), None)
    if mismatch is None and len(recorded) != len(replayed):
        mismatch = min(len(recorded), len(replayed))
    report = build_report("sdql", seed, res.initial, res.final, hp.w0, hp.w1,
                          res.trace.iterations, res.trace.converged)
    return {"matches": mismatch is None, "first_mismatch_step": mismatch,
            "recorded_steps": len(recorded), "replayed_steps": len(replayed),
            "report": report.to_dict()}
