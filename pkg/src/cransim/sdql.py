"""Static deep Q-learning: one Q-table per UE over quantized RSRP states and
windowed integer-dB power reductions, driven by the episode loop in
``run_episode``."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import radio
from .network import NetworkState
from .radio import RadioConfig
from .scenario import Scenario

# offsets within this many dB below an integer still admit that integer step
ACTION_TOL_DB = 1e-9


@dataclass(frozen=True)
class Hyperparams:
    alpha: float = 0.1
    lam: float = 0.9
    epsilon: float = 0.1
    w0: float = 0.5
    w1: float = 0.5
    max_iterations: int = 100
    convergence_window: int = 10
    window_len: int = 10
    state_bound: int = 150
    gamma_tolerance: float = 1e-9

    def __post_init__(self):
        if self.w0 < 0 or self.w1 < 0 or not math.isclose(self.w0 + self.w1, 1.0, abs_tol=1e-9):
            raise ValueError("reward weights must be non-negative and sum to 1")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("discount factor must lie in [0, 1]")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("exploration rate must lie in [0, 1)")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("learning rate must lie in [0, 1]")
        if self.window_len < 1 or self.state_bound < 1:
            raise ValueError("window length and state bound must be >= 1")
        if self.max_iterations < 1 or self.convergence_window < 1:
            raise ValueError("iteration limits must be >= 1")


def quantize_state(rsrp_dbw: radio.PowerDbw, bound: int) -> int:
    if rsrp_dbw is radio.OFF:
        return -bound
    return int(min(max(math.floor(rsrp_dbw), -bound), bound))


def available_actions(offset_db: float, window: int) -> list[int]:
    """Integer reductions allowed by the current offset, capped by the window."""
    if offset_db <= 0:
        return [0]
    if math.isinf(offset_db) or offset_db > window:
        return list(range(window + 1))
    return list(range(min(int(math.floor(offset_db + ACTION_TOL_DB)), window) + 1))


def select_action(q_row: np.ndarray, actions: Sequence[int], epsilon: float,
                  rng: np.random.Generator) -> int:
    """Epsilon-greedy pick among ``actions`` using the Q-values in ``q_row``.

    Ties in the greedy branch go to the largest reduction.
    """
    if not actions:
        raise ValueError("empty action set")
    explore = rng.random() < epsilon
    if explore:
        return int(actions[int(rng.integers(len(actions)))])
    values = q_row[list(actions)]
    best = np.flatnonzero(values == values.max())
    return int(actions[best[-1]])


def transition_probability(epsilon: float, action_set_size: int) -> float:
    """Printed transition-probability expression; diagnostics only."""
    if action_set_size < 1:
        raise ValueError("action set must be non-empty")
    return (epsilon * (1.0 / action_set_size)) * (1.0 - epsilon)


def reward(delta_p_db: float, delta_r_mbps: float, w0: float, w1: float) -> float:
    return w0 * delta_p_db - w1 * delta_r_mbps


def q_update(table: np.ndarray, state: int, action: int, q: float, next_state: int,
             next_actions: Sequence[int], alpha: float, lam: float, bound: int) -> np.ndarray:
    """One-step Q-learning backup on a single cell, in place."""
    s, s2 = state + bound, next_state + bound
    target = q + lam * float(np.max(table[s2, list(next_actions)]))
    table[s, action] += alpha * (target - table[s, action])
    return table


class DeepQTable:
    """Per-UE Q-tables sharing the state range [-H, H] and actions [0, window]."""

    def __init__(self, ue_count: int, state_bound: int, window_len: int):
        self.state_bound = state_bound
        self.window_len = window_len
        self.tables = np.zeros((ue_count, 2 * state_bound + 1, window_len + 1))

    @classmethod
    def for_hyperparams(cls, ue_count: int, hp: Hyperparams) -> "DeepQTable":
        return cls(ue_count, hp.state_bound, hp.window_len)

    def __len__(self) -> int:
        return len(self.tables)

    def row(self, u: int, state: int) -> np.ndarray:
        return self.tables[u, state + self.state_bound]

    def to_json(self) -> str:
        # sparse dump: only touched cells
        u, s, a = np.nonzero(self.tables)
        cells = [[int(i), int(j) - self.state_bound, int(k), float(self.tables[i, j, k])]
                 for i, j, k in zip(u, s, a)]
        return json.dumps({"ue_count": len(self), "state_bound": self.state_bound,
                           "window_len": self.window_len, "cells": cells})

    @classmethod
    def from_json(cls, text: str) -> "DeepQTable":
        doc = json.loads(text)
        dq = cls(doc["ue_count"], doc["state_bound"], doc["window_len"])
        for u, s, a, v in doc["cells"]:
            dq.tables[u, s + dq.state_bound, a] = v
        return dq


@dataclass
class StepRecord:
    k: int
    u: int
    offset_db: float
    action: int
    delta_r_mbps: float
    reward: float
    state: int
    next_state: int


TRACE_FIELDS = [f for f in StepRecord.__dataclass_fields__]


@dataclass
class EpisodeTrace:
    steps: list = field(default_factory=list)
    gammas: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    floor_hits: int = 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_FIELDS)
        for st in self.steps:
            w.writerow([repr(v) if isinstance(v, float) else v for v in asdict(st).values()])
        return buf.getvalue()

    @staticmethod
    def steps_from_csv(text: str) -> list:
        rows = csv.DictReader(io.StringIO(text))
        out = []
        for r in rows:
            out.append(StepRecord(int(r["k"]), int(r["u"]), float(r["offset_db"]), int(r["action"]),
                                  float(r["delta_r_mbps"]), float(r["reward"]),
                                  int(r["state"]), int(r["next_state"])))
        return out

    def summary(self) -> dict:
        return {"iterations": self.iterations, "converged": self.converged,
                "floor_hits": self.floor_hits, "gammas": self.gammas}


@dataclass
class EpisodeResult:
    trace: EpisodeTrace
    initial: NetworkState
    final: NetworkState
    qtable: DeepQTable


def _floor_limited(actions, p_dbw, floor_dbw, trace=None):
    """Drop reductions that would push a transmitter below the numeric floor."""
    room = math.floor(p_dbw - floor_dbw + ACTION_TOL_DB)
    if actions[-1] <= room:
        return actions
    if trace is not None:
        trace.floor_hits += 1
    return actions[: max(room, 0) + 1]


def run_episode(
    scenario: Scenario,
    cfg: RadioConfig,
    hp: Hyperparams,
    rng: np.random.Generator,
    deep_qtable: Optional[DeepQTable] = None,
    initial: Optional[NetworkState] = None,
) -> EpisodeResult:
    """Run one optimisation epoch from full power until the summed reward has
    stayed at zero for ``convergence_window`` consecutive iterations or
    ``max_iterations`` is reached.

    UEs act sequentially within an iteration: each one sees the powers
    already reduced by the UEs before it.
    """
    state = initial.copy() if initial is not None else NetworkState.full_power(scenario, cfg)
    start = state.copy()
    n_ue = state.ue_count
    dq = deep_qtable if deep_qtable is not None else DeepQTable.for_hyperparams(n_ue, hp)
    if len(dq) != n_ue or dq.state_bound != hp.state_bound or dq.window_len != hp.window_len:
        raise ValueError("deep Q-table shape does not match the scenario/hyperparameters")

    bound = hp.state_bound
    floor_dbw = cfg.power_floor_dbw
    trace = EpisodeTrace()
    zero_run = 0
    for k in range(1, hp.max_iterations + 1):
        gamma_sum = 0.0
        for u in range(n_ue):
            b = int(state.serving[u])
            offset = state.offset_db(u)
            actions = _floor_limited(available_actions(offset, hp.window_len),
                                     state.power_dbw(b), floor_dbw, trace)
            s = quantize_state(state.rsrp_dbw(u), bound)
            table = dq.tables[u]
            a = select_action(table[s + bound], actions, hp.epsilon, rng)

            r_before = state.throughput(u)
            if a > 0:
                state.set_power_dbw(b, state.power_dbw(b) - a)
            r_after = state.throughput(u)
            delta_r = (r_before - r_after) / 1e6
            q = reward(a, delta_r, hp.w0, hp.w1)

            s_next = quantize_state(state.rsrp_dbw(u), bound)
            next_actions = _floor_limited(available_actions(state.offset_db(u), hp.window_len),
                                          state.power_dbw(b), floor_dbw)
            q_update(table, s, a, q, s_next, next_actions, hp.alpha, hp.lam, bound)

            trace.steps.append(StepRecord(k, u, offset, a, delta_r, q, s, s_next))
            gamma_sum += q

        trace.gammas.append(gamma_sum)
        trace.iterations = k
        zero_run = zero_run + 1 if abs(gamma_sum) <= hp.gamma_tolerance else 0
        if zero_run >= hp.convergence_window:
            trace.converged = True
            break

    return EpisodeResult(trace, start, state, dq)
