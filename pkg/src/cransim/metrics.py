"""Aggregate dB-domain statistics, satisfaction transitions, empirical CDFs
and the per-trial report."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import radio
from .network import NetworkState


class Level(NamedTuple):
    """A dB average with its linear argument; ``db`` is ``OFF`` when the
    linear value is zero."""

    db: radio.PowerDbw
    linear: float

    @classmethod
    def of(cls, linear: float) -> "Level":
        if linear < 0:
            # float residue from differences of equal powers
            linear = 0.0 if linear > -1e-12 else linear
        return cls(radio.watt_to_dbw(linear), linear)

    def db_or_none(self) -> Optional[float]:
        return None if self.db is radio.OFF else float(self.db)


def avg_power_reduction(power_w: Sequence[float], p_max_w: float) -> Level:
    p = np.asarray(power_w, dtype=float)
    if p.size == 0:
        raise ValueError("need at least one RRH")
    return Level.of(math.fsum(p_max_w - p) / p.size)


def avg_power_offset(offsets_db: Sequence[float]) -> Level:
    """Log of the mean linear offset over finite entries."""
    o = np.asarray(offsets_db, dtype=float)
    o = o[np.isfinite(o)]
    if o.size == 0:
        raise ValueError("no finite offsets")
    return Level.of(math.fsum(10.0 ** (o / 10.0)) / o.size)


def _interferer_sum(terms: np.ndarray, serving: np.ndarray, active: np.ndarray) -> float:
    # for each served UE: sum of terms over the other serving RRHs;
    # averaged over UEs, ready to be normalised by B
    servers = np.zeros(len(terms), dtype=bool)
    servers[serving] = True
    servers &= active
    total = math.fsum(terms[servers])
    per_ue = [total - (terms[b] if servers[b] else 0.0) for b in serving]
    return math.fsum(per_ue) / len(serving)


def avg_interference_reduction(power_w: Sequence[float], p_max_w: float,
                               serving: Sequence[int], active: Sequence[bool]) -> Level:
    """Average over served UEs of the power cut at every other serving RRH,
    divided by the RRH count B."""
    p = np.asarray(power_w, dtype=float)
    s = np.asarray(serving, dtype=int)
    if p.size == 0 or s.size == 0:
        raise ValueError("need RRHs and served UEs")
    return Level.of(_interferer_sum(p_max_w - p, s, np.asarray(active, dtype=bool)) / p.size)


def avg_interference(power_w: Sequence[float], serving: Sequence[int], active: Sequence[bool]) -> Level:
    p = np.asarray(power_w, dtype=float)
    s = np.asarray(serving, dtype=int)
    if p.size == 0 or s.size == 0:
        raise ValueError("need RRHs and served UEs")
    return Level.of(_interferer_sum(p, s, np.asarray(active, dtype=bool)) / p.size)


def satisfaction_transitions(r_before: Sequence[float], r_after: Sequence[float],
                             r_desired: Sequence[float], rtol: float = 1e-9) -> tuple[int, int]:
    """(weak -> central, central -> weak) counts between two snapshots."""
    before = np.asarray(r_before, dtype=float)
    after = np.asarray(r_after, dtype=float)
    need = np.asarray(r_desired, dtype=float) * (1.0 - rtol)
    if not before.shape == after.shape == need.shape:
        raise ValueError("snapshots must cover the same UEs")
    central0, central1 = before >= need, after >= need
    return int(np.sum(~central0 & central1)), int(np.sum(central0 & ~central1))


def empirical_cdf(samples: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("empirical CDF of an empty sample")
    return x, np.arange(1, x.size + 1) / x.size


def _db(level: Level) -> Optional[float]:
    return level.db_or_none()


@dataclass
class TrialReport:
    algo: str
    seed: int
    activated: int
    w0: Optional[float]
    w1: Optional[float]
    avg_power_reduction_db: Optional[float]
    avg_power_reduction_w: float
    avg_power_offset_db: Optional[float]
    avg_interference_reduction_db: Optional[float]
    avg_interference_reduction_w: float
    avg_interference_db: Optional[float]
    avg_interference_w: float
    throughput_loss_total: float  # Mb/s, network sum
    weak_to_central: int
    central_to_weak: int
    iterations: int
    converged: bool
    samples: dict = field(default_factory=dict)
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "TrialReport":
        return cls(**doc)


def build_report(algo: str, seed: int, initial: NetworkState, final: NetworkState,
                 w0: Optional[float] = None, w1: Optional[float] = None,
                 iterations: int = 0, converged: bool = True) -> TrialReport:
    """Summarise an episode (or a baseline power pattern) against the
    full-power starting point of the same scenario.

    The power offset reported for each served RRH is its full-power headroom
    at the final interference, i.e. how far below ``P_max`` it could go.
    """
    cfg = final.cfg
    p_max_w = cfg.p_max_w
    r0, r1 = initial.throughputs(), final.throughputs()
    w2c, c2w = satisfaction_transitions(r0, r1, final.desired_rates)
    headroom = np.array([final.headroom_db(u) for u in range(final.ue_count)])
    pr = avg_power_reduction(final.power_w, p_max_w)
    ir = avg_interference_reduction(final.power_w, p_max_w, final.serving, final.active)
    ai = avg_interference(final.radiated_w(), final.serving, final.active)
    i0, i1 = initial.interference_profile(), final.interference_profile()
    served_power = final.power_w[final.serving]
    samples = {
        "power_offset_db": headroom.tolist(),
        "power_reduction_db": (cfg.p_max_dbw - 10.0 * np.log10(np.maximum(served_power, 1e-300))).tolist(),
        "interference_reduction_db": (10.0 * np.log10(i0 / np.maximum(i1, 1e-300))).tolist()
        if np.all(i0 > 0) else [],
        "throughput_loss_mbps": ((r0 - r1) / 1e6).tolist(),
    }
    return TrialReport(
        algo=algo, seed=int(seed), activated=int(final.active.sum()), w0=w0, w1=w1,
        avg_power_reduction_db=_db(pr), avg_power_reduction_w=pr.linear,
        avg_power_offset_db=_db(avg_power_offset(headroom)),
        avg_interference_reduction_db=_db(ir), avg_interference_reduction_w=ir.linear,
        avg_interference_db=_db(ai), avg_interference_w=ai.linear,
        throughput_loss_total=float(np.sum(r0 - r1) / 1e6),
        weak_to_central=w2c, central_to_weak=c2w,
        iterations=int(iterations), converged=bool(converged), samples=samples,
    )
