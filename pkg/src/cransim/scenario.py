"""Reproducible network instances: hexagonal RRH layout, activation pattern,
UE drops, desired rates and max-RSRP association."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .radio import RadioConfig, channel_gain

MIN_UE_DISTANCE_M = 10.0
MAX_REDRAWS = 100

# axial-coordinate steps walked around a hex ring
_HEX_DIRECTIONS = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)]


class AssociationError(RuntimeError):
    """Raised when UEs cannot be matched one-to-one with activated RRHs."""


@dataclass(frozen=True)
class Topology:
    rrh_positions: np.ndarray  # (B, 2) metres
    inter_site_distance_m: float

    @property
    def b_count(self) -> int:
        return len(self.rrh_positions)


@dataclass(frozen=True)
class RateProfile:
    """Discrete distribution of desired rates in bit/s."""

    values_bps: tuple = (0.5e6, 1.0e6, 1.5e6, 2.0e6)
    weights: Optional[tuple] = None

    def __post_init__(self):
        if not self.values_bps or min(self.values_bps) <= 0:
            raise ValueError("rate profile needs positive support")
        if self.weights is not None:
            if len(self.weights) != len(self.values_bps) or min(self.weights) < 0 or sum(self.weights) <= 0:
                raise ValueError("rate profile weights must be non-negative and match values")

    def probabilities(self) -> Optional[np.ndarray]:
        if self.weights is None:
            return None
        w = np.asarray(self.weights, dtype=float)
        return w / w.sum()


@dataclass
class Scenario:
    topology: Topology
    activated: np.ndarray  # sorted RRH indices, one served UE each
    ue_positions: np.ndarray  # (U, 2)
    desired_rates: np.ndarray  # (U,) bit/s
    association: np.ndarray  # (U,) serving RRH index
    seed: Optional[int] = None
    _gain_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def ue_count(self) -> int:
        return len(self.ue_positions)

    def distances(self) -> np.ndarray:
        """(B, U) RRH-to-UE distances."""
        diff = self.topology.rrh_positions[:, None, :] - self.ue_positions[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])

    def gains(self, cfg: RadioConfig) -> np.ndarray:
        """(B, U) linear channel gains, cached per radio config."""
        if cfg not in self._gain_cache:
            self._gain_cache[cfg] = channel_gain(cfg, self.distances())
        return self._gain_cache[cfg]

    def active_mask(self) -> np.ndarray:
        mask = np.zeros(self.topology.b_count, dtype=bool)
        mask[self.activated] = True
        return mask

    def to_dict(self) -> dict:
        return {
            "inter_site_distance_m": self.topology.inter_site_distance_m,
            "rrh_positions": self.topology.rrh_positions.tolist(),
            "activated": [int(b) for b in self.activated],
            "ue_positions": self.ue_positions.tolist(),
            "desired_rates_bps": [float(r) for r in self.desired_rates],
            "association": [int(b) for b in self.association],
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Scenario":
        topo = Topology(np.asarray(doc["rrh_positions"], dtype=float).reshape(-1, 2),
                        float(doc["inter_site_distance_m"]))
        return cls(
            topology=topo,
            activated=np.asarray(doc["activated"], dtype=int),
            ue_positions=np.asarray(doc["ue_positions"], dtype=float).reshape(-1, 2),
            desired_rates=np.asarray(doc["desired_rates_bps"], dtype=float),
            association=np.asarray(doc["association"], dtype=int),
            seed=doc.get("seed"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))


def _hex_axial_sites(count: int):
    yield (0, 0)
    produced, radius = 1, 1
    while produced < count:
        q, r = -radius, radius  # start corner of the ring
        for dq, dr in _HEX_DIRECTIONS:
            for _ in range(radius):
                yield (q, r)
                produced += 1
                if produced >= count:
                    return
                q, r = q + dq, r + dr
        radius += 1


def build_topology(b_count: int, inter_site_distance_m: float) -> Topology:
    """Hexagonal lattice filled ring by ring from the origin."""
    if b_count < 1:
        raise ValueError("need at least one RRH")
    if inter_site_distance_m <= 0:
        raise ValueError("inter-site distance must be positive")
    d = float(inter_site_distance_m)
    pos = [(d * (q + r / 2.0), d * (math.sqrt(3.0) / 2.0) * r)
           for q, r in _hex_axial_sites(b_count)]
    return Topology(np.asarray(pos[:b_count], dtype=float), d)


def choose_activated(b_count: int, n_active: int, rng: np.random.Generator) -> np.ndarray:
    if not 1 <= n_active <= b_count:
        raise ValueError(f"activated count {n_active} outside [1, {b_count}]")
    return np.sort(rng.choice(b_count, size=n_active, replace=False))


def place_ues(topology: Topology, activated: Sequence[int], rng: np.random.Generator) -> np.ndarray:
    """One UE per activated RRH, uniform over the annulus
    [MIN_UE_DISTANCE_M, D/2] around it."""
    activated = np.asarray(activated, dtype=int)
    if activated.size == 0:
        raise ValueError("no activated RRHs")
    r_max = topology.inter_site_distance_m / 2.0
    r_min = min(MIN_UE_DISTANCE_M, r_max)
    radius = np.sqrt(rng.uniform(r_min**2, r_max**2, size=activated.size))
    angle = rng.uniform(0.0, 2.0 * math.pi, size=activated.size)
    centres = topology.rrh_positions[activated]
    return centres + np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])


def assign_desired_rates(ue_count: int, rng: np.random.Generator, profile: RateProfile = RateProfile()) -> np.ndarray:
    values = np.asarray(profile.values_bps, dtype=float)
    return rng.choice(values, size=ue_count, p=profile.probabilities())


def associate(gains: np.ndarray, activated: Sequence[int], p_max_w: float = 1.0) -> np.ndarray:
    """Serving RRH per UE: the activated RRH with maximal RSRP when every
    activated RRH transmits at full power. Ties go to the lowest index."""
    activated = np.sort(np.asarray(activated, dtype=int))
    rsrp = p_max_w * gains[activated, :]
    return activated[np.argmax(rsrp, axis=0)]


def build_scenario(
    cfg: RadioConfig,
    b_count: int,
    inter_site_distance_m: float,
    n_active: int,
    seed: int,
    profile: RateProfile = RateProfile(),
    topology: Optional[Topology] = None,
) -> Scenario:
    """Draw a scenario whose association is a bijection onto the activated set.

    Redraws the UE drop up to ``MAX_REDRAWS`` times before giving up.
    """
    rng = np.random.default_rng(seed)
    topo = topology if topology is not None else build_topology(b_count, inter_site_distance_m)
    activated = choose_activated(topo.b_count, n_active, rng)
    rates = assign_desired_rates(n_active, rng, profile)
    for _ in range(MAX_REDRAWS):
        ues = place_ues(topo, activated, rng)
        sc = Scenario(topo, activated, ues, rates, np.zeros(n_active, dtype=int), seed)
        serving = associate(sc.gains(cfg), activated, cfg.p_max_w)
        if len(np.unique(serving)) == n_active:
            sc.association = serving
            return sc
    raise AssociationError(f"no one-to-one association after {MAX_REDRAWS} UE drops")
