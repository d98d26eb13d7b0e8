"""Per-RRH downlink powers plus link gains; evaluates SINR, throughput and
power offsets for every served UE."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import radio
from .radio import RadioConfig
from .scenario import Scenario

# relative slack when comparing a rate against its demand; absorbs float
# noise from reductions that land exactly on the desired power
SATISFACTION_RTOL = 1e-9


@dataclass
class NetworkState:
    cfg: RadioConfig
    power_w: np.ndarray  # (B,) consumed/transmit power per RRH, 0 = OFF
    active: np.ndarray  # (B,) bool, only active RRHs radiate data
    gains: np.ndarray  # (B, U)
    serving: np.ndarray  # (U,)
    desired_rates: np.ndarray  # (U,) bit/s

    @classmethod
    def full_power(cls, scenario: Scenario, cfg: RadioConfig) -> "NetworkState":
        """Activated RRHs at P_max, the rest OFF."""
        active = scenario.active_mask()
        power = np.where(active, cfg.p_max_w, 0.0)
        return cls(cfg, power, active, scenario.gains(cfg), scenario.association.copy(),
                   scenario.desired_rates.astype(float))

    def copy(self) -> "NetworkState":
        return NetworkState(self.cfg, self.power_w.copy(), self.active.copy(), self.gains,
                            self.serving.copy(), self.desired_rates.copy())

    @property
    def ue_count(self) -> int:
        return len(self.serving)

    def radiated_w(self) -> np.ndarray:
        return np.where(self.active, self.power_w, 0.0)

    def power_dbw(self, b: int) -> radio.PowerDbw:
        return radio.watt_to_dbw(float(self.power_w[b]))

    def set_power_dbw(self, b: int, p: radio.PowerDbw) -> None:
        self.power_w[b] = radio.dbw_to_watt(p)

    def signal_w(self, u: int) -> float:
        b = self.serving[u]
        return float(self.radiated_w()[b] * self.gains[b, u])

    def interference_w(self, u: int) -> float:
        """Sum over every other radiating RRH of its power times its gain
        towards UE ``u``."""
        p = self.radiated_w()
        p[self.serving[u]] = 0.0
        return float(p @ self.gains[:, u])

    def sinr(self, u: int) -> float:
        return self.signal_w(u) / (self.interference_w(u) + self.cfg.noise_w)

    def throughput(self, u: int) -> float:
        return radio.throughput(self.cfg, self.sinr(u))

    def rsrp_dbw(self, u: int) -> radio.PowerDbw:
        return radio.watt_to_dbw(self.signal_w(u))

    def desired_power(self, u: int) -> radio.PowerDbw:
        b = self.serving[u]
        return radio.desired_power(self.cfg, float(self.gains[b, u]), float(self.desired_rates[u]),
                                   self.interference_w(u))

    def offset_db(self, u: int) -> float:
        return radio.power_offset(self.power_dbw(self.serving[u]), self.desired_power(u))

    def headroom_db(self, u: int) -> float:
        """Offset of a full-power transmitter at the current interference."""
        return radio.power_offset(self.cfg.p_max_dbw, self.desired_power(u))

    def throughputs(self) -> np.ndarray:
        return np.array([self.throughput(u) for u in range(self.ue_count)])

    def offsets_db(self) -> np.ndarray:
        return np.array([self.offset_db(u) for u in range(self.ue_count)])

    def interference_profile(self) -> np.ndarray:
        return np.array([self.interference_w(u) for u in range(self.ue_count)])

    def satisfied(self) -> np.ndarray:
        """True where the UE is central (rate meets demand)."""
        r = self.throughputs()
        return r >= self.desired_rates * (1.0 - SATISFACTION_RTOL)

    def total_power_w(self) -> float:
        return math.fsum(self.power_w)
