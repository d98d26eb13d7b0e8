"""Reference power-state policies over the same activation pattern SDQL uses.

Both keep activated RRHs at full power. The activation scheme switches every
other RRH off; the sleep scheme parks them at a residual sleep power. A
dormant RRH serves nobody and does not radiate into the data band, so both
schemes deliver the same throughput.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import radio
from .network import NetworkState
from .radio import RadioConfig
from .scenario import Scenario


@dataclass(frozen=True)
class BaselineConfig:
    # None means P_max - 10 dB for whichever radio config is in use
    sleep_power_dbw: Optional[radio.PowerDbw] = None

    def resolve(self, cfg: RadioConfig) -> radio.PowerDbw:
        p = cfg.p_max_dbw - 10.0 if self.sleep_power_dbw is None else self.sleep_power_dbw
        if p is not radio.OFF and p > cfg.p_max_dbw:
            raise ValueError("sleep power cannot exceed P_max")
        return p


def activation_scheme(scenario: Scenario, cfg: RadioConfig) -> NetworkState:
    return NetworkState.full_power(scenario, cfg)


def sleep_scheme(scenario: Scenario, cfg: RadioConfig, baseline: BaselineConfig = BaselineConfig()) -> NetworkState:
    state = NetworkState.full_power(scenario, cfg)
    sleep_w = radio.dbw_to_watt(baseline.resolve(cfg))
    state.power_w = np.where(state.active, state.power_w, sleep_w)
    return state
