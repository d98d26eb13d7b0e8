"""Link-budget radio model: unit conversions, channel gain, SINR, throughput,
desired power and power offset.

Powers cross module boundaries in dBW; every sum of powers is done in linear
watts. A switched-off transmitter is represented by the ``OFF`` sentinel,
which converts to exactly 0 W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np


class _Off:
    """Sentinel for a transmitter radiating 0 W."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "OFF"

    def __reduce__(self):
        return (_Off, ())


OFF = _Off()

PowerDbw = Union[float, _Off]


@dataclass(frozen=True)
class RadioConfig:
    p_max_dbw: float = 15.2
    noise_dbw: float = -125.0
    bandwidth_hz: float = 10e6
    tx_gain_dbi: float = 17.5
    center_freq_hz: float = 1.8e9
    speed_of_light_mps: float = 3e8
    pathloss_exponent: float = 1.0

    def __post_init__(self):
        if not self.p_max_dbw > self.noise_dbw:
            raise ValueError("p_max_dbw must exceed noise_dbw")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")
        if self.center_freq_hz <= 0:
            raise ValueError("center_freq_hz must be positive")
        if self.pathloss_exponent < 1:
            raise ValueError("pathloss_exponent must be >= 1")

    @property
    def p_max_w(self) -> float:
        return dbw_to_watt(self.p_max_dbw)

    @property
    def noise_w(self) -> float:
        return dbw_to_watt(self.noise_dbw)

    @property
    def power_floor_dbw(self) -> float:
        # numeric guard only; the offset window should stop reductions first
        return self.noise_dbw - 30.0


def is_off(p) -> bool:
    return p is OFF


def dbw_to_watt(p: PowerDbw) -> float:
    if p is OFF:
        return 0.0
    return 10.0 ** (p / 10.0)


def watt_to_dbw(p: float) -> PowerDbw:
    if p < 0:
        raise ValueError(f"power must be non-negative, got {p!r}")
    if p == 0:
        return OFF
    return 10.0 * math.log10(p)


def channel_gain(cfg: RadioConfig, distance_m):
    """Linear gain ``H_TX * (c / (4 pi f_c D)) ** exponent``.

    Accepts a scalar or an array of distances; all must be positive.
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise ValueError("distance must be positive and finite")
    h_tx = 10.0 ** (cfg.tx_gain_dbi / 10.0)
    ratio = cfg.speed_of_light_mps / (4.0 * math.pi * cfg.center_freq_hz * d)
    h = h_tx * ratio**cfg.pathloss_exponent
    if h.ndim == 0:
        return float(h)
    return h


def rsrp(p: PowerDbw, gain: float) -> tuple[float, PowerDbw]:
    """Received power ``P * H`` as (watts, dBW)."""
    w = dbw_to_watt(p) * gain
    return w, watt_to_dbw(w)


def sinr(
    serving: tuple[PowerDbw, float],
    interferers: Iterable[tuple[PowerDbw, float]],
    noise_w: float,
) -> float:
    """SINR of a UE from its serving (power, gain) and the (power, gain) of
    every interfering RRH towards that same UE."""
    if noise_w <= 0:
        raise ValueError("noise power must be positive")
    signal = dbw_to_watt(serving[0]) * serving[1]
    interference = math.fsum(dbw_to_watt(p) * g for p, g in interferers)
    return signal / (interference + noise_w)


def throughput(cfg: RadioConfig, gamma: float) -> float:
    if gamma < 0:
        raise ValueError("SINR must be non-negative")
    return cfg.bandwidth_hz * math.log2(1.0 + gamma)


def desired_sinr(cfg: RadioConfig, r_desired: float) -> float:
    if r_desired < 0:
        raise ValueError("desired rate must be non-negative")
    return math.expm1(r_desired / cfg.bandwidth_hz * math.log(2.0))


def desired_power_w(cfg: RadioConfig, gain: float, r_desired: float, interference_w: float) -> float:
    if gain <= 0:
        raise ValueError("serving gain must be positive")
    return desired_sinr(cfg, r_desired) * (interference_w + cfg.noise_w) / gain


def desired_power(cfg: RadioConfig, gain: float, r_desired: float, interference_w: float) -> PowerDbw:
    """Minimum serving power (dBW) meeting ``r_desired`` under the given
    interference; ``OFF`` when nothing is required."""
    return watt_to_dbw(desired_power_w(cfg, gain, r_desired, interference_w))


def power_offset(p_current: PowerDbw, p_desired: PowerDbw) -> float:
    """Headroom in dB between the current and the desired power.

    Negative values flag an under-served (weak) UE. A zero desired power
    gives ``+inf``; callers bound it through the action window.
    """
    if p_current is OFF:
        raise ValueError("offset is undefined for a switched-off RRH")
    if p_desired is OFF:
        return math.inf
    return p_current - p_desired
