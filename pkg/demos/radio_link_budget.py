"""
Link budget, SINR and the power offset
======================================

How much can a radio head back off before its user notices?
"""

import numpy as np

from cransim import radio
from cransim.radio import RadioConfig

cfg = RadioConfig()
print(f"P_max = {cfg.p_max_dbw} dBW = {cfg.p_max_w:.2f} W, noise = {cfg.noise_dbw} dBW")

# free-space gain with the transmit antenna gain folded in
d = np.array([10.0, 50.0, 100.0, 200.0, 400.0])
for di, h in zip(d, radio.channel_gain(cfg, d)):
    print(f"  {di:5.0f} m  H = {h:.3e}  RSRP at P_max = {radio.rsrp(cfg.p_max_dbw, h)[1]:7.2f} dBW")

# one user 80 m away, one interferer 180 m away, both at full power
h_own, h_int = radio.channel_gain(cfg, 80.0), radio.channel_gain(cfg, 180.0)
interference_w = cfg.p_max_w * h_int
gamma = radio.sinr((cfg.p_max_dbw, h_own), [(cfg.p_max_dbw, h_int)], cfg.noise_w)
print(f"\nSINR = {10 * np.log10(gamma):.2f} dB, rate = {radio.throughput(cfg, gamma) / 1e6:.2f} Mb/s")

# the user only asks for 1.5 Mb/s: the gap between P_max and the power that
# just delivers it is the offset the learner may cut
p_need = radio.desired_power(cfg, h_own, 1.5e6, interference_w)
offset = radio.power_offset(cfg.p_max_dbw, p_need)
print(f"desired power {p_need:.2f} dBW, offset {offset:.2f} dB")

cut = radio.sinr((cfg.p_max_dbw - offset, h_own), [(cfg.p_max_dbw, h_int)], cfg.noise_w)
print(f"after cutting the offset: {radio.throughput(cfg, cut) / 1e6:.6f} Mb/s")
