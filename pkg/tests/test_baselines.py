import numpy as np
import pytest

from cransim import radio
from cransim.baselines import BaselineConfig, activation_scheme, sleep_scheme
from cransim.metrics import avg_power_reduction
from cransim.radio import OFF, RadioConfig
from cransim.scenario import build_scenario

CFG = RadioConfig()


def test_activation_two_rrh_one_active():
    sc = build_scenario(CFG, 2, 200.0, 1, seed=0)
    st = activation_scheme(sc, CFG)
    on = int(sc.activated[0])
    assert st.power_dbw(on) == pytest.approx(CFG.p_max_dbw)
    assert st.power_dbw(1 - on) is OFF


def test_activation_k11_has_46_off():
    st = activation_scheme(build_scenario(CFG, 57, 200.0, 11, seed=3), CFG)
    assert int(np.sum(st.power_w == 0.0)) == 46
    assert int(np.sum(st.power_w == CFG.p_max_w)) == 11


def test_sleep_default_power_and_reduction():
    sc = build_scenario(CFG, 57, 200.0, 11, seed=3)
    st = sleep_scheme(sc, CFG)
    dormant = ~st.active
    np.testing.assert_allclose(st.power_w[dormant], radio.dbw_to_watt(CFG.p_max_dbw - 10.0))
    # each dormant RRH saves 0.9 P_max
    lvl = avg_power_reduction(st.power_w, CFG.p_max_w)
    assert lvl.linear == pytest.approx(46 * 0.9 * CFG.p_max_w / 57, rel=1e-12)


def test_sleep_extremes():
    sc = build_scenario(CFG, 57, 200.0, 17, seed=1)
    at_max = sleep_scheme(sc, CFG, BaselineConfig(CFG.p_max_dbw))
    assert avg_power_reduction(at_max.power_w, CFG.p_max_w).db is OFF
    off = sleep_scheme(sc, CFG, BaselineConfig(OFF))
    np.testing.assert_array_equal(off.power_w, activation_scheme(sc, CFG).power_w)
    with pytest.raises(ValueError):
        sleep_scheme(sc, CFG, BaselineConfig(CFG.p_max_dbw + 1.0))


@pytest.mark.parametrize("seed", range(10))
def test_activation_saves_more_with_same_throughput(seed):
    sc = build_scenario(CFG, 57, 200.0, 22, seed)
    act, slp = activation_scheme(sc, CFG), sleep_scheme(sc, CFG)
    assert (avg_power_reduction(act.power_w, CFG.p_max_w).linear
            > avg_power_reduction(slp.power_w, CFG.p_max_w).linear)
    np.testing.assert_array_equal(act.throughputs(), slp.throughputs())
