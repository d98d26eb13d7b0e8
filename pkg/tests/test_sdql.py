import math

import numpy as np
import pytest

from builders import all_weak, single_link
from cransim.network import NetworkState
from cransim.radio import OFF, RadioConfig
from cransim.scenario import build_scenario
from cransim.sdql import (
    ACTION_TOL_DB,
    DeepQTable,
    EpisodeTrace,
    Hyperparams,
    available_actions,
    q_update,
    quantize_state,
    reward,
    run_episode,
    select_action,
    transition_probability,
)

CFG = RadioConfig()


def test_hyperparam_defaults_and_validation():
    hp = Hyperparams()
    assert (hp.alpha, hp.lam, hp.epsilon, hp.max_iterations, hp.convergence_window) == (0.1, 0.9, 0.1, 100, 10)
    for bad in [dict(w0=0.6, w1=0.6), dict(w0=-0.1, w1=1.1), dict(lam=1.5), dict(epsilon=1.0),
                dict(alpha=2.0), dict(window_len=0)]:
        with pytest.raises(ValueError):
            Hyperparams(**bad)


@pytest.mark.parametrize("rsrp, bound, state", [
    (-23.7, 150, -24), (500.0, 150, 150), (-9.0, 150, -9), (-900.0, 150, -150), (OFF, 150, -150),
])
def test_quantize_state(rsrp, bound, state):
    assert quantize_state(rsrp, bound) == state


@pytest.mark.parametrize("offset, window, actions", [
    (-3.2, 5, [0]),
    (0.0, 5, [0]),
    (2.7, 5, [0, 1, 2]),
    (9.0, 5, [0, 1, 2, 3, 4, 5]),
    (5.0, 5, [0, 1, 2, 3, 4, 5]),
    (math.inf, 3, [0, 1, 2, 3]),
    (0.4, 5, [0]),
    (3.0 - ACTION_TOL_DB / 10, 5, [0, 1, 2, 3]),
])
def test_available_actions(offset, window, actions):
    assert available_actions(offset, window) == actions


def test_select_action_singleton_and_greedy():
    rng = np.random.default_rng(0)
    assert all(select_action(np.zeros(6), [0], 0.9, rng) == 0 for _ in range(100))
    row = np.array([0.1, 0.5, 0.3, 9.0])
    assert select_action(row, [0, 1, 2], 0.0, rng) == 1


def test_select_action_ties_take_largest():
    assert select_action(np.zeros(6), [0, 1, 2, 3], 0.0, np.random.default_rng(0)) == 3


def test_select_action_uniform_exploration():
    rng = np.random.default_rng(123)
    n = 30_000
    draws = np.array([select_action(np.zeros(3), [0, 1, 2], 1.0, rng) for _ in range(n)])
    freq = np.bincount(draws, minlength=3) / n
    # binomial sd at n=3e4 is ~0.0027; 0.02 is > 7 sd
    np.testing.assert_allclose(freq, 1 / 3, atol=0.02)


@pytest.mark.parametrize("eps, size, p", [(0.1, 5, 0.018), (0.1, 1, 0.09), (0.5, 2, 0.125)])
def test_transition_probability(eps, size, p):
    assert transition_probability(eps, size) == pytest.approx(p)


@pytest.mark.parametrize("dp, dr, w0, w1, q", [
    (0, 0, 0.5, 0.5, 0.0), (2, 0, 0.5, 0.5, 1.0), (3, 5, 1.0, 0.0, 3.0), (1, 4, 0.5, 0.5, -1.5),
])
def test_reward(dp, dr, w0, w1, q):
    assert reward(dp, dr, w0, w1) == pytest.approx(q)


def test_q_update_examples():
    bound = 5
    t = np.zeros((11, 4))
    q_update(t, 0, 1, 1.0, -1, [0, 1], 0.1, 0.9, bound)
    assert t[5, 1] == pytest.approx(0.1)
    assert np.count_nonzero(t) == 1

    t = np.zeros((11, 4))
    t[5, 2] = 1.0
    t[4, 3] = 2.0
    q_update(t, 0, 2, 0.5, -1, [0, 1, 2, 3], 0.1, 0.9, bound)
    assert t[5, 2] == pytest.approx(1.13)

    t = np.random.default_rng(0).normal(size=(11, 4))
    before = t.copy()
    q_update(t, 2, 3, 4.0, 1, [0, 1], 0.0, 0.9, bound)
    np.testing.assert_array_equal(t, before)


def test_q_update_max_restricted_to_next_actions():
    t = np.zeros((3, 3))
    t[0, 2] = 100.0  # not admissible next
    q_update(t, 1, 0, 0.0, -1, [0, 1], 1.0, 1.0, 1)
    assert t[2, 0] == 0.0


def test_deep_qtable_shape_and_json():
    dq = DeepQTable(4, 150, 5)
    assert dq.tables.shape == (4, 301, 6)
    dq.tables[2, 10, 3] = -1.25
    dq.row(1, -150)[0] = 7.0
    back = DeepQTable.from_json(dq.to_json())
    np.testing.assert_array_equal(back.tables, dq.tables)


def test_all_weak_terminates_after_window():
    sc = all_weak(build_scenario(CFG, 57, 200.0, 11, seed=1))
    res = run_episode(sc, CFG, Hyperparams(), np.random.default_rng(0))
    assert res.trace.iterations == 10 and res.trace.converged
    assert all(s.action == 0 for s in res.trace.steps)
    assert all(g == 0.0 for g in res.trace.gammas)
    np.testing.assert_array_equal(res.final.power_w, res.initial.power_w)


def test_single_link_offset_chase():
    hp = Hyperparams(epsilon=0.0, window_len=5)
    sc = single_link(CFG, 13.0)
    res = run_episode(sc, CFG, hp, np.random.default_rng(0))
    actions = [s.action for s in res.trace.steps]
    assert actions[:3] == [5, 5, 3] and not any(actions[3:])
    assert res.final.power_dbw(0) == pytest.approx(CFG.p_max_dbw - 13.0, abs=1e-9)
    assert res.final.throughput(0) == pytest.approx(sc.desired_rates[0], rel=1e-9)
    assert res.trace.iterations == 13


def test_single_link_weight_invariance_of_actions():
    sc = single_link(CFG, 27.4)
    seqs = set()
    for w0 in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0]:
        hp = Hyperparams(epsilon=0.0, w0=w0, w1=1 - w0, window_len=5)
        res = run_episode(sc, CFG, hp, np.random.default_rng(0))
        seqs.add(tuple(s.action for s in res.trace.steps))
    assert len(seqs) == 1


def _random_episode(seed, k=11, hp=Hyperparams()):
    sc = build_scenario(CFG, 57, 200.0, k, seed)
    return sc, run_episode(sc, CFG, hp, np.random.default_rng(seed))


@pytest.mark.parametrize("seed", range(8))
def test_episode_trace_invariants(seed):
    hp = Hyperparams()
    sc, res = _random_episode(seed, hp=hp)
    tr = res.trace
    assert 1 <= tr.iterations <= hp.max_iterations
    assert len(tr.gammas) == tr.iterations
    assert len(tr.steps) == tr.iterations * sc.ue_count
    for st in tr.steps:
        bound = 0 if st.offset_db <= 0 else min(hp.window_len, math.floor(st.offset_db + 1e-9))
        assert 0 <= st.action <= bound
        assert st.reward == hp.w0 * st.action - hp.w1 * st.delta_r_mbps
        assert -hp.state_bound <= st.next_state <= st.state <= hp.state_bound
    for k in range(1, tr.iterations + 1):
        g = math.fsum(s.reward for s in tr.steps if s.k == k)
        assert tr.gammas[k - 1] == pytest.approx(g, abs=1e-12)
    if tr.converged:
        assert all(abs(g) <= hp.gamma_tolerance for g in tr.gammas[-hp.convergence_window:])
    q_max = max(abs(s.reward) for s in tr.steps)
    assert np.all(np.abs(res.qtable.tables) <= q_max / (1 - hp.lam) + 1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_powers_and_interference_non_increasing_and_central_kept(seed):
    sc = build_scenario(CFG, 57, 200.0, 11, seed)
    prev = NetworkState.full_power(sc, CFG)
    central0 = prev.satisfied()
    for n in range(1, 40, 3):
        # same seed: a run capped at n iterations is a prefix of the full run
        res = run_episode(sc, CFG, Hyperparams(max_iterations=n), np.random.default_rng(seed))
        cur = res.final
        assert np.all(cur.power_w <= prev.power_w)
        assert np.all(cur.interference_profile() <= prev.interference_profile() * (1 + 1e-12))
        assert np.all(cur.satisfied()[central0])
        prev = cur


def test_episode_determinism():
    sc = build_scenario(CFG, 57, 200.0, 17, seed=3)
    hp = Hyperparams()
    a = run_episode(sc, CFG, hp, np.random.default_rng(11))
    b = run_episode(sc, CFG, hp, np.random.default_rng(11))
    assert a.trace.to_csv() == b.trace.to_csv()
    np.testing.assert_array_equal(a.final.power_w, b.final.power_w)


def test_trace_csv_round_trip():
    _, res = _random_episode(2)
    text = res.trace.to_csv()
    assert EpisodeTrace.steps_from_csv(text) == res.trace.steps
    assert text.splitlines()[0] == "k,u,offset_db,action,delta_r_mbps,reward,state,next_state"


def test_warm_start_table_is_reused():
    sc = build_scenario(CFG, 57, 200.0, 11, seed=0)
    hp = Hyperparams()
    first = run_episode(sc, CFG, hp, np.random.default_rng(0))
    touched = np.count_nonzero(first.qtable.tables)
    second = run_episode(sc, CFG, hp, np.random.default_rng(1), deep_qtable=first.qtable)
    assert second.qtable is first.qtable
    assert np.count_nonzero(second.qtable.tables) >= touched
    with pytest.raises(ValueError):
        run_episode(sc, CFG, hp, np.random.default_rng(0), deep_qtable=DeepQTable(3, 150, 10))


def test_numeric_floor_clamps():
    cfg = RadioConfig()
    sc = single_link(cfg, 175.0)  # desired power sits below the floor guard
    res = run_episode(sc, cfg, Hyperparams(epsilon=0.0), np.random.default_rng(0))
    assert res.trace.floor_hits >= 1
    assert cfg.power_floor_dbw <= res.final.power_dbw(0) < cfg.power_floor_dbw + 1
    assert res.trace.converged
    assert all(s.action > 0 for s in res.trace.steps[:17])
