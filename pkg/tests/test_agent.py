import numpy as np
import pytest

from vqsense import agent as ag
from vqsense import env, sim
from vqsense import world_model as wm
from vqsense.agent import AgentConfig, Streams
from vqsense.env import NoiseSpec, SawtoothConfig
from vqsense.errors import EpisodeAborted, NumericalError, ParameterError

SHORT = SawtoothConfig(horizon=5)
SMALL = AgentConfig(n_qubits=3, mc_samples=8)


def test_first_step_of_zero_net():
    cfg = AgentConfig()
    streams = Streams.from_seeds(0)
    state = ag.init_agent(cfg, streams)
    state.net = wm.zero_params(cfg.input_dim, 1)
    state, rec = ag.agent_step(state, 0, 0.0, NoiseSpec(), cfg, streams)
    assert rec.x_hat == 0.0 and rec.x_std == cfg.fixed_std


def test_glorot_net_also_predicts_zero_at_t0():
    # zero biases on the all-zeros first input
    rec = ag.run_episode(SMALL, SawtoothConfig(horizon=1), NoiseSpec(), 3)[0]
    assert rec.x_hat == 0.0


def test_random_policy_ignores_environment_seed():
    cfg = AgentConfig(n_qubits=3, policy="random", mc_samples=4)
    r1 = ag.run_episode(cfg, SHORT, NoiseSpec(), agent_seed=1, env_seed=10)
    r2 = ag.run_episode(cfg, SHORT, NoiseSpec(), agent_seed=1, env_seed=20)
    assert all(np.array_equal(a.action.vector(), b.action.vector()) for a, b in zip(r1, r2))
    assert any(not np.array_equal(a.observation, b.observation) for a, b in zip(r1, r2))


def test_horizon_one_gives_one_record():
    assert len(ag.run_episode(SMALL, SawtoothConfig(horizon=1), NoiseSpec(), 0)) == 1


def test_episode_determinism():
    a = ag.run_episode(SMALL, SHORT, NoiseSpec("bit_flip", p=0.2), 4)
    b = ag.run_episode(SMALL, SHORT, NoiseSpec("bit_flip", p=0.2), 4)
    for x, y in zip(a, b):
        assert (x.x_hat, x.loss, x.mi_value) == (y.x_hat, y.loss, y.mi_value)
        assert np.array_equal(x.action.vector(), y.action.vector())
        assert np.array_equal(x.observation, y.observation)


def test_estimate_does_not_depend_on_current_phase():
    streams_a, streams_b = Streams.from_seeds(2), Streams.from_seeds(2)
    state_a = ag.init_agent(SMALL, streams_a)
    state_b = ag.init_agent(SMALL, streams_b)
    for t in range(3):
        state_a, ra = ag.agent_step(state_a, t, 0.3 * t, NoiseSpec(), SMALL, streams_a)
        state_b, rb = ag.agent_step(state_b, t, 0.3 * t, NoiseSpec(), SMALL, streams_b)
    # same history, different current phase: same estimate and same plan
    _, ra = ag.agent_step(state_a, 3, 1.0, NoiseSpec(), SMALL, streams_a)
    _, rb = ag.agent_step(state_b, 3, 5.0, NoiseSpec(), SMALL, streams_b)
    assert ra.x_hat == rb.x_hat
    assert np.array_equal(ra.action.vector(), rb.action.vector())
    assert ra.loss != rb.loss


def test_single_shot_and_single_update(monkeypatch):
    calls = {"sample": 0, "update": 0}
    real_sample, real_update = sim.sample_observation, wm.online_update

    def counting_sample(*a, **k):
        calls["sample"] += 1
        return real_sample(*a, **k)

    def counting_update(*a, **k):
        calls["update"] += 1
        return real_update(*a, **k)

    monkeypatch.setattr(sim, "sample_observation", counting_sample)
    monkeypatch.setattr(wm, "online_update", counting_update)
    ag.run_episode(SMALL, SHORT, NoiseSpec(), 0)
    assert calls == {"sample": 5, "update": 5}


def test_probes_draw_one_shot_each(monkeypatch):
    calls = []
    real = sim.sample_observation
    monkeypatch.setattr(sim, "sample_observation", lambda *a: calls.append(1) or real(*a))
    recs = ag.run_episode(AgentConfig(n_qubits=3, mc_samples=4, probes=3), SawtoothConfig(horizon=2), NoiseSpec(), 0)
    assert len(calls) == 6
    assert recs[0].observation.shape == (9,)


def test_estimate_is_planning_belief_mean(monkeypatch):
    seen = []
    real = ag.plan_action

    def spy(prev, belief, cfg, rng):
        seen.append(belief.mean)
        return real(prev, belief, cfg, rng)

    monkeypatch.setattr(ag, "plan_action", spy)
    recs = ag.run_episode(SMALL, SHORT, NoiseSpec(), 1)
    assert seen == [r.x_hat for r in recs]


def test_update_uses_previous_triplet_and_current_target(monkeypatch):
    seen = []
    real = wm.online_update
    monkeypatch.setattr(wm, "online_update", lambda p, a, x, target, kind: seen.append((x.copy(), target)) or real(p, a, x, target, kind))
    recs = ag.run_episode(SMALL, SHORT, NoiseSpec(), 1)
    assert np.array_equal(seen[0][0], np.zeros(SMALL.input_dim))
    for t in range(1, 5):
        prev = recs[t - 1]
        expect = wm.encode_input(prev.observation, prev.x_true, prev.action.vector())
        assert np.array_equal(seen[t][0], expect)
        assert seen[t][1] == recs[t].x_true


def test_mi_values_within_bounds():
    cfg = AgentConfig(n_qubits=4, mc_samples=16)
    recs = ag.run_episode(cfg, SawtoothConfig(horizon=20), NoiseSpec(), 0)
    assert all(0 <= r.mi_value <= min(4 * np.log(2), np.log(16)) + 1e-9 for r in recs)


def test_failed_plan_falls_back_and_is_flagged(monkeypatch):
    from vqsense.info_gain import MIEstimate, Plan
    dummy = MIEstimate(0.0, np.zeros((1, 8)), np.zeros(8), np.zeros(1))
    monkeypatch.setattr(ag, "plan_action", lambda prev, b, c, r: Plan(prev, dummy, True))
    streams = Streams.from_seeds(0)
    state = ag.init_agent(SMALL, streams)
    a0 = state.last_action
    state, rec = ag.agent_step(state, 0, 0.0, NoiseSpec(), SMALL, streams)
    assert rec.plan_failed and rec.flagged and rec.action is a0


def test_repeated_failures_abort(monkeypatch):
    def broken(*a, **k):
        raise NumericalError("nan")

    monkeypatch.setattr(wm, "online_update", broken)
    with pytest.raises(EpisodeAborted):
        ag.run_episode(SMALL, SawtoothConfig(horizon=11), NoiseSpec(), 0)
    # ten in a row is tolerated
    recs = ag.run_episode(SMALL, SawtoothConfig(horizon=10), NoiseSpec(), 0)
    assert all(r.update_failed for r in recs)


def test_wrapped_error():
    assert ag.wrapped_error(0.1, 2 * np.pi - 0.1) == pytest.approx(0.2)
    assert ag.wrapped_error(np.pi - 0.1, -np.pi + 0.1) == pytest.approx(-0.2)


def test_error_summary_windows():
    x = np.linspace(0, 1, 40)
    s = ag.error_summary(x, x + 0.5, burn_in=30)
    assert s["full"]["steps"] == 40 and s["post_burn_in"]["steps"] == 10
    assert s["post_burn_in"]["raw_mean"] == pytest.approx(-0.5)
    assert s["full"]["wrapped_mean_abs"] == pytest.approx(0.5)


def test_agent_config_validation():
    with pytest.raises(ParameterError):
        AgentConfig(policy="greedy")
    with pytest.raises(ParameterError):
        AgentConfig(mc_samples=1)
    with pytest.raises(ParameterError):
        AgentConfig(measurement_axis="x")
