import csv
import json
import os

import pytest

from vqsense.cli import main
from vqsense.config import ExperimentConfig

FAST = ["--steps", "3"]


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps({"n_qubits": 3, "mc_samples": 8}))
    return str(path)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_single_one_step(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["single", "--steps", "1", "--seed", "7", "--out", str(out)]) == 0
    rows = read_csv(out / "trajectory.csv")
    assert len(rows) == 2
    assert rows[0][:7] == ["t", "x_true", "x_hat", "wrapped_error", "raw_error", "mi_nats", "loss"]
    assert rows[0][-6:] == [f"s_{j}" for j in range(6)]
    assert "a_13" in rows[0]
    echoed = json.loads(capsys.readouterr().out)
    assert echoed["seed"] == 7 and echoed["horizon"] == 1 and echoed["mc_samples"] == 64
    summary = json.loads((out / "summary.json").read_text())
    assert summary["command"] == "single" and summary["csv_schema"] == "vqsense-trajectory/1"


def test_seventeen_significant_digits(tmp_path, small_config):
    out = tmp_path / "o"
    main(["single", "--config", small_config, "--steps", "2", "--out", str(out)])
    row = read_csv(out / "trajectory.csv")[2]
    assert float(row[1]) == 2 * 3.141592653589793 / 15
    assert len(row[1].replace(".", "").lstrip("0")) == 17


def test_determinism_byte_identical(tmp_path, small_config):
    for d in ("a", "b"):
        assert main(["single", "--config", small_config, *FAST, "--seed", "3", "--noise", "bitflip:0.2",
                     "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a/trajectory.csv").read_bytes() == (tmp_path / "b/trajectory.csv").read_bytes()


def test_config_echo_round_trip(tmp_path, small_config, capsys):
    first = tmp_path / "first"
    main(["multi", "--config", small_config, *FAST, "--agents", "2", "--out", str(first)])
    echoed = first / "config.json"
    copy = tmp_path / "echo.json"
    copy.write_text(echoed.read_text())
    snapshot = {f: (first / f).read_bytes() for f in ("agent_0.csv", "agent_1.csv", "fused.csv", "summary.json")}
    for f in snapshot:
        os.remove(first / f)
    assert main(["multi", "--config", str(copy)]) == 0
    for f, data in snapshot.items():
        assert (first / f).read_bytes() == data


def test_multi_writes_per_agent_and_fused(tmp_path, small_config):
    out = tmp_path / "m"
    assert main(["multi", "--config", small_config, *FAST, "--out", str(out)]) == 0
    assert sorted(os.listdir(out)) == ["agent_0.csv", "agent_1.csv", "agent_2.csv", "config.json",
                                        "fused.csv", "summary.json"]
    header = read_csv(out / "fused.csv")[0]
    assert header[:6] == ["t", "x_true", "x_hat", "wrapped_error", "raw_error", "gamma"]
    summary = json.loads((out / "summary.json").read_text())
    assert len(summary["agents"]) == 3 and "fused" in summary


def test_baseline_forces_random_policy(tmp_path, small_config):
    out = tmp_path / "b"
    assert main(["baseline", "--config", small_config, *FAST, "--out", str(out)]) == 0
    assert json.loads((out / "config.json").read_text())["policy"] == "random"


def test_sweep_noise_summary(tmp_path, small_config):
    out = tmp_path / "s"
    assert main(["sweep-noise", "--config", small_config, *FAST, "--p", "0.1,0.4", "--seeds", "2",
                 "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert [e["p"] for e in summary["sweep"]] == [0.1, 0.4]
    for entry in summary["sweep"]:
        for arm in ("multi_agent_fused", "single_agent_k_probes"):
            assert [r["seed"] for r in entry[arm]["per_seed"]] == [0, 1]
            assert entry[arm]["raw_std_full"]["n"] == 2
    assert len(read_csv(out / "p_0.4/seed_1/single_k_probes.csv")[0]) == 9 + 11 + 3 * 3  # fixed columns, 8 + 3 action angles, 3 probes x 3 bits


def test_sweep_parallel_matches_serial(tmp_path, small_config):
    args = ["sweep-noise", "--config", small_config, "--steps", "2", "--p", "0.2", "--seeds", "0,3"]
    assert main(args + ["--out", str(tmp_path / "serial")]) == 0
    assert main(args + ["--workers", "2", "--out", str(tmp_path / "par")]) == 0
    a = json.loads((tmp_path / "serial/summary.json").read_text())
    b = json.loads((tmp_path / "par/summary.json").read_text())
    assert a["sweep"] == b["sweep"]


@pytest.mark.parametrize("content", ['{"horizon": 0}', '{"bogus": 1}', '{"noise": "loud"}', "{not json",
                                     '{"policy": "greedy"}', '[1, 2]', '{"horizon": "ten"}'])
def test_malformed_config_exit_1(tmp_path, content, capsys):
    path = tmp_path / "bad.json"
    path.write_text(content)
    assert main(["single", "--config", str(path), "--out", str(tmp_path / "x")]) == 1
    assert "config error" in capsys.readouterr().err


def test_bad_flag_exit_1(capsys):
    assert main(["single", "--noise", "bitflip:7"]) == 1
    assert main(["nonsense"]) == 1


def test_numerical_abort_exit_2(tmp_path, small_config, monkeypatch):
    import vqsense.world_model as wm
    from vqsense.errors import NumericalError

    def broken(*a, **k):
        raise NumericalError("nan")

    monkeypatch.setattr(wm, "online_update", broken)
    assert main(["single", "--config", small_config, "--steps", "20", "--out", str(tmp_path / "n")]) == 2


def test_defaults_materialized():
    cfg = ExperimentConfig()
    assert (cfg.n_qubits, cfg.layers, cfg.horizon, cfg.period, cfg.mc_samples) == (6, 2, 100, 15.0, 64)
    assert (cfg.action_lr, cfg.model_lr, cfg.fixed_std) == (0.2, 0.001, 0.25)
