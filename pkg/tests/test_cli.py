"""CLI contract tests: file outputs, exit codes, determinism.

Everything runs in-process through ``main(argv)`` except one subprocess
check that the console script is actually installed and wired up.
"""

import json
import shutil
import subprocess

import pytest

from dirinfo.cli import main
from dirinfo.gaussian import random_stable_model
from dirinfo.series import read_csv


def run(*argv):
    return main(list(argv))


def write_config(path, cfg):
    path.write_text(json.dumps(cfg))
    return str(path)


def small_infer_config(tmp_path, **overrides):
    cfg = {
        "data": {
            "generator": {
                "model": "var1",
                "n": 2400,
                "seed": 5,
                "model_file": str(tmp_path / "model.json"),
            }
        },
        "blocks": {"n_blocks": 4, "block_len": 600},
        "lag": {"d_lag": 1},
        "policy": {"seed": 9},
        "mode": "graph",
    }
    cfg.update(overrides)
    random_stable_model(2, seed=77, names=("x", "y")).save(tmp_path / "model.json")
    return cfg


# ---------------------------------------------------------------------------
# simulate


def test_simulate_chain_outputs(tmp_path, capsys):
    out = tmp_path / "sim"
    rc = run("simulate", "--model", "chain", "--n", "800", "--seed", "3", "--out", str(out))
    assert rc == 0
    assert "800 samples" in capsys.readouterr().out
    data = read_csv(out / "data.csv")
    assert data.names == ("x", "y", "z")
    assert data.n_samples == 800
    truth = json.loads((out / "truth.json").read_text())
    assert truth["directed"] == [["x", "y"], ["y", "z"]]
    cfg = json.loads((out / "config.json").read_text())
    assert cfg["generator"]["seed"] == 3


def test_simulate_is_seed_reproducible(tmp_path):
    for sub in ("a", "b"):
        run("simulate", "--model", "four_d", "--n", "300", "--seed", "8",
            "--out", str(tmp_path / sub))
    a = (tmp_path / "a" / "data.csv").read_bytes()
    assert a == (tmp_path / "b" / "data.csv").read_bytes()


def test_simulate_refuses_overwrite_without_force(tmp_path, capsys):
    out = tmp_path / "sim"
    assert run("simulate", "--model", "chain", "--n", "50", "--out", str(out)) == 0
    rc = run("simulate", "--model", "chain", "--n", "50", "--out", str(out))
    assert rc == 2
    assert "--force" in capsys.readouterr().err
    assert run("simulate", "--model", "chain", "--n", "50", "--out", str(out),
               "--force") == 0


def test_simulate_rho_must_be_pd(tmp_path, capsys):
    rc = run("simulate", "--model", "four_d", "--n", "100",
             "--rho", "0.9,0.8,0.7", "--out", str(tmp_path / "x"))
    assert rc == 2
    assert "minor" in capsys.readouterr().err


def test_simulate_rejects_unknown_param(tmp_path, capsys):
    rc = run("simulate", "--model", "chain", "--n", "100",
             "--params", '{"nope": 1}', "--out", str(tmp_path / "x"))
    assert rc == 2
    assert "params" in capsys.readouterr().err


def test_simulate_var1_needs_model_file(tmp_path, capsys):
    rc = run("simulate", "--model", "var1", "--n", "100", "--out", str(tmp_path / "x"))
    assert rc == 2
    assert "model" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# infer


def test_infer_graph_run_outputs(tmp_path):
    cfg = small_infer_config(tmp_path)
    out = tmp_path / "run"
    rc = run("infer", "--config", write_config(tmp_path / "cfg.json", cfg),
             "--out", str(out))
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["metadata"]["n_blocks"] == 4
    assert report["metadata"]["k"] == 5
    assert len(report["metadata"]["config_hash"]) == 16
    assert report["graph"]["vertices"] == ["x", "y"]
    # 2 directed + 1 instantaneous results
    assert len(report["results"]) == 3
    dot = (out / "graph.dot").read_text()
    assert dot.startswith("digraph causality {")
    hist = list((out / "histograms").glob("*.csv"))
    assert len(hist) == 3
    lines = hist[0].read_text().splitlines()
    assert lines[0] == "block,observed,surrogate_0"
    assert len(lines) == 5  # header + 4 blocks


def test_infer_reruns_byte_identical_any_threads(tmp_path):
    cfg = small_infer_config(tmp_path)
    cfg_path = write_config(tmp_path / "cfg.json", cfg)
    outs = []
    for name, threads in (("r1", "1"), ("r2", "1"), ("r3", "3")):
        out = tmp_path / name
        assert run("infer", "--config", cfg_path, "--out", str(out),
                   "--threads", threads) == 0
        report = json.loads((out / "report.json").read_text())
        report["metadata"].pop("created_at")
        outs.append(
            (
                json.dumps(report, sort_keys=True),
                (out / "graph.dot").read_bytes(),
                sorted(p.read_bytes() for p in (out / "histograms").glob("*.csv")),
            )
        )
    assert outs[0] == outs[1] == outs[2]


def test_infer_refuses_stale_report_and_force_overwrites(tmp_path, capsys):
    cfg = small_infer_config(tmp_path)
    out = tmp_path / "run"
    assert run("infer", "--config", write_config(tmp_path / "c1.json", cfg),
               "--out", str(out)) == 0
    # same config: rerun allowed
    assert run("infer", "--config", write_config(tmp_path / "c2.json", cfg),
               "--out", str(out)) == 0
    # changed config: refused, then forced
    cfg["policy"]["seed"] = 10
    c3 = write_config(tmp_path / "c3.json", cfg)
    assert run("infer", "--config", c3, "--out", str(out)) == 2
    assert "--force" in capsys.readouterr().err
    assert run("infer", "--config", c3, "--out", str(out), "--force") == 0
    report = json.loads((out / "report.json").read_text())
    assert report["metadata"]["seed"] == 10


def test_infer_battery_mode(tmp_path):
    cfg = small_infer_config(
        tmp_path,
        mode="battery",
        measures=[
            {"kind": "transfer_entropy", "source": "x", "target": "y"},
            {"kind": "geweke_dynamic", "source": "x", "target": "y", "ar_order": 2},
        ],
    )
    out = tmp_path / "bat"
    rc = run("infer", "--config", write_config(tmp_path / "cfg.json", cfg),
             "--out", str(out))
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert "graph" not in report
    assert set(report["results"]) == {
        "transfer_entropy__x_to_y",
        "geweke_dynamic__x_to_y",
    }
    gw = report["results"]["geweke_dynamic__x_to_y"]
    assert gw["n_tests"] == 2
    assert len(gw["ratio"]) == 4


def test_infer_k_sweep(tmp_path):
    cfg = small_infer_config(tmp_path, blocks={"n_blocks": 2, "block_len": 500},
                             data={"generator": {"model": "chain", "n": 1000, "seed": 1}})
    cfg_path = write_config(tmp_path / "cfg.json", cfg)
    out = tmp_path / "sweep"
    assert run("infer", "--config", cfg_path, "--out", str(out),
               "--k-sweep", "3,5") == 0
    for k in (3, 5):
        report = json.loads((out / f"k{k}" / "report.json").read_text())
        assert report["metadata"]["k"] == k
    h3 = json.loads((out / "k3" / "report.json").read_text())["metadata"]["config_hash"]
    h5 = json.loads((out / "k5" / "report.json").read_text())["metadata"]["config_hash"]
    assert h3 != h5


def test_infer_csv_input_with_zscore_and_jitter(tmp_path):
    sim = tmp_path / "sim"
    run("simulate", "--model", "chain", "--n", "1200", "--seed", "2", "--out", str(sim))
    cfg = {
        "data": {"csv": str(sim / "data.csv")},
        "blocks": {"n_blocks": 2, "block_len": 600},
        "lag": {"d_lag": 1},
        "zscore": True,
        "jitter_seed": 0,
    }
    out = tmp_path / "run"
    assert run("infer", "--config", write_config(tmp_path / "cfg.json", cfg),
               "--out", str(out)) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["metadata"]["channels"] == ["x", "y", "z"]
    assert report["metadata"]["n_tests"] == 6


def test_infer_duplicate_rows_exit_code_3(tmp_path, capsys):
    rows = ["x,y"] + ["1.0,2.0"] * 400
    csv = tmp_path / "dup.csv"
    csv.write_text("\n".join(rows) + "\n")
    cfg = {
        "data": {"csv": str(csv)},
        "blocks": {"n_blocks": 1, "block_len": 400},
        "lag": {"d_lag": 1},
    }
    rc = run("infer", "--config", write_config(tmp_path / "cfg.json", cfg),
             "--out", str(tmp_path / "run"))
    assert rc == 3
    assert "jitter" in capsys.readouterr().err


def test_infer_usage_errors(tmp_path, capsys):
    cfg = small_infer_config(tmp_path)
    cfg_path = write_config(tmp_path / "cfg.json", cfg)
    # no out dir anywhere
    assert run("infer", "--config", cfg_path) == 2
    # bad JSON config
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run("infer", "--config", str(bad), "--out", str(tmp_path / "o")) == 2
    # missing config file
    assert run("infer", "--config", str(tmp_path / "none.json"),
               "--out", str(tmp_path / "o")) == 2
    # bad mode
    assert run("infer", "--config",
               write_config(tmp_path / "m.json", dict(cfg, mode="nope")),
               "--out", str(tmp_path / "o")) == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# oracle


def test_oracle_identities_stdout(capsys):
    rc = run("oracle", "--identities", "--channels", "3", "--seed", "1")
    assert rc == 0
    out = capsys.readouterr().out
    assert "decomposition" in out
    assert "max residual" in out
    worst = float(out.strip().splitlines()[-1].split()[-1])
    assert worst < 1e-10


def test_oracle_single_measure(tmp_path, capsys):
    model = random_stable_model(3, seed=2, names=("a", "b", "c"))
    path = tmp_path / "m.json"
    model.save(path)
    rc = run("oracle", "--model", str(path), "--kind", "cond_transfer_entropy",
             "--source", "a", "--target", "b", "--side", "c", "--d-lag", "2")
    assert rc == 0
    printed = float(capsys.readouterr().out.strip())
    from dirinfo.gaussian import oracle_measure
    from dirinfo.measures import MeasureSpec
    from dirinfo.series import LagSpec, MeasureKind

    want = oracle_measure(
        model,
        MeasureSpec(
            kind=MeasureKind.COND_TRANSFER_ENTROPY,
            target="b",
            source="a",
            side=("c",),
            lag=LagSpec(2),
        ),
    )
    assert printed == pytest.approx(want, abs=1e-10)


def test_oracle_requires_kind_or_identities(capsys):
    assert run("oracle", "--channels", "2") == 2
    assert "--identities" in capsys.readouterr().err


def test_oracle_unknown_kind_lists_choices(capsys):
    rc = run("oracle", "--kind", "nope", "--source", "x1", "--target", "x2")
    assert rc == 2
    assert "transfer_entropy" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# top level


def test_usage_error_exit_code_1():
    assert run() == 1
    assert run("frobnicate") == 1


def test_version_exits_zero(capsys):
    assert run("--version") == 0
    assert "dirinfo" in capsys.readouterr().out


def test_console_script_installed():
    script = shutil.which("dirinfo")
    assert script, "console script 'dirinfo' not on PATH"
    proc = subprocess.run([script, "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "dirinfo" in proc.stdout
