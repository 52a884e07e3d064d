import csv
import subprocess
import sys

import pytest

from rpluw import cli, config, metrics


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(autouse=True)
def _no_seed_env(monkeypatch):
    monkeypatch.delenv(cli.SEED_ENV, raising=False)


SHORT = ["--duration", "40", "--no-plots"]


def test_run_writes_one_row_per_iteration(tmp_path):
    cfg = tmp_path / "table3-50.cfg"
    cfg.write_text(config.dumps(config.preset("table3-50")))
    out = tmp_path / "r.csv"
    assert cli.main(["run", "--config", str(cfg), "--protocol", "rpluw-swara", "--seed", "7",
                     "--out", str(out), *SHORT]) == 0
    got = rows(out)
    assert len(got) == 10 and [int(r["seed"]) for r in got] == list(range(7, 17))
    assert list(got[0]) == list(metrics.CSV_COLUMNS)
    assert len(rows(metrics.aggregate_path(out))) == 1


def test_run_is_repeatable_byte_for_byte(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert cli.main(["run", "--iterations", "2", "--out", str(p), *SHORT]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_parallel_jobs_match_serial(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["run", "--iterations", "3", "--out", str(a), *SHORT]) == 0
    assert cli.main(["run", "--iterations", "3", "--jobs", "3", "--out", str(b), *SHORT]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_env_overrides_flag(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.SEED_ENV, "42")
    out = tmp_path / "r.csv"
    assert cli.main(["run", "--seed", "3", "--iterations", "1", "--out", str(out), *SHORT]) == 0
    assert rows(out)[0]["seed"] == "42"
    monkeypatch.setenv(cli.SEED_ENV, "forty")
    assert cli.main(["run", "--iterations", "1", "--out", str(out), *SHORT]) == 2


def test_trace_file_is_line_delimited(tmp_path):
    out, trace = tmp_path / "r.csv", tmp_path / "t.tsv"
    assert cli.main(["run", "--iterations", "1", "--out", str(out), "--trace", str(trace), *SHORT]) == 0
    lines = trace.read_text().splitlines()
    assert lines and all(len(ln.split("\t")) == 4 for ln in lines)
    kinds = {ln.split("\t")[2] for ln in lines}
    assert {"tx-DIO", "rx-DIO"} <= kinds


def test_run_renders_figure_next_to_csv(tmp_path):
    out = tmp_path / "r.csv"
    assert cli.main(["run", "--iterations", "2", "--duration", "30", "--out", str(out)]) == 0
    png = tmp_path / "r_per_seed.png"
    assert png.exists() and png.read_bytes()[:4] == b"\x89PNG"


def test_usage_errors_exit_2(tmp_path, capsys):
    assert cli.main(["run", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err
    assert cli.main(["run", "--protocol", "ctp"]) == 2
    assert cli.main(["channel", "foo"]) == 2
    assert cli.main([]) == 2
    assert cli.main(["sweep", "--nodes", "", "--out", str(tmp_path / "s.csv")]) == 2
    assert cli.main(["sweep", "--protocols", "rpluw-swara,ctp", "--out", str(tmp_path / "s.csv")]) == 2
    assert cli.main(["weights"]) == 2


def test_config_errors_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[radio]\nforced_loss = 2.0\n")
    assert cli.main(["run", "--config", str(bad)]) == 3
    assert "radio.forced_loss" in capsys.readouterr().err
    bad.write_text("[scenario]\nnodes = 3\n")
    assert cli.main(["run", "--config", str(bad)]) == 3
    assess = tmp_path / "a.txt"
    assess.write_text("Energy\nDepth: lots\n")
    assert cli.main(["weights", str(assess)]) == 3
    assert "line 2" in capsys.readouterr().err
    assert cli.main(["run", "--weights", str(tmp_path / "missing.txt"), "--iterations", "1",
                     "--out", str(tmp_path / "x.csv"), *SHORT]) == 3


def test_io_errors_exit_4(tmp_path):
    assert cli.main(["run", "--config", str(tmp_path / "missing.toml")]) == 4
    assert cli.main(["run", "--iterations", "1", "--out", str(tmp_path / "no" / "x.csv"), *SHORT]) == 4
    assert cli.main(["weights", str(tmp_path / "missing.txt")]) == 4


def test_sweep_product_and_aggregate(tmp_path):
    out = tmp_path / "s.csv"
    args = ["sweep", "--nodes", "5,8,10", "--lambda", "0.1", "--protocols", "rpluw-swara,baseline-hop",
            "--iterations", "10", "--duration", "15", "--out", str(out), "--jobs", "2"]
    assert cli.main(args) == 0
    got = rows(out)
    assert len(got) == 60
    assert len(rows(metrics.aggregate_path(out))) == 6
    for name in ("pdr_vs_nodes", "delay_vs_load", "energy_vs_nodes"):
        assert (tmp_path / f"s_{name}.png").exists()


def test_lambda_axis_expansion():
    assert cli.expand_axis("0.1:0.2:0.05") == [0.1, 0.15, 0.2]
    assert cli.expand_axis("0.1:0.2:0.025") == [0.1, 0.125, 0.15, 0.175, 0.2]
    assert cli.expand_axis("50,100,200") == [50.0, 100.0, 200.0]
    with pytest.raises(cli.UsageError):
        cli.expand_axis("")
    with pytest.raises(cli.UsageError):
        cli.expand_axis("1:0:1")


def test_weights_presets(capsys):
    assert cli.main(["weights", "--preset", "paper-swara"]) == 0
    out = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [r["weight"] for r in out] == ["0.086279", "0.158697", "0.291407", "0.343035", "0.120582"]
    assert {r["provenance"] for r in out} == {"preset-paper-swara"}
    assert cli.main(["weights", "--preset", "paper-fuzzy"]) == 0
    out = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [r["weight"] for r in out] == ["0.088090", "0.162029", "0.296526", "0.330238", "0.123114"]


def test_weights_from_equal_assessment(tmp_path):
    a = tmp_path / "eq.txt"
    a.write_text("Energy\nDepth: 0\nHop Count: 0\nLink Metrics: 0\nOther Metrics: 0\n")
    out = tmp_path / "w.csv"
    assert cli.main(["weights", str(a), "--out", str(out)]) == 0
    got = rows(out)
    assert len(got) == 5 and all(float(r["weight"]) == pytest.approx(0.2, abs=1e-12) for r in got)
    assert got[0]["provenance"].endswith("eq.txt")


def test_channel_sound_speed_grid(capsys):
    assert cli.main(["channel", "sound-speed", "--t", "0:30:1", "--s", "35", "--d", "0"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "temperature_c,salinity_ppt,depth_m,sound_speed_mps"
    assert len(lines) == 32
    assert lines[1] == "0,35,0,1448.96"


def test_channel_absorption_is_monotone(capsys):
    assert cli.main(["channel", "absorption", "--f", "1:100:1"]) == 0
    vals = [float(r["absorption_db_per_km"]) for r in csv.DictReader(capsys.readouterr().out.splitlines())]
    assert len(vals) == 100 and all(b > a for a, b in zip(vals, vals[1:]))


def test_channel_paper_verbatim_constant(capsys):
    assert cli.main(["channel", "sound-speed", "--t", "0", "--sound-speed-preset", "paper-verbatim"]) == 0
    assert capsys.readouterr().out.splitlines()[1].endswith(",1349")


def test_channel_domain_error_exits_3():
    assert cli.main(["channel", "sound-speed", "--t", "99"]) == 3


def test_channel_plot(tmp_path, capsys):
    png = tmp_path / "c.png"
    assert cli.main(["channel", "capacity", "--snr", "0:30:5", "--plot", str(png)]) == 0
    assert png.exists()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "rpluw", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "rpluw" in r.stdout
