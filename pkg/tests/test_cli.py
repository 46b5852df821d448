import json

import pytest

from kakeyalab import cli
from kakeyalab.config import ConfigError, fixture_dir, list_fixtures, parse_config


def test_fixture_listing(capsys):
    assert cli.main(["fixtures"]) == 0
    out = capsys.readouterr().out
    assert "decay_kakeya_d2" in out and "cone_d3" in out
    assert len(list_fixtures()) >= 8


def test_fixtures_parse():
    for name, _ in list_fixtures():
        cfg = parse_config((fixture_dir() / f"{name}.toml").read_text(), name)
        assert cfg.seed == 0


def test_scaling_fixture_report(tmp_path):
    assert cli.main(["run", "scaling_sphere_d3", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "scaling_sphere_d3.json").read_text())
    assert report["schema_version"] == 1
    assert report["fits"]["beta"]["predicted_beta"] == 0.5
    assert 0.35 <= report["fits"]["beta"]["beta_hat"] <= 0.65
    # the embedded config round-trips
    assert parse_config(report["config"]["text"], "x").values == report["config"]["values"]


def test_csv_byte_identical(tmp_path):
    for sub in ("a", "b"):
        assert cli.main(["run", "decay_circle", "--out", str(tmp_path / sub)]) == 0
    a = (tmp_path / "a" / "decay_circle.csv").read_bytes()
    assert a == (tmp_path / "b" / "decay_circle.csv").read_bytes()
    assert a.splitlines()[0] == b"grid,value,aux"


def test_threads_do_not_change_rows(tmp_path):
    cli.main(["run", "scaling_sphere_d4", "--out", str(tmp_path / "a")])
    cli.main(["run", "scaling_sphere_d4", "--threads", "3", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "scaling_sphere_d4.csv").read_bytes() == \
        (tmp_path / "b" / "scaling_sphere_d4.csv").read_bytes()


def test_missing_seed_exit_2(tmp_path, capsys):
    path = tmp_path / "noseed.toml"
    path.write_text('experiment.kind = "covering"\nfamily.d = 2\nfamily.k = 1\n')
    assert cli.main(["run", str(path), "--out", str(tmp_path)]) == 2
    assert "seed" in capsys.readouterr().err


def test_bad_field_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text('experiment.kind = "scaling"\nseed = 1\nfamily.name = "sphere"\n'
                    'family.d = 3\nfamily.m = 4096\ngrid.eta = [0.125, 0.0625]\n')
    assert cli.main(["run", str(path), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "line 6" in err and "grid.eta" in err


def test_grid_below_resolution_exit_3(tmp_path):
    path = tmp_path / "fine.toml"
    path.write_text('experiment.kind = "scaling"\nseed = 0\nfamily.name = "uniform"\n'
                    'family.d = 2\nfamily.n = 16\ngrid.eta = [0.25, 0.125, 0.0625, 0.03125, 0.015625]\n')
    assert cli.main(["run", str(path), "--out", str(tmp_path)]) == 3


def test_unknown_kind():
    with pytest.raises(ConfigError):
        parse_config('experiment.kind = "nope"\nseed = 0\n')


def test_env_var_sets_output(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.main(["run", "proof_identities"]) == 0
    assert (tmp_path / "env" / "proof_identities.json").is_file()


def test_plot_outputs(tmp_path):
    assert cli.main(["run", "covering_g21", "--plot", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "covering_g21.png").stat().st_size > 1000
    script = (tmp_path / "covering_g21_plot.py").read_text()
    compile(script, "plot", "exec")
    assert "covering_g21.csv" in script


def test_output_dir_precedence(tmp_path, monkeypatch):
    cfg = parse_config('experiment.kind = "bump"\nseed = 0\noutput.dir = "from_config"\n')
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    assert cli.output_dir(None, cfg).name == "from_config"
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.output_dir(None, cfg) == tmp_path / "env"
    assert cli.output_dir(str(tmp_path / "flag"), cfg) == tmp_path / "flag"
