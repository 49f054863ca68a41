import json

import pytest

from ratelessrelay.cli import main, parse_args

ARGS = ["--k", "32", "--c", "0.1", "--trials", "12", "--seed", "4"]


def test_cli_writes_outputs(tmp_path, capsys):
    csv_path, json_path = tmp_path / "o.csv", tmp_path / "o.json"
    rc = main(ARGS + ["--strategy", "df", "--eps-sr", "0.1", "--out-csv", str(csv_path), "--out-json", str(json_path)])
    assert rc == 0
    assert csv_path.read_text().startswith("slot,mean_frac_relay,se_relay,mean_frac_dest,se_dest\n")
    data = json.loads(json_path.read_text())
    assert data["config"]["sim"]["strategy"] == "df"
    assert data["trials"] == 12
    assert "t@50%(dest)=" in capsys.readouterr().out


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# fig 6 corner\nstrategy = df\neps-sr = 0.4\neps_rd = 0.4\ntrials = 7\n")
    args = parse_args(["--config", str(cfg), "--eps-rd", "0.1"])
    assert args.strategy == "df"
    assert args.eps_sr == 0.4
    assert args.eps_rd == 0.1
    assert args.trials == 7


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    with pytest.raises(SystemExit) as exc:
        parse_args(["--config", str(bad)])
    assert exc.value.code != 0
    bad.write_text("strategy = af\n")
    with pytest.raises(SystemExit):
        parse_args(["--config", str(bad)])
    with pytest.raises(SystemExit):
        parse_args(["--config", str(tmp_path / "nope.cfg")])


def test_invalid_config_exit_code(capsys):
    assert main(ARGS + ["--eps-sr", "1.5"]) == 2
    assert main(["--k", "8", "--c", "0.03", "--trials", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["--strategy", "af"])
    assert exc.value.code != 0


def test_io_failure_exit_code(tmp_path):
    assert main(ARGS + ["--out-csv", str(tmp_path / "nodir" / "o.csv")]) == 1


def test_workers_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("RATELESSRELAY_WORKERS", "2")
    from ratelessrelay.cli import config_from_args

    assert config_from_args(parse_args(ARGS)).workers == 2
    assert config_from_args(parse_args(ARGS + ["--workers", "1"])).workers == 1
