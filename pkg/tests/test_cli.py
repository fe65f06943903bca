"""CLI surface: experiment outputs, exit codes, table export."""

import json

from bsnsim.cli import export_table, main
from bsnsim.linksim import RunStats


def test_export_table_format():
    rows = [
        (0.0, 12, RunStats((994, 993), 1000, 0.9935, 0.00070710678)),
        (-10.0, 12, RunStats((992,), 1000, 0.992, 0.0)),
        (-10.0, 20, RunStats((1000,), 1000, 1.0, 0.0)),
    ]
    text = export_table(rows)
    lines = text.strip().splitlines()
    assert lines[0] == "power_dbm,channel,mean_pct,std_pct"
    assert lines[1] == "0,12,99.35,0.07"
    assert lines[2] == "-10,12,99.20,0.00"
    assert lines[3] == "-10,20,100.00,0.00"
    assert len(lines) == 4


def test_export_table_empty():
    assert export_table([]) == "power_dbm,channel,mean_pct,std_pct\n"


def test_export_table_microwave_on_off_grid():
    # three channels with the oven on and off, like the microwave test table
    from bsnsim.linksim import EchoTestConfig, run_echo_test
    from bsnsim.rf import ChannelSpec
    from bsnsim.scenario import load_scenario

    scenario = load_scenario("apartment_microwave")
    rows = []
    for enabled in (True, False):
        scen = scenario.with_interferer_enabled("oven", enabled)
        for channel in (20, 19, 21):
            cfg = EchoTestConfig(channel=ChannelSpec.wpan(channel), tx_power_dbm=-10.0)
            rows.append((-10.0, channel, run_echo_test(cfg, scen, seed=1)))
    lines = export_table(rows).strip().splitlines()
    assert len(lines) == 7  # header + 3 channels x on/off
    on_ch20 = float(lines[1].split(",")[2])
    off_ch20 = float(lines[4].split(",")[2])
    assert on_ch20 < off_ch20


def test_run_echo_writes_outputs(tmp_path, capsys):
    code = main([
        "run", "echo", "--scenario", "apartment", "--channel", "12",
        "--power", "-10", "--seed", "5", "--out", str(tmp_path),
    ])
    assert code == 0
    table = (tmp_path / "echo_table.csv").read_text().strip().splitlines()
    assert table[0] == "power_dbm,channel,mean_pct,std_pct"
    assert len(table) == 2
    payload = json.loads((tmp_path / "echo_result.json").read_text())
    assert payload["seed"] == 5
    assert payload["config"]["channel"] == 12
    assert len(payload["result"]["per_run_success"]) == 10


def test_run_echo_reproducible(tmp_path):
    main(["run", "echo", "--scenario", "apartment", "--seed", "3", "--out", str(tmp_path / "a")])
    main(["run", "echo", "--scenario", "apartment", "--seed", "3", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a/echo_result.json").read_bytes() == (tmp_path / "b/echo_result.json").read_bytes()


def test_run_scan_writes_16_rows(tmp_path):
    assert main(["run", "scan", "--scenario", "apartment", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "scan.csv").read_text().strip().splitlines()
    assert len(lines) == 17


def test_run_energy(tmp_path, capsys):
    assert main(["run", "energy", "--profile", "continuous", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "128.7" in out


def test_run_classify(tmp_path):
    assert main(["run", "classify", "--activity", "fall", "--duration", "6",
                 "--seed", "2", "--out", str(tmp_path)]) == 0
    events = (tmp_path / "events.csv").read_text().strip().splitlines()
    assert len(events) == 2  # header plus the single fall event


def test_star_then_replay_log(tmp_path, capsys):
    assert main(["run", "star", "--scenario", "apartment", "--nodes", "2",
                 "--duration", "12", "--seed", "4", "--out", str(tmp_path)]) == 0
    capsys.readouterr()
    assert main(["replay-log", str(tmp_path / "frames.log")]) == 0
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l]
    assert lines[0].startswith("node_id,seq,")
    assert len(lines) > 1


def test_calibrate_command(tmp_path):
    assert main(["calibrate", "--out", str(tmp_path)]) == 0
    payload = json.loads((tmp_path / "calibration.json").read_text())
    assert "logistic_midpoint_db" in payload
    report = (tmp_path / "fit_report.csv").read_text().strip().splitlines()
    assert len(report) == 10


def test_unknown_scenario_exit_code(tmp_path, capsys):
    assert main(["run", "echo", "--scenario", "nope", "--out", str(tmp_path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_bad_channel_exit_code(tmp_path, capsys):
    assert main(["run", "echo", "--scenario", "apartment", "--channel", "35",
                 "--out", str(tmp_path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_replay_log_rejects_garbage(tmp_path, capsys):
    bad = tmp_path / "junk.log"
    bad.write_bytes(b"this is not a log")
    assert main(["replay-log", str(bad)]) == 2
