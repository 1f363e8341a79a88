import json

import pytest

from netcon.cli import RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_square_prints_header_and_picture(capsys):
    code, out, _ = run(capsys, "run", "--protocol", "square", "--n", "16", "--seed", "7")
    assert code == 0
    assert out.startswith("# run protocol=square n=16 b=5 seed=7")
    assert "check=pass" in out
    assert "####\n####\n####\n####\n" in out


def test_run_is_reproducible(capsys):
    a = run(capsys, "run", "--protocol", "line-replication", "--length", "4", "--seed", "3")
    b = run(capsys, "run", "--protocol", "line-replication", "--length", "4", "--seed", "3")
    assert a == b


def test_run_writes_trace_and_svg(capsys, tmp_path):
    trace, svg = tmp_path / "t.txt", tmp_path / "s.svg"
    code, out, _ = run(capsys, "run", "--protocol", "square", "--n", "9", "--trace", str(trace),
                       "--format", "svg", "--out", str(svg))
    assert code == 0
    assert "phases:" in out
    assert trace.read_text().count("\n") >= 8
    assert svg.read_text().startswith("<svg")


def test_run_several_trials(capsys):
    code, out, _ = run(capsys, "run", "--protocol", "replication1", "--trials", "2")
    assert code == 0
    assert out.count("check=pass") == 2


def test_run_stops_at_a_phase(capsys):
    code, out, _ = run(capsys, "run", "--protocol", "square-knowing-n", "--n", "9", "--phase", "assembly")
    assert code == 0 and "stop after" in out


def test_count_table_and_records(capsys, tmp_path):
    rec = tmp_path / "rec.csv"
    code, out, _ = run(capsys, "count", "--n", "64", "--trials", "20", "--out", str(rec))
    assert code == 0
    assert "P[r0>=n/2]" in out and "(20/20)" in out
    assert len(rec.read_text().splitlines()) == 20
    for proto in ("uid", "simple-uid"):
        code, out, _ = run(capsys, "count", "--protocol", proto, "--n", "16", "--trials", "5")
        assert code == 0 and "mean steps" in out


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--tm", "leftcol", "--d", "3")
    assert code == 0
    assert "on pixels: {0, 5, 6}" in out
    assert "#..\n#..\n#..\n" in out
    assert "output connected: yes" in out
    code, out, _ = run(capsys, "oracle", "--tm", "parity", "--d", "3")
    assert "output connected: no" in out


def test_render_shape_and_machine(capsys):
    code, out, _ = run(capsys, "render", "--shape", "[[0,0],[1,0],[1,1]]")
    assert code == 0 and out == ".#\n##\n"
    code, out, _ = run(capsys, "render", "--tm", "cross", "--d", "3")
    assert out == ".#.\n###\n.#.\n"


def test_render_simulated_phase(capsys):
    code, out, err = run(capsys, "render", "--protocol", "replication1", "--phase", "assembly", "--seed", "2")
    assert code == 0
    assert "reason=stop" in err
    assert "free nodes:" in out


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--only", "4", "12", "--quick")
    assert code == 0
    assert out.count("[PASS]") == 2


def test_config_file_and_overrides(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(RunConfig(protocol="square", n=4, seed=1).to_json())
    code, out, _ = run(capsys, "run", "--config", str(cfg), "--n", "9")
    assert code == 0 and "n=9" in out and "seed=1" in out


def test_config_round_trip_and_unknown_keys():
    c = RunConfig(protocol="universal", tm="cross", d=5)
    assert RunConfig.from_json(c.to_json()) == c
    with pytest.raises(ValueError, match="colour"):
        RunConfig.from_json(json.dumps({"colour": 1}))


@pytest.mark.parametrize("argv", [
    ["run", "--protocol", "nope"],
    ["oracle"],
    ["oracle", "--tm", "missing-machine"],
    ["render", "--shape", "[[0,0"],
    ["run", "--n", "notanumber"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_bad_config_json_exits_2(capsys, tmp_path):
    bad = tmp_path / "c.json"
    bad.write_text("{")
    assert run(capsys, "run", "--config", str(bad))[0] == 2


def test_runtime_failure_exits_1(capsys, tmp_path):
    tm = tmp_path / "broken.tm"
    tm.write_text("start: s\naccept: a\nreject: r\n")
    code, _, err = run(capsys, "oracle", "--tm", str(tm))
    assert code == 1
    assert "runtime error" in err
