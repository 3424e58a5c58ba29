import json
from pathlib import Path

import numpy as np
import pytest

from rrlab.channel import random_channel
from rrlab.cli import main
from rrlab.distributions import default_cards, sample_factored
from rrlab.io import channel_to_dict, config_hash, distribution_to_dict

DATA = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture
def chan(tmp_path):
    path = tmp_path / "ch.json"
    path.write_text(json.dumps(channel_to_dict(random_channel(np.random.default_rng(4)))))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def _csv_header(path):
    lines = Path(path).read_text().splitlines()
    assert lines[0].startswith("# rrlab ")
    assert lines[1].startswith("# config_hash ")
    assert lines[2].startswith("# seed ")
    assert lines[3].startswith("# config ")
    return lines


def _json_header(path):
    doc = json.loads(Path(path).read_text())
    h = doc["header"]
    assert {"tool", "version", "config_hash", "seed", "config"} <= set(h)
    assert h["config_hash"] == config_hash(h["config"])
    return doc


def test_region(chan, tmp_path, capsys):
    code, out, _ = run(["region", "--mode", "theorem1", "--channel", chan, "--sample", "3",
                        "--indep-prob", "0.5", "--out", str(tmp_path)], capsys)
    assert code == 0
    summary = json.loads(out)
    lines = _csv_header(tmp_path / "vertices.csv")
    assert lines[4] == "R1,R2"
    doc = _json_header(tmp_path / "halfplanes.json")
    assert summary["distributions"] == 3
    assert "region" in doc


def test_region_from_distribution_file(chan, tmp_path, capsys):
    ch_dict = json.loads(Path(chan).read_text())
    from rrlab.io import channel_from_dict

    ch = channel_from_dict(ch_dict)
    fds = sample_factored("corollary1", default_cards("corollary1", ch), 2, 0)
    dist = tmp_path / "d.json"
    dist.write_text(json.dumps({"distributions": [distribution_to_dict(f) for f in fds]}))
    code, _, _ = run(["region", "--mode", "corollary1", "--channel", chan, "--dist", str(dist),
                      "--out", str(tmp_path / "a")], capsys)
    assert code == 0
    code, _, _ = run(["region", "--mode", "corollary1", "--channel", chan, "--sample", "2",
                      "--out", str(tmp_path / "b")], capsys)
    assert code == 0
    rows = lambda d: (tmp_path / d / "vertices.csv").read_text().splitlines()[4:]
    assert rows("a") == rows("b")


def test_outer_and_capacity(tmp_path, capsys):
    z = str(DATA / "xor_z.json")
    code, _, _ = run(["outer", "--channel", z, "--grid", "2", "--samples", "5", "--out", str(tmp_path)], capsys)
    assert code == 0
    _csv_header(tmp_path / "outer_vertices.csv")
    _json_header(tmp_path / "outer_halfplanes.json")
    code, out, _ = run(["capacity-z", "--channel", z, "--grid", "4", "--samples", "0",
                        "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = _json_header(tmp_path / "capacity_report.json")
    assert rep["verdict"] == "coincide"
    _csv_header(tmp_path / "capacity_inner.csv")


def test_capacity_refuses_plain_channel(chan, tmp_path, capsys):
    code, _, err = run(["capacity-z", "--channel", chan, "--grid", "2", "--samples", "0",
                        "--out", str(tmp_path)], capsys)
    assert code == 2
    assert json.loads(err)["error"] == "NotDegraded"


def test_check_inclusion(tmp_path, capsys):
    code, _, _ = run(["check-inclusion", "--corollary", "4", "--channels", "2", "--samples", "3",
                      "--out", str(tmp_path)], capsys)
    assert code == 0
    doc = _json_header(tmp_path / "inclusion_report.json")
    assert doc["violations"] == 0


def test_identities(chan, tmp_path, capsys):
    code, _, _ = run(["identities", "--scheme", "rsub", "--channel", chan, "--sample", "5",
                      "--out", str(tmp_path)], capsys)
    assert code == 0
    doc = _json_header(tmp_path / "identities_report.json")
    assert doc["flagged"] == 0 and doc["max_equality_residual"] < 1e-8


def test_simulate_covering(tmp_path, capsys):
    code, _, _ = run(["simulate-covering", "--mode", "gp", "--n", "200", "--trials", "20",
                      "--offsets=-0.2,0.2", "--out", str(tmp_path)], capsys)
    assert code == 0
    lines = _csv_header(tmp_path / "covering.csv")
    assert lines[4] == "offset,n,trials,successes,success_rate,rate_used,threshold,engine"
    assert len(lines) == 7


def test_fme(tmp_path, capsys):
    sysfile = tmp_path / "s.json"
    sysfile.write_text(json.dumps({
        "vars": ["x", "y", "t"],
        "rows": [{"coeffs": {"x": 1, "t": 1}, "sense": "<=", "const": 2},
                 {"coeffs": {"y": 1, "t": -1}, "sense": "<=", "const": 0}],
        "keep": ["x", "y"],
    }))
    code, _, _ = run(["fme", "--system", str(sysfile), "--out", str(tmp_path)], capsys)
    assert code == 0
    _json_header(tmp_path / "fme_system.json")
    verts = {tuple(map(float, r.split(","))) for r in (tmp_path / "fme_vertices.csv").read_text().splitlines()[5:]}
    assert verts == {(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)}


def test_repeat_runs_are_byte_identical(chan, tmp_path, capsys, monkeypatch):
    outs = []
    for i, threads in enumerate(("1", "2", "1")):
        monkeypatch.setenv("RRLAB_THREADS", threads)
        d = tmp_path / str(i)
        assert run(["region", "--mode", "chu", "--channel", chan, "--sample", "6", "--seed", "3",
                    "--out", str(d)], capsys)[0] == 0
        outs.append(((d / "vertices.csv").read_bytes(), (d / "halfplanes.json").read_bytes()))
    assert outs[0] == outs[1] == outs[2]


@pytest.mark.parametrize("argv", [
    ["nope"],
    ["region", "--mode", "theorem1"],
    ["region", "--mode", "theorem1", "--channel", "/does/not/exist.json"],
    ["simulate-covering", "--mode", "gp", "--offsets", "a,b"],
    ["check-inclusion", "--corollary", "3", "--channel", str(DATA / "xor_z.json")],
])
def test_bad_invocations_exit_2(argv, tmp_path, capsys):
    code, out, err = run(argv + ["--out", str(tmp_path)] if argv[0] != "nope" else argv, capsys)
    assert code == 2
    assert out == ""
    assert "error" in json.loads(err)


def test_bad_thread_setting(chan, tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("RRLAB_THREADS", "many")
    code, _, err = run(["region", "--mode", "corollary1", "--channel", chan, "--sample", "8",
                        "--out", str(tmp_path)], capsys)
    assert code == 2
    assert "RRLAB_THREADS" in json.loads(err)["message"]


def test_malformed_channel_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"cards": [2, 2, 2, 2, 2], "w": [0.5] * 31}))
    code, _, err = run(["region", "--mode", "corollary1", "--channel", str(bad), "--out", str(tmp_path)], capsys)
    assert code == 2
    assert set(json.loads(err)) >= {"error", "message"}


def test_unbounded_projection_is_reported(tmp_path, capsys):
    sysfile = tmp_path / "s.json"
    sysfile.write_text(json.dumps({"vars": ["x", "y", "t"],
                                   "rows": [{"coeffs": {"x": 1, "t": 1}, "sense": "<=", "const": 2}],
                                   "keep": ["x", "y"]}))
    code, _, err = run(["fme", "--system", str(sysfile), "--out", str(tmp_path)], capsys)
    assert code == 2
    assert json.loads(err)["error"] == "UnboundedRegion"
