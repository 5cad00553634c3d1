import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from factorizable.channels import identity_channel, transpose_map
from factorizable.cli import dispatch, main, report
from factorizable.free_product import identity_pair_trace, random_trace
from factorizable.matrix_core import haar_unitary, max_abs
from factorizable.matrix_units import standard_units
from factorizable.serialization import (
    MalformedInput,
    channel_from_json,
    channel_to_json,
    dumps,
    matrix_from_json,
    matrix_to_json,
    trace_from_json,
    trace_to_json,
    units_from_json,
    units_to_json,
)


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_report_examples():
    assert report([]) == {"checks": [], "pass": True}
    doc = report([{"name": "a", "pass": True, "residual": 1e-3},
                  {"name": "b", "pass": False, "residual": 0.5},
                  {"name": "c", "pass": False, "residual": 0.25}], tolerance=1e-9, seed=3)
    assert doc["pass"] is False
    assert doc["worst_check"] == "b" and doc["worst_residual"] == 0.5
    assert doc["tolerance"] == 1e-9 and doc["seed"] == 3


def test_identical_seeds_identical_bytes(capsys):
    argv = ["trace", "gen", "--n", "2", "--blocks", "4,6", "--weights", "0.5,0.5", "--seed", "7"]
    _, _, first = run(argv, capsys)
    _, _, second = run(argv, capsys)
    assert first == second
    _, _, other = run(argv[:-1] + ["8"], capsys)
    assert other != first


def test_trace_gen_revalidates(tmp_path, capsys):
    code, doc, _ = run(["trace", "gen", "--n", "2", "--blocks", "4,6", "--weights", "0.5,0.5", "--seed", "7"], capsys)
    assert code == 0 and doc["seed"] == 7
    for side in ("g_units", "f_units"):
        for block in doc[side]:
            path = write(tmp_path, "u.json", {"units": block})
            assert run(["units", "validate", "--in", path], capsys)[0] == 0
    path = write(tmp_path, "t.json", doc)
    code, out, _ = run(["trace", "phi", "--in", path], capsys)
    assert code == 0 and out["verify"]["pass"]


def test_units_commands(tmp_path, capsys):
    code, doc, _ = run(["units", "standard", "--n", "3"], capsys)
    assert code == 0 and doc["n"] == 3 and doc["d"] == 3
    code, rnd, _ = run(["units", "random", "--n", "2", "--d", "6", "--seed", "1"], capsys)
    assert code == 0 and rnd["d"] == 6
    assert run(["units", "validate", "--in", write(tmp_path, "r.json", rnd)], capsys)[0] == 0
    bad = units_to_json(standard_units(2))
    bad["units"][0][1]["entries"][0][1] = [2.0, 0.0]
    code, doc, _ = run(["units", "validate", "--in", write(tmp_path, "b.json", bad)], capsys)
    assert code == 1 and doc["pass"] is False and doc["max_residual"] > 0.5
    # intertwine standard units with a random system of the same size
    code, r2, _ = run(["units", "random", "--n", "2", "--d", "4", "--seed", "2"], capsys)
    code, s4, _ = run(["units", "random", "--n", "2", "--d", "4", "--seed", "3"], capsys)
    code, doc, _ = run(["units", "intertwine", "--in", write(tmp_path, "i.json", {"f": r2, "fp": s4})], capsys)
    assert code == 0 and doc["pass"]
    u = matrix_from_json(doc["u"])
    assert max_abs(u @ units_from_json(s4).units @ u.conj().T - units_from_json(r2).units) < 1e-8


def test_units_from_unitaries(tmp_path, capsys):
    rng = np.random.default_rng(0)
    us = [matrix_to_json(haar_unitary(4, rng)) for _ in range(2)]
    code, doc, _ = run(["units", "from-unitaries", "--in", write(tmp_path, "u.json", {"unitaries": us})], capsys)
    assert code == 0 and doc["n"] == 3 and doc["d"] == 12
    assert run(["units", "validate", "--in", write(tmp_path, "v.json", doc)], capsys)[0] == 0


def test_channel_verify_transpose(tmp_path, capsys):
    path = write(tmp_path, "choi.json", channel_to_json(transpose_map(2)))
    code, doc, _ = run(["channel", "verify", "--in", path], capsys)
    assert code == 1
    assert (doc["cp"], doc["unital"], doc["tp"]) == (False, True, True)
    assert doc["min_eigenvalue"] == pytest.approx(-1, abs=1e-12)
    assert doc["worst_check"] == "cp"


def test_channel_commands(tmp_path, capsys):
    code, idc, _ = run(["channel", "choi", "--map", "identity", "--n", "2"], capsys)
    assert code == 0
    assert run(["channel", "verify", "--in", write(tmp_path, "c.json", idc)], capsys)[0] == 0
    images = [[matrix_to_json(np.eye(2)[[i]].T @ np.eye(2)[[j]]) for j in range(2)] for i in range(2)]
    code, doc, _ = run(["channel", "choi", "--in", write(tmp_path, "im.json", {"images": images})], capsys)
    assert max_abs(channel_from_json(doc).choi - identity_channel(2).choi) == 0
    x = np.array([[1, 2j], [3, 4]])
    code, doc, _ = run(["channel", "apply", "--in",
                        write(tmp_path, "a.json", {"channel": idc, "x": matrix_to_json(x)})], capsys)
    assert np.array_equal(matrix_from_json(doc["result"]), x)
    code, dep, _ = run(["channel", "choi", "--map", "depolarizing", "--n", "2"], capsys)
    code, doc, _ = run(["channel", "distance", "--in", write(tmp_path, "d.json", {"a": idc, "b": dep})], capsys)
    assert doc["distance"] == pytest.approx(np.sqrt(3) / 2)
    u = haar_unitary(4, np.random.default_rng(1))
    code, doc, _ = run(["channel", "from-ancilla", "--blocks", "2", "--weights", "1", "--in",
                        write(tmp_path, "u.json", {"u": matrix_to_json(u)})], capsys)
    assert code == 0
    assert run(["channel", "verify", "--in", write(tmp_path, "f.json", doc)], capsys)[0] == 0


def test_trace_commands(tmp_path, capsys):
    idp = write(tmp_path, "id.json", trace_to_json(identity_pair_trace(2)))
    code, doc, _ = run(["trace", "phi", "--in", idp], capsys)
    assert code == 0 and max_abs(channel_from_json(doc).choi - identity_channel(2).choi) < 1e-12
    code, doc, _ = run(["trace", "correlate", "--in", idp], capsys)
    assert doc["n"] == 2 and doc["values"][0][0][0][0] == [0.5, 0.0]
    tr = random_trace(2, (2, 4), (0.3, 0.7), 4)
    tp = write(tmp_path, "t.json", trace_to_json(tr))
    code, doc, _ = run(["trace", "decompose", "--seed", "0", "--in", tp], capsys)
    assert code == 0 and sum(c["weight"] for c in doc["components"]) == pytest.approx(1)
    assert all(len(c["blocks"]) == 1 for c in doc["components"])
    recombined = {"traces": [c["trace"] for c in doc["components"]],
                  "coeffs": [c["weight"] for c in doc["components"]]}
    code, comb, _ = run(["trace", "combine", "--in", write(tmp_path, "c.json", recombined)], capsys)
    assert code == 0
    code, doc, _ = run(["trace", "fiber", "--in",
                        write(tmp_path, "fb.json", {"a": comb, "b": trace_to_json(tr)})], capsys)
    assert doc["same_fiber"] is True
    code, faithful, _ = run(["trace", "combine", "--in",
                             write(tmp_path, "fc.json", {"traces": [trace_to_json(tr)] * 3})], capsys)
    assert faithful["weights"] == pytest.approx([0.3 * 4 / 7, 0.7 * 4 / 7, 0.3 * 2 / 7, 0.7 * 2 / 7,
                                                 0.3 / 7, 0.7 / 7])


def test_algebra_commands(tmp_path, capsys):
    e = np.zeros((3, 3))
    e[0, 1] = 1
    path = write(tmp_path, "g.json", {"generators": [matrix_to_json(e)]})
    code, doc, _ = run(["algebra", "span", "--in", path], capsys)
    assert code == 0 and doc["dim"] == 5 and doc["contains_unit"]
    code, doc, _ = run(["algebra", "commutant", "--in", path], capsys)
    assert doc["dim"] == 2
    code, doc, _ = run(["algebra", "blocks", "--seed", "0", "--in", path], capsys)
    assert sorted(map(tuple, doc["blocks"])) == [(1, 1), (2, 1)]


@pytest.mark.parametrize("argv", [
    ["nope"],
    [],
    ["units", "frobnicate"],
    ["units", "standard"],
    ["units", "random", "--n", "2", "--d", "4"],
    ["units", "random", "--n", "2", "--d", "3", "--seed", "1"],
    ["trace", "gen", "--n", "2", "--blocks", "2", "--weights", "0.5", "--seed", "1"],
    ["channel", "choi", "--map", "bogus", "--n", "2"],
    ["channel", "verify", "--in", "/nonexistent/file.json"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    captured = capsys.readouterr()
    assert "error" in json.loads(captured.out)


def test_malformed_documents(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["channel", "verify", "--in", str(p)]) == 2
    doc = trace_to_json(identity_pair_trace(2))
    doc["weights"] = [0.5]
    assert main(["trace", "phi", "--in", write(tmp_path, "w.json", doc)]) == 2
    doc = trace_to_json(identity_pair_trace(2))
    doc["g_units"][0][0][0]["entries"][0][0] = [float("nan"), 0]
    p = tmp_path / "nan.json"
    p.write_text(json.dumps(doc))
    assert main(["trace", "phi", "--in", str(p)]) == 2
    non_unitary = {"u": matrix_to_json(2 * np.eye(2)), "blocks": [1], "weights": [1]}
    assert main(["channel", "from-ancilla", "--in", write(tmp_path, "nu.json", non_unitary)]) == 2
    capsys.readouterr()


def test_out_flag(tmp_path, capsys):
    out = tmp_path / "o.json"
    assert main(["units", "standard", "--n", "2", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["n"] == 2


def test_stdin_and_module_entry():
    doc = dumps(channel_to_json(transpose_map(2)))
    proc = subprocess.run([sys.executable, "-m", "factorizable", "channel", "verify"],
                          input=doc, capture_output=True, text=True)
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["cp"] is False


def test_dispatch_returns_document():
    code, doc = dispatch(["units", "standard", "--n", "2"])
    assert code == 0 and doc["d"] == 2


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_matrix_round_trip_exact(d, seed):
    rng = np.random.default_rng(seed)
    m = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) * 10.0 ** rng.integers(-300, 300)
    again = matrix_from_json(json.loads(dumps(matrix_to_json(m))))
    assert np.array_equal(again, m)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trace_round_trip_exact(seed):
    tr = random_trace(2, (2, 4), (0.25, 0.75), seed)
    again = trace_from_json(json.loads(dumps(trace_to_json(tr))))
    assert again.algebra == tr.algebra
    assert np.array_equal(again.g.units, tr.g.units) and np.array_equal(again.f.units, tr.f.units)


def test_matrix_schema_errors():
    for bad in [{"dim": 2, "entries": [[[1, 0]]]}, {"entries": []}, {"dim": 1, "entries": [[[1]]]},
                {"dim": 1, "entries": [[["1", 0]]]}, {"dim": 1, "entries": [[[True, 0]]]}]:
        with pytest.raises(MalformedInput):
            matrix_from_json(bad)
