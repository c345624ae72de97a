import json
import os
import subprocess
import sys

import pytest

from cusped.cli.main import main
from cusped.cli.spec import SpecError, dump_spec, parse_spec, validate_spec
from cusped.export import export_graph, to_csv, to_dot
from cusped.groups import FreeAbelian
from cusped.horoball import build_horoball


def horoball_spec(out, **analysis):
    spec = {
        "schema_version": 1,
        "pair": {"group": {"kind": "free_abelian", "rank": 1}},
        "truncation": {"kind": "horoball", "width_radius": 3, "max_depth": 2},
        "analyses": [analysis] if analysis else [],
        "output": {"dir": str(out)},
    }
    return spec


def write(tmp_path, spec, name="spec.json"):
    p = tmp_path / name
    p.write_text(json.dumps(spec), encoding="utf-8")
    return str(p)


TREE_TOML = """schema_version = 1

[pair]
group = { kind = "free", rank = 2 }

[truncation]
kind = "cayley"
cayley_radius = 2

[[analyses]]
type = "delta"
mode = "exact"

[output]
dir = "OUT"
"""


def test_dot_has_one_node_per_vertex():
    H = build_horoball(FreeAbelian(1), 3, 2)
    text = to_dot(H)
    nodes = [l for l in text.splitlines() if "[label=" in l]
    assert len(nodes) == H.graph.n_vertices == 21
    assert '  0 [label="horoball/e/0"];' in nodes
    assert sum(" -- " in l for l in text.splitlines()) == H.graph.n_edges
    assert text.endswith("}\n")


def test_csv_export_is_sorted_and_byte_stable(tmp_path):
    H = build_horoball(FreeAbelian(1), 3, 2)
    export_graph(H, "csv", tmp_path / "a")
    export_graph(build_horoball(FreeAbelian(1), 3, 2), "csv", tmp_path / "b")
    for name in ("vertices.csv", "edges.csv"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes()
        assert a.endswith(b"\n") and b"\r" not in a
    verts, edges = to_csv(H)
    assert verts.splitlines()[0] == "index,kind,element,depth"
    rows = [tuple(map(int, l.split(","))) for l in edges.splitlines()[1:]]
    assert edges.splitlines()[0] == "u,v"
    assert len(rows) == H.graph.n_edges and all(u < v for u, v in rows)


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "out"
    ok = write(tmp_path, horoball_spec(out, type="delta", mode="exact"))
    assert main(["run", "--spec", ok]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["analyses"][0]["status"] == "ok"

    no_seed = write(tmp_path, horoball_spec(out, type="delta", mode="sampled", sample_size=10), "s1.json")
    assert main(["delta", "--spec", no_seed]) == 1
    assert "seed" in capsys.readouterr().err

    extra = horoball_spec(out)
    extra["colour"] = "red"
    assert main(["build", "--spec", write(tmp_path, extra, "s2.json")]) == 1

    big = horoball_spec(out, type="delta", mode="exact")
    big["truncation"] = {"kind": "horoball", "width_radius": 60, "max_depth": 5}
    assert main(["delta", "--spec", write(tmp_path, big, "s3.json")]) == 2

    assert main(["run", "--spec", str(tmp_path / "missing.json")]) == 3
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["export", "--spec", ok, "--out", str(blocker / "sub")]) == 3


def test_unknown_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate", "--spec", "x"])
    assert info.value.code == 1


def test_toml_spec_on_tree_gives_zero_delta(tmp_path):
    out = tmp_path / "t"
    p = tmp_path / "tree.toml"
    p.write_text(TREE_TOML.replace("OUT", str(out)), encoding="utf-8")
    assert main(["delta", "--spec", str(p)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["analyses"][0]["result"]["delta_fourpoint"] == 0


def test_spec_round_trip(tmp_path):
    spec = parse_spec(write(tmp_path, horoball_spec(tmp_path, type="delta", mode="sampled",
                                                   sample_size=100, seed=3)))
    assert validate_spec(json.loads(dump_spec(spec))) == spec
    with pytest.raises(SpecError) as info:
        validate_spec({"schema_version": 2})
    assert info.value.errors


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "cusped", *args], capture_output=True, text=True,
                          env={**os.environ, "PYTHONHASHSEED": "random"})


def test_reports_do_not_depend_on_threads(tmp_path):
    spec = horoball_spec(tmp_path, type="delta", mode="sampled", sample_size=3000, seed=5)
    spec["truncation"] = {"kind": "horoball", "width_radius": 20, "max_depth": 4}
    p = write(tmp_path, spec)
    for n in ("1", "4"):
        r = _cli("run", "--spec", p, "--out", str(tmp_path / n), "--threads", n)
        assert r.returncode == 0, r.stderr
    assert (tmp_path / "1" / "report.json").read_bytes() == (tmp_path / "4" / "report.json").read_bytes()


def test_vertex_cap_environment_variable(tmp_path):
    p = write(tmp_path, horoball_spec(tmp_path / "o"))
    env = {**os.environ, "CUSPED_MAX_VERTICES": "10"}
    r = subprocess.run([sys.executable, "-m", "cusped", "build", "--spec", p], capture_output=True,
                       text=True, env=env)
    assert r.returncode == 2
