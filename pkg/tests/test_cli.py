import json

import pytest

from motx.cli import main


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    for k in ("MOTX_L", "MOTX_N", "MOTX_WINDOW", "MOTX_OUT", "MOTX_ALGEBRA", "MOTX_CONFIG", "MOTX_CACHE_DIR"):
        monkeypatch.delenv(k, raising=False)
    monkeypatch.setenv("MOTX_CACHE_DIR", str(tmp_path / "cache"))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def tsv_rows(path):
    return [line.split("\t") for line in path.read_text().splitlines()[1:]]


def test_ext_point(tmp_path, capsys):
    code, out, _ = run(capsys, "ext", "--algebra", "lambdaQn", "--module", "builtin:point", "--l", "3", "--n", "1", "--window", "s4,t20", "--out", str(tmp_path))
    assert code == 0
    rows = tsv_rows(tmp_path / "ext.tsv")
    # nonzero rows sit at t = 5s (internal degree of v_1^s), u <= 2s
    for s, t, u, rank, torsion, edge in rows:
        assert int(t) == 5 * int(s) and int(u) <= 2 * int(s) and rank == "1" and torsion == "inf"
    assert {int(r[0]) for r in rows} == {0, 1, 2, 3, 4}
    meta = json.loads((tmp_path / "ext.json").read_text())["metadata"]
    assert len(meta["input_hash"]) == 64
    assert (tmp_path / "chart.svg").read_text().startswith("<svg")
    assert json.loads((tmp_path / "chart.json").read_text())["prime"] == 3


def test_ext_cobar_matches_and_is_deterministic(tmp_path, capsys):
    outs = []
    for alg, name in (("lambdaQn", "a"), ("cobar", "b"), ("cobar", "c")):
        d = tmp_path / name
        assert run(capsys, "ext", "--algebra", alg, "--module", "builtin:B", "--window", "s3,t24", "--out", str(d))[0] == 0
        outs.append(d)
    texts = [(d / "ext.tsv").read_bytes() for d in outs]
    assert texts[0] == texts[1] == texts[2]
    assert (outs[1] / "ext.json").read_bytes() == (outs[2] / "ext.json").read_bytes()
    assert list((tmp_path / "cache").rglob("*.json"))


def test_ext_empty_window(tmp_path, capsys):
    code, _, _ = run(capsys, "ext", "--module", "builtin:point", "--window", "s-1,t-1", "--out", str(tmp_path))
    assert code == 0
    for name in ("ext.tsv", "ext.json", "chart.json", "chart.svg"):
        assert (tmp_path / name).read_text() == ""


def test_ext_module_file(tmp_path, capsys):
    ref = {
        "ring": {"l": 3, "kind": "FlTau"},
        "generators": [{"p": 5, "q": 2, "torsion": None}, {"p": 0, "q": 1, "torsion": None}],
        "q_action": {"deg": [-5, -2], "entries": [[1, 0, 1, 1, 0]]},
    }
    f = tmp_path / "m.json"
    f.write_text(json.dumps(ref))
    code, _, _ = run(capsys, "ext", "--module", str(f), "--window", "s2,t20", "--out", str(tmp_path / "o"))
    assert code == 0
    rows = tsv_rows(tmp_path / "o" / "ext.tsv")
    assert any(r[4] == "1" for r in rows)  # tau-torsion from the action


def test_cone_cv(capsys):
    code, out, _ = run(capsys, "cone", "--map", "builtin:cv", "--l", "3")
    assert code == 0
    assert "tau^2" in out or "torsion=2" in out
    assert "nonzero after tau-inversion: false" in out


def test_classify_cv(capsys):
    code, out, _ = run(capsys, "classify", "--spectrum", "builtin:moore", "--map", "builtin:cv", "--n", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["heights"]["1"]["verdict"] == "fails-isomorphism"
    assert rep["satisfies_definition"] is False
    assert rep["degree"] == [4, 0] and rep["degree_multiple_of_vn"] is False


def test_realize_free(tmp_path, capsys):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"generators": [[0, 0], [3, 1], [4, 5]]}))
    code, out, _ = run(capsys, "realize", "--module", str(f))
    assert code == 0
    d = json.loads(out)
    assert d["rank"] == 3 and d["kernel_generators"] == [] and d["degrees_mod_period"] == [0, 0, 3]


def test_kunneth_and_errors(capsys):
    code, out, _ = run(capsys, "kunneth", "--left", "builtin:moore", "--right", "builtin:moore")
    assert code == 0 and len(json.loads(out)["module"]) == 4
    code, _, err = run(capsys, "kunneth", "--left", "builtin:cone-cv", "--right", "builtin:moore")
    assert code == 2
    assert json.loads(err)["error"] == "hypothesis-violation"


def test_power(capsys):
    code, out, _ = run(capsys, "power", "--map", "builtin:vn")
    assert code == 0 and (json.loads(out)["i"], json.loads(out)["j"]) == (1, 1)
    code, _, err = run(capsys, "power", "--map", "builtin:cv")
    assert code == 2 and json.loads(err)["error"] == "not-isomorphism"


def test_ambiguity_exit_code(tmp_path, capsys):
    ref = {
        "source": {"generators": [[0, 0, 2]]},
        "target": {"generators": [[0, 0, 1], [1, -2]]},
        "map": {"deg": [0, 0], "entries": [[0, 0, 1, 0, 0]]},
    }
    f = tmp_path / "f.json"
    f.write_text(json.dumps(ref))
    code, out, _ = run(capsys, "cone", "--map", str(f))
    assert code == 3 and "candidates" in out


def test_error_paths_are_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    cases = [
        ("ext", "--module", str(bad)),
        ("ext", "--module", "builtin:point", "--l", "4"),
        ("ext", "--module", "builtin:point", "--window", "t4"),
        ("cone", "--map", "builtin:nothing"),
        ("paper",),
        ("nosuchcommand",),
        ("ext",),
    ]
    for argv in cases:
        code, _, err = run(capsys, *argv)
        assert code == 2, argv
        lines = err.strip().splitlines()
        assert len(lines) == 1 and "error" in json.loads(lines[0])


def test_config_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "motx.conf"
    cfg.write_text("# settings\nwindow = s1,t10\nl = 5\n")
    out = tmp_path / "o"

    def ext_rows(*extra):
        assert run(capsys, "--config", str(cfg), "ext", "--module", "builtin:point", "--out", str(out), *extra)[0] == 0
        return tsv_rows(out / "ext.tsv")

    rows = ext_rows()
    assert {r[0] for r in rows} == {"0", "1"} and {r[1] for r in rows} == {"0", "9"}  # l = 5 from the file
    monkeypatch.setenv("MOTX_L", "3")
    rows = ext_rows()
    assert {r[1] for r in rows} == {"0", "5"}  # env beats file
    rows = ext_rows("--l", "5", "--window", "s2,t20")
    assert {r[1] for r in rows} == {"0", "9", "18"}  # flags beat env
    monkeypatch.setenv("MOTX_CONFIG", str(cfg))
    monkeypatch.delenv("MOTX_L")
    assert run(capsys, "ext", "--module", "builtin:point", "--out", str(out))[0] == 0
    assert {r[1] for r in tsv_rows(out / "ext.tsv")} == {"0", "9"}


def test_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.conf"
    cfg.write_text("just words\n")
    code, _, err = run(capsys, "--config", str(cfg), "paper", "--case", "moore")
    assert code == 2 and json.loads(err)["error"] == "malformed-input"


def test_single_reference_case(capsys):
    code, out, _ = run(capsys, "paper", "--case", "cv-cone")
    assert code == 0
    assert out.startswith("PASS cv-cone") and "quotient normal form" in out and "1/1 PASS" in out
