import json

from ltlab.cli import Result, main, render_report


def test_count_hermitian(capsys):
    assert main(["count", "--curve", "hermitian", "--q", "3", "--k", "2"]) == 0
    assert capsys.readouterr().out.strip() == "28"


def test_even_q_is_usage_error(capsys):
    assert main(["count", "--q", "4", "--k", "1"]) == 2
    assert "odd prime" in capsys.readouterr().err


def test_unknown_flag_is_usage_error(capsys):
    assert main(["count", "--bogus"]) == 2
    assert main(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_env_budget(monkeypatch, capsys):
    monkeypatch.setenv("LT_LAB_BUDGET", "10")
    assert main(["count", "--q", "3", "--k", "3"]) == 2
    monkeypatch.setenv("LT_LAB_BUDGET", "zero")
    assert main(["count", "--q", "3"]) == 2


def test_artifacts_and_determinism(tmp_path, capsys):
    for run in ("a", "b"):
        assert main(["graph", "--q", "3", "--radius", "1", "--out", str(tmp_path / run)]) == 0
    for name in ("graph.json", "graph_graph.dot"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    dot = (tmp_path / "a" / "graph_graph.dot").read_text()
    assert dot.count("label=") == 5
    doc = json.loads((tmp_path / "a" / "graph.json").read_text())
    assert doc["schema"] == 1 and doc["vertices"] == 5 and doc["checks"]["tree"]


def test_count_csv(tmp_path):
    assert main(["--out", str(tmp_path), "count", "--q", "3", "--k", "1", "2"]) == 0
    lines = (tmp_path / "count_counts.csv").read_text().splitlines()
    assert lines[0] == "curve,k,points" and lines[2].endswith(",2,28")


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[DEFAULT]\nq = 3\n[graph]\nradius = 3\n")
    assert main(["--json", "graph", "--config", str(cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["vertices"] == 21
    assert main(["--json", "graph", "--config", str(cfg), "--radius", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["vertices"] == 5


def test_modular_graph_requires_inputs(capsys):
    assert main(["modular-graph", "--p", "3", "--n", "1"]) == 2
    assert main(["--json", "modular-graph", "--p", "3", "--n", "1", "--s", "1", "--igusa-genus", "0"]) == 0
    doc = json.loads(capsys.readouterr().out)
    igusa = [r for r in doc["rows"] if r["curve"] == "Igusa"]
    assert igusa[0]["count"] == 4


def test_strata_and_split_check(capsys):
    assert main(["--json", "strata", "--q", "3"]) == 0
    assert len(json.loads(capsys.readouterr().out)["rows"]) == 10
    assert main(["split-check", "--q", "3", "--kind", "ramified-pi"]) == 0


def test_character_match_exit_codes(capsys):
    assert main(["character", "--curve", "hyper", "--q", "3", "--match", "2"]) == 0
    assert main(["character", "--curve", "dl", "--q", "3", "--match", "1"]) == 2


def test_render_report_empty():
    table, doc = render_report(Result("count", ["curve", "k", "points"]))
    assert table.splitlines()[0].split() == ["curve", "k", "points"]
    assert len(table.splitlines()) == 2
    assert json.loads(doc)["rows"] == []


def test_render_report_deterministic():
    res = Result("x", ["a", "b"], [{"a": 1, "b": "z"}, {"a": 22, "b": None}], extra={"k": [3, 1]})
    assert render_report(res) == render_report(res)


def test_jl_check_rows(capsys):
    assert main(["--json", "jl-check", "--q", "3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    parts = [r["part"] for r in doc["rows"]]
    assert parts == ["depth_zero"] * 3 + ["unramified"] * 6 + ["ramified"] * 2
