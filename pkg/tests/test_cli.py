import csv
import json
from fractions import Fraction

import pytest

from online_embed.cli import main
from online_embed.metric import MetricSpace


@pytest.fixture
def metric_file(tmp_path):
    def write(rows, name="m.json"):
        s = MetricSpace()
        for r in rows:
            s.expose(r)
        path = tmp_path / name
        path.write_text(json.dumps(s.to_json()))
        return str(path)

    return write


def load(path):
    with open(path) as fh:
        return json.load(fh)


def test_embed_greedy_chain(metric_file, tmp_path, capsys):
    out = tmp_path / "e.json"
    assert main(["embed", metric_file([[], [1], [3, 2]]), "--algo", "greedy-tree", "--out", str(out)]) == 0
    report = load(tmp_path / "e.report.json")
    assert report["passed"] and report["distortion"]["distortion"] == "1"
    with open(tmp_path / "e.csv") as fh:
        assert [r["name"] for r in csv.DictReader(fh)] == ["expansion", "domination"]
    assert '"passed": true' in capsys.readouterr().out


def test_embed_line_positions(metric_file, tmp_path):
    out = tmp_path / "line.json"
    assert main(["embed", metric_file([[], [1]]), "--algo", "line", "--out", str(out)]) == 0
    assert load(out)["pos"] == ["0", "1/8"]


def test_embed_linf_dedup_off(metric_file, tmp_path):
    out = tmp_path / "linf.json"
    rc = main(["embed", metric_file([[], [1]]), "--algo", "linf", "--delta", "1/2", "--dedup", "off", "--out", str(out)])
    assert rc == 0
    rep = load(tmp_path / "linf.report.json")
    assert rep["branches"] == 5 and rep["delta"] == "1/2"


def test_embed_linf_guarantee(metric_file, tmp_path):
    out = tmp_path / "g.json"
    rows = [[], [1], [Fraction(3, 4), Fraction(1, 2)]]
    assert main(["embed", metric_file(rows), "--algo", "linf", "--epsilon", "0.5", "--out", str(out)]) == 0
    names = {c["name"]: c["pass"] for c in load(tmp_path / "g.report.json")["checks"]}
    assert names == {"lipschitz": True, "distortion": True, "pair-certificate": True}


def test_embed_prefix_and_float_backend(metric_file, tmp_path):
    out = tmp_path / "f.json"
    path = metric_file([[], [1], [1, 1], [2, 1, 1]])
    assert main(["embed", path, "--algo", "steiner-greedy", "--n", "3", "--backend", "float", "--out", str(out)]) == 0
    rep = load(tmp_path / "f.report.json")
    assert rep["n"] == 3 and rep["backend"] == "float"


@pytest.mark.parametrize(
    "extra",
    [
        ["--algo", "linf"],  # neither epsilon nor delta
        ["--algo", "linf", "--epsilon", "2"],
        ["--algo", "line", "--n", "9"],
        ["--algo", "linf", "--delta", "1/2", "--max-branches", "100000000"],
    ],
)
def test_embed_config_errors(metric_file, tmp_path, extra):
    assert main(["embed", metric_file([[], [1]]), *extra, "--out", str(tmp_path / "x.json")]) == 2


def test_embed_missing_file(tmp_path):
    assert main(["embed", str(tmp_path / "none.json"), "--algo", "line"]) == 2


def test_embed_cap_exceeded(metric_file, tmp_path):
    rc = main(["embed", metric_file([[], [1]]), "--algo", "linf", "--delta", "1/2", "--max-branches", "3",
               "--out", str(tmp_path / "c.json")])
    assert rc == 2


def test_embed_rejects_non_tree_metric(metric_file, tmp_path):
    path = metric_file([[], [1], [2, 1], [1, 2, 1]])
    assert main(["embed", path, "--algo", "steiner-tree", "--out", str(tmp_path / "s.json")]) == 2


@pytest.mark.parametrize(
    "adv, algo, n", [("tree", "greedy-tree", 3), ("linf-dim", "linf-lineage", 2), ("l2", "l2-placer", 2)]
)
def test_duel_then_report_replay(tmp_path, capsys, adv, algo, n):
    out = tmp_path / "t.json"
    assert main(["duel", "--adversary", adv, "--algo", algo, "--n", str(n), "--out", str(out)]) == 0
    assert load(tmp_path / "t.report.json")["passed"]
    assert (tmp_path / "t.csv").read_text().startswith("step,event,bound,measured,pass")
    capsys.readouterr()
    assert main(["report", str(out), "--replay", "--csv", str(tmp_path / "r.csv")]) == 0
    assert "replay identical: True" in capsys.readouterr().out
    assert (tmp_path / "r.csv").read_text() == (tmp_path / "t.csv").read_text()


def test_duel_incompatible(tmp_path):
    args = ["duel", "--adversary", "tree", "--algo", "line", "--n", "2", "--out", str(tmp_path / "t.json")]
    assert main(args) == 2


def test_report_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["report", str(bad)]) == 2


def test_verify_writes_summary(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "isometry", "--trials", "3", "--jobs", "2", "--out", str(out)]) == 0
    summary = load(out)
    assert summary["passed"] and [r["trial"] for r in summary["results"]] == [0, 1, 2]


def test_argparse_rejects_unknown_algo():
    with pytest.raises(SystemExit) as exc:
        main(["embed", "m.json", "--algo", "magic"])
    assert exc.value.code == 2
