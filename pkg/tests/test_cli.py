import csv
import json

import pytest

from brforest.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def iris_csv(tmp_path):
    from brforest.dataset import builtin_path
    return builtin_path("iris")


def test_train_and_predict(tmp_path, capsys, iris_csv):
    model = tmp_path / "iris.model.json"
    code, out, _ = run(capsys, "train", iris_csv, "--label", "class", "-o", model)
    assert code == 0 and "3 trees" in out
    json.loads(model.read_text())
    queries = tmp_path / "q.csv"
    queries.write_text("a,b,c,d\n5.1,3.5,1.4,0.2\n6.5,3.0,5.5,1.8\n")
    code, out, _ = run(capsys, "predict", model, queries)
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows == [["row", "prediction"], ["0", "setosa"], ["1", "virginica"]]
    code, out, err = run(capsys, "predict", model, iris_csv, "--score", "--format", "json")
    assert code == 0 and "accuracy" in err
    assert len(json.loads(out)["predictions"]) == 150


def test_train_errors(tmp_path, capsys):
    code, _, err = run(capsys, "train", tmp_path / "missing.csv", "-o", tmp_path / "m.json")
    assert code == 3 and "file not found" in err
    code, _, err = run(capsys, "train", "builtin:iris", "--features", 99, "-o", tmp_path / "m.json")
    assert code == 3 and "SubsetTooLarge" in err
    assert not (tmp_path / "m.json").exists()


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_eval_formats(tmp_path, capsys):
    out_path = tmp_path / "r.json"
    code, table, _ = run(capsys, "eval", "builtin:iris", "--format", "json", "-o", out_path,
                         "--timing-repeats", 1)
    assert code == 0 and "baseline" in table
    doc = json.loads(out_path.read_text())
    assert doc["reports"][0]["k"] == 5
    code, out, _ = run(capsys, "eval", "builtin:iris", "--format", "csv", "--variants", "brf",
                       "--timing-repeats", 1)
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["dataset", "variant", "fold", "accuracy"] and len(rows) == 6


def test_sweep_trees(capsys):
    code, out, _ = run(capsys, "sweep-trees", "builtin:iris", "--counts", "1,10,100,10")
    rows = list(csv.reader(out.splitlines()))
    assert code == 0 and rows[0] == ["trees", "accuracy"]
    assert [r[0] for r in rows[1:]] == ["1", "10", "100"]
    acc = {int(r[0]): float(r[1]) for r in rows[1:]}
    assert acc[100] >= acc[1] - 0.02


def test_consistency_csv(tmp_path, capsys):
    path = tmp_path / "c.csv"
    code, _, _ = run(capsys, "consistency", "--n", "100,400", "--seeds", 2, "--n-test", 500,
                     "-o", path)
    rows = list(csv.reader(path.read_text().splitlines()))
    assert code == 0 and rows[0] == ["n", "median_error", "bayes_risk"]
    assert all(len(r) == 3 for r in rows) and rows[1][2] == rows[2][2]


def test_inspect_power(tmp_path, capsys):
    snap = tmp_path / "s.json"
    snap.write_text(json.dumps({"players": [1, 2, 3, 4],
                                "winning": {"4": [[2], [2, 3], [1, 2]]}}))
    code, out, _ = run(capsys, "inspect-power", snap, "--features", "4")
    report = json.loads(out)
    assert code == 0 and report[0]["wins"] == 3 and report[0]["coalitions"] == 7
    code, out, _ = run(capsys, "inspect-power", snap, "--features", "")
    assert json.loads(out) == []
    snap.write_text(json.dumps({"players": [0, 1, 2], "delta": "all"}))
    code, out, _ = run(capsys, "inspect-power", snap)
    assert [r["index"] for r in json.loads(out)] == [1.0, 1.0, 1.0]
    snap.write_text(json.dumps({"players": list(range(6)), "delta": "all"}))
    code, _, err = run(capsys, "inspect-power", snap)
    assert code == 3 and "GroupTooLarge" in err


def test_inspect_power_on_data(capsys):
    code, out, _ = run(capsys, "inspect-power", "--csv", "builtin:iris", "--features", "0,1,2,3")
    assert code == 0 and len(json.loads(out)) == 4


def test_model_outputs_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "train", "builtin:wine", "--seed", 4, "-o", a)
    run(capsys, "train", "builtin:wine", "--seed", 4, "-o", b)
    assert a.read_bytes() == b.read_bytes()
