import csv
import io
import json

import pytest

from modriemann.cli import STUDY_COLUMNS, RunConfig, main, parse_map, parse_schedule, run, to_json
from modriemann import Interval, Weight


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_study_json(capsys):
    code, out, _ = call(capsys, "study", "--f", "x", "--map", "gamma:0.5", "--schedule", "dyadic:4:12", "--output", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["command"] == "study"
    assert doc["verdict"] == "converged"
    assert doc["oracle"]["value"] == pytest.approx(0.25, abs=1e-12)
    assert doc["config"]["map_spec"] == "gamma:0.5"
    assert "out_path" not in doc["config"]
    assert [r["n"] for r in doc["results"]] == [2**k for k in range(4, 13)]
    assert set(doc["results"][0]) == set(STUDY_COLUMNS)
    assert doc["dominated"] is True


def test_study_csv_columns(capsys):
    code, out, _ = call(capsys, "study", "--f", "x", "--map", "gamma:0.5", "--schedule", "1024,4096", "--output", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == STUDY_COLUMNS
    assert len(rows) == 3


def test_modsum_lipschitz(capsys):
    code, out, _ = call(capsys, "modsum", "--f", "1", "--map", "lipschitz:x/2", "--n", "64", "--output", "json")
    assert code == 0
    assert json.loads(out)["results"][0]["s"] == pytest.approx(0.5, abs=1e-14)


def test_integrate_table(capsys):
    code, out, _ = call(capsys, "integrate", "--f", "x^2", "--psi", "1+x", "--n", "256")
    assert code == 0
    assert "oracle: 0.58333" in out


def test_diagnose(capsys):
    code, out, _ = call(
        capsys, "diagnose", "--f", "x^2", "--psi", "1+x", "--map", "lengthphi:sin(t):alpha=0", "--n", "256",
        "--rule", "left", "--output", "json",
    )
    assert code == 0
    row = json.loads(out)["results"][0]
    assert abs(row["residual"]) <= 1e-12 * abs(row["s"])


def test_signal(capsys):
    code, out, _ = call(capsys, "signal", "--f", "1+0.5*cos(2*pi*x)", "--output", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["rule"] == "left"
    assert doc["results"][-1]["gated"] == pytest.approx(0.5, abs=1e-3)


def test_hypothesis_exit(capsys):
    code, _, err = call(capsys, "study", "--f", "x", "--map", "lengthphi:t+0.1:alpha=0")
    assert code == 2
    assert "φ(α)=0" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["study", "--f", "x*", "--map", "gamma:0.5"],
        ["study", "--f", "x", "--map", "bogus:1"],
        ["study", "--f", "x", "--map", "gamma:0.5", "--schedule", "dyadic:4"],
        ["modsum", "--f", "log(x-2)", "--map", "gamma:0.5", "--n", "4"],
        ["study", "--f", "x"],
        ["frobnicate"],
    ],
)
def test_usage_exit(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 1
    assert err.startswith("error:")


def test_schedule_too_coarse_exit(capsys):
    code, _, _ = call(capsys, "study", "--f", "x", "--map", "lengthphi:sin(t):alpha=0", "--schedule", "1,2")
    assert code == 2


def test_inconclusive_exit(capsys):
    code, out, _ = call(capsys, "study", "--f", "sin(40*x)", "--map", "gamma:0.5", "--schedule", "2,4", "--tol", "1e-9")
    assert code == 3
    assert "inconclusive" in out


def test_out_file(tmp_path):
    target = tmp_path / "r.json"
    assert run(RunConfig("modsum", map_spec="gamma:0.5", n=8, output="json", out_path=str(target))) == 0
    assert json.loads(target.read_text())["results"][0]["n"] == 8


def test_parse_schedule():
    assert parse_schedule("dyadic:2:4") == [4, 8, 16]
    assert parse_schedule("3, 5,9") == [3, 5, 9]


def test_parse_map_kinds():
    w = Weight.uniform(Interval(0, 1))
    assert parse_map("gamma:0.25", w).kind == "gamma"
    assert parse_map("lengthphi:sin(t):alpha=0:seed=3", w).placement.kind == "seeded"
    assert parse_map("targetc:2:gamma=0.5", w).kind == "targetc"
    assert parse_map("targetd:2+x:gamma=1", w).kind == "targetd"
    assert parse_map("lipschitz:x/3", w).kind == "lipschitz"


def test_json_floats_roundtrip():
    x = 0.1 + 0.2
    assert json.loads(to_json({"v": x}))["v"] == x
    assert to_json([1, True, None, float("inf")]) == "[\n  1,\n  true,\n  null,\n  null\n]"
