import json

import pytest

from app import CommandRequest, UsageError, main, run
from modules.analysis_module import Verdict
from modules.averaging_module import RSeriesTable
from modules.model_module import model_to_config
from modules.series_module import parse_expression
from utilities.report_utils import dumps_json, load_json, write_series_file


@pytest.fixture
def model_file(tmp_path):
    def write(model, name="model.json"):
        path = tmp_path / name
        path.write_text(json.dumps(model_to_config(model)), encoding="utf-8")
        return str(path)
    return write


def test_raverage_prints_series(model_file, quadric, capsys):
    code = main(["raverage", "--model", model_file(quadric), "--monomial", "zbar^2", "-N", "6"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "w + 1/2 z^2"


def test_average_on_product_model(model_file, silly, capsys):
    assert main(["average", "--model", model_file(silly), "--monomial", "wbar^2", "-N", "12"]) == 0
    assert capsys.readouterr().out.strip() == "-w^2 + z^3"


def test_holo_test_exit_codes(model_file, quadric, capsys):
    path = model_file(quadric)
    assert main(["holo-test", "--model", path, "--monomial", "zbar"]) == 1
    out = capsys.readouterr().out
    assert "fails at ell = 2" in out
    assert "w + 1/4 z^2" in out
    assert main(["holo-test", "--model", path, "--monomial", "zbar^2 + z*zbar"]) == 0
    assert "extension: w" in capsys.readouterr().out


def test_holo_test_silly_cubic_series(model_file, silly, tmp_path, capsys):
    series_path = tmp_path / "wbar.series"
    write_series_file(str(series_path), parse_expression("wbar", silly.signature(), 8))
    assert main(["holo-test", "--model", model_file(silly), "--series", str(series_path), "-N", "8"]) == 1
    out = capsys.readouterr().out
    assert "fails at ell = 2" in out
    assert "discrepancy: -w^2 + z^3" in out


def test_equal_test_with_series_file(model_file, quadric, tmp_path, capsys):
    series_path = tmp_path / "wbar.series"
    write_series_file(str(series_path), parse_expression("wbar", quadric.signature(), 4))
    args = ["equal-test", "--model", model_file(quadric), "--series", str(series_path)]
    assert main(args + ["--monomial", "z^2 + z*zbar"]) == 0
    assert main(args + ["--monomial", "z^2"]) == 1
    capsys.readouterr()


def test_flatten_commands(model_file, quadric, capsys):
    path = model_file(quadric)
    assert main(["flatten-test", "--model", path, "--monomial", "w"]) == 1
    assert main(["flatten-test", "--model", path, "--monomial", "w + z^2"]) == 0
    capsys.readouterr()
    assert main(["flatten-search", "--model", path, "-D", "2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("theta candidates: w + z^2\n")
    assert "verified:\n  w + z^2" in out


def test_usage_errors(model_file, quadric, tmp_path):
    path = model_file(quadric)
    assert main(["raverage", "--monomial", "zbar"]) == 2
    assert main(["raverage", "--model", path, "--monomial", "zbar", "-N", "1"]) == 2
    assert main(["raverage", "--model", path]) == 2
    assert main(["equal-test", "--model", path, "--monomial", "zbar"]) == 2
    assert main(["raverage", "--model", path, "--monomial", "z*zbar"]) == 2
    assert main(["raverage", "--model", str(tmp_path / "missing.json"), "--monomial", "zbar"]) == 2
    assert main(["summon"]) == 2
    assert main(["reconstruct"]) == 2


def test_run_rejects_bad_requests():
    with pytest.raises(UsageError):
        run(CommandRequest(command="average"))
    with pytest.raises(UsageError):
        run(CommandRequest(command="rtable", model_path="x.json", jobs=0))


def test_rtable_reconstruct_round_trip(model_file, bishop, tmp_path, capsys):
    table_path = tmp_path / "table.json"
    model_path = tmp_path / "recovered.json"
    assert main(["rtable", "--model", model_file(bishop), "-N", "4", "-D", "4", "--json", str(table_path)]) == 0
    assert "leading-term law: ok" in capsys.readouterr().out
    assert main(["reconstruct", "--rtable", str(table_path), "--json", str(model_path)]) == 0
    capsys.readouterr()
    assert load_json(str(model_path)) == model_to_config(bishop)


def test_json_reports_are_byte_stable(model_file, quadric, tmp_path, capsys):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    path = model_file(quadric)
    for out in (first, second):
        assert main(["rtable", "--model", path, "-N", "6", "--jobs", "3", "--json", str(out)]) == 0
    capsys.readouterr()
    text = first.read_text(encoding="utf-8")
    assert text == second.read_text(encoding="utf-8")
    assert dumps_json(RSeriesTable.from_dict(load_json(str(first))).to_dict()) == text


def test_defeq(model_file, bishop, capsys):
    path = model_file(bishop)
    assert main(["defeq", "--model", path, "-N", "6"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert [line.split(" = ")[0] for line in lines] == ["Phi(0, 2)", "Phi(1, 1)", "Phi(2, 0)"]
    assert main(["defeq", "--model", path, "-N", "6", "--conjugate"]) == 0
    assert "wbar" in capsys.readouterr().out


def test_genfun_check(model_file, quadric, silly, capsys):
    assert main(["genfun-check", "--model", model_file(quadric), "-N", "8", "-M", "6"]) == 0
    out = capsys.readouterr().out
    assert "generating identity: agrees" in out
    assert "printed quadric form: differs at s-powers [0" in out
    assert main(["genfun-check", "--model", model_file(silly, "silly.json"), "-M", "4"]) == 0
    assert "printed quadric form" not in capsys.readouterr().out


def test_malformed_rtable_is_a_usage_error(tmp_path, capsys):
    table_path = tmp_path / "table.json"
    table_path.write_text(json.dumps({"k": 2, "order": 4, "degree_bound": 2, "weights": {"z": 1, "w": 2},
                                      "entries": [{"a": 1, "b": 0, "series": 5}]}), encoding="utf-8")
    assert main(["reconstruct", "--rtable", str(table_path)]) == 2
    table_path.write_text(json.dumps({"k": 2, "order": 4, "degree_bound": 2, "entries": 7}), encoding="utf-8")
    assert main(["reconstruct", "--rtable", str(table_path)]) == 2
    table_path.write_text("[1, 2]", encoding="utf-8")
    assert main(["reconstruct", "--rtable", str(table_path)]) == 2
    assert capsys.readouterr().out == ""


def test_degenerate_model_is_a_usage_error(tmp_path, capsys):
    path = tmp_path / "degenerate.json"
    path.write_text(json.dumps({"kind": "hypersurface", "k": 2, "alpha": [["0", "0"], ["1", "0"], ["1", "0"]]}),
                    encoding="utf-8")
    assert main(["raverage", "--model", str(path), "--monomial", "zbar"]) == 2
    assert main(["holo-test", "--model", str(path), "--monomial", "zbar"]) == 2
    assert capsys.readouterr().out == ""


def test_verdict_reports_are_byte_stable(model_file, quadric, tmp_path, capsys):
    path = model_file(quadric)
    for monomial, code in (("zbar", 1), ("zbar^2 + z*zbar", 0)):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for out in (first, second):
            assert main(["holo-test", "--model", path, "--monomial", monomial,
                         "--jobs", "2", "--json", str(out)]) == code
        text = first.read_text(encoding="utf-8")
        assert text == second.read_text(encoding="utf-8")
        assert dumps_json(Verdict.from_dict(load_json(str(first))).to_dict()) == text
    capsys.readouterr()


@pytest.mark.parametrize("command", [
    ["flatten-search", "-D", "4"],
    ["genfun-check", "-N", "8", "-M", "6"],
    ["defeq", "-N", "6"],
])
def test_reports_reserialize_identically(model_file, quadric, tmp_path, capsys, command):
    out = tmp_path / "report.json"
    assert main([command[0], "--model", model_file(quadric)] + command[1:] + ["--json", str(out)]) == 0
    capsys.readouterr()
    text = out.read_text(encoding="utf-8")
    assert dumps_json(load_json(str(out))) == text
