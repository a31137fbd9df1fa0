import json

import pytest

from dfforge.cli import dump_json, format_float, main

MODEL = {
    "schema_version": 1,
    "name": "two-term",
    "convention": "relative_bounded",
    "terms": [
        {"family": "pure_radial", "n": 0, "coeff": [{"c": 1.0, "p": 3.0}]},
        {"family": "pure_radial", "n": 1, "coeff": [{"c": 0.2, "p": 4.0}]},
    ],
}


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps(MODEL))
    return str(path)


def run(tmp_path, name, *argv):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out.read_bytes()


def test_float_format():
    assert format_float(0.1) == "0.10000000000000001"
    assert dump_json({"b": float("nan"), "a": [1.5, 2]}) == dump_json({"a": [1.5, 2], "b": float("inf")})


def test_synthesize_json(tmp_path, model_file):
    code, out = run(tmp_path, "s.json", "synthesize", "--model", model_file)
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1
    assert [c["lz_power"] for c in doc["components"]] == [0, 2]


def test_eval_grid_csv(tmp_path):
    code, out = run(tmp_path, "g.csv", "eval-grid", "--builtin", "lyndenbell:a=0",
                    "--e-min", "0.5", "--e-max", "1", "--e-steps", "2", "--lz-steps", "2")
    lines = out.decode().splitlines()
    assert code == 0 and lines[0] == "energy,Lz,f" and len(lines) == 5
    assert lines[3].startswith("1,")


@pytest.mark.parametrize("argv", [
    ("eval-grid", "--builtin", "binney:q=0.9", "--e-steps", "5", "--lz-steps", "3"),
    ("moments", "--builtin", "lyndenbell:a=0.5", "--psi-steps", "3", "--r-steps", "3"),
    ("contour", "--builtin", "binney:q=1", "--e-steps", "41", "--lz-steps", "41"),
    ("verify", "--builtin", "fricke:p=3.5,n=1", "--points", "3"),
])
def test_byte_identical_reruns(tmp_path, argv):
    _, a = run(tmp_path, "a", *argv)
    _, b = run(tmp_path, "b", *argv)
    assert a == b and len(a) > 0


def test_moments_marks_undefined_points(tmp_path, caplog):
    code, out = run(tmp_path, "m.csv", "moments", "--builtin", "lyndenbell:a=0.5",
                    "--psi-min", "1", "--psi-max", "1", "--psi-steps", "1",
                    "--r-min", "2", "--r-max", "2", "--r-steps", "1")
    assert code == 0
    assert out.decode().splitlines()[1] == "1,2,nan,nan,0"


def test_moments_with_rotation_law(tmp_path):
    code, out = run(tmp_path, "m.csv", "moments", "--builtin", "binney:q=0.9",
                    "--psi-steps", "1", "--psi-min", "0.5", "--r-steps", "1", "--r-min", "1",
                    "--rotation", "0,1,1")
    assert code == 0 and out.decode().splitlines()[1].endswith(",0.5")


@pytest.mark.parametrize("builtin, code", [("binney:q=0.8", 0), ("binney:q=1.1", 8), ("lyndenbell:a=0.5", 0)])
def test_verify_exit_codes(tmp_path, builtin, code):
    got, out = run(tmp_path, "v.json", "verify", "--builtin", builtin, "--points", "4")
    doc = json.loads(out)
    assert got == code == doc["exit_code"]
    assert doc["positivity"]["flagged"] is (code == 8)


def test_verify_model_file(tmp_path, model_file):
    code, out = run(tmp_path, "v.json", "verify", "--model", model_file, "--points", "3")
    doc = json.loads(out)
    assert code == 0 and doc["round_trip_max_rel_err"] < 1e-8


def test_contour_figure_preset(tmp_path):
    code, out = run(tmp_path, "c.json", "contour", "--preset", "figure", "--e-steps", "61",
                    "--lz-steps", "61", "--n-levels", "4")
    doc = json.loads(out)
    assert code == 0 and len(doc["panels"]) == 3
    for panel in doc["panels"]:
        v = [lev["level"] for lev in panel["levels"]]
        assert all(abs(b / a - 0.4) < 1e-13 for a, b in zip(v, v[1:]))


def test_errors_exit_one(tmp_path, capsys):
    assert main(["synthesize", "--builtin", "nope"]) == 1
    assert "builtin" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**MODEL, "terms": [{"n": 0, "coeff": [{"c": "one"}]}]}))
    assert main(["synthesize", "--model", str(bad)]) == 1
    assert "terms[0].coeff[0].c" in capsys.readouterr().err


def test_argparse_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--points", "many"])
    assert exc.value.code == 2


def test_quad_tol_flag(tmp_path, model_file):
    code, _ = run(tmp_path, "s.json", "synthesize", "--model", model_file, "--quad-tol", "1e-8")
    assert code == 0
