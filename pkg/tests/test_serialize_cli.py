import json

import numpy as np
import pytest

from renorm import Day, Euclidean, SchemaError, WeightedLp, pimple_norm
from renorm import serialize as S
from renorm.cli import RunManifest, main, run_command
from renorm.corpus import interacting_c4, single_pair, two_orbits_euclidean
from renorm.norms import GAverage, L2Sum, MaxSeminorms, ScaledSum, SumSquares
from renorm.render import radius_maxima, render_ball_2d
from renorm import ArgumentError, group_closure

NORMS = [
    Euclidean(np.array([[2.0, 0.5], [0.5, 1.0]])),
    WeightedLp(3, [1.0, 2.0]),
    WeightedLp(np.inf, [1.0, 1.0]),
    Day(2),
    MaxSeminorms((np.eye(2), np.array([[1.0, 1.0]]))),
    GAverage(WeightedLp(3, [1.0, 2.0]), group_closure([-np.eye(2)])),
    SumSquares((Euclidean.identity(2), WeightedLp.lp(4, 2))),
    L2Sum((Euclidean.identity(1), Day(1))),
    ScaledSum((Day(2), Euclidean.identity(2)), (1.0, 2.0)),
]


@pytest.mark.parametrize("norm", NORMS, ids=lambda n: n.kind)
def test_norm_round_trip(norm):
    doc = S.loads(S.dumps(S.norm_to_dict(norm)))
    back = S.norm_from_dict(doc)
    X = np.random.default_rng(0).standard_normal((20, norm.dim))
    assert np.array_equal(back.eval_many(X), norm.eval_many(X))


def test_pimple_spec_round_trip():
    sp = two_orbits_euclidean()
    back = S.pimple_spec_from_dict(S.loads(S.dumps(S.pimple_spec_to_dict(sp))))
    X = np.random.default_rng(1).standard_normal((20, 2))
    assert np.array_equal(pimple_norm(back).eval_many(X), pimple_norm(sp).eval_many(X))


def test_canonical_dumps():
    text = S.dumps({"b": [1.0, 0.1], "a": {"z": np.float64(1 / 3), "y": float("inf")}})
    assert text.index('"a"') < text.index('"b"')
    assert "0.33333333333333331" in text
    assert S.dumps(S.loads(text)) == text


@pytest.mark.parametrize("doc, loc", [
    ({"kind": "euclidean", "dim": 2}, "/"),
    ({"kind": "weighted-lp", "dim": 2, "p": "two", "weights": [1, 1]}, "/p"),
    ({"kind": "nope", "dim": 2}, "/kind"),
    ({"kind": "euclidean", "dim": 3, "gram": [[1, 0], [0, 1]]}, "/dim"),
])
def test_schema_errors_carry_location(doc, loc):
    with pytest.raises(SchemaError) as exc:
        S.norm_from_dict(doc)
    assert exc.value.location.startswith(loc)


def test_malformed_json_is_schema_error():
    with pytest.raises(SchemaError):
        S.loads("{not json")


def test_render_radii_and_files():
    r = render_ball_2d(pimple_norm(interacting_c4(0.8)), 720)
    idx = radius_maxima(r)
    # [DERIVED] tips at 1/0.8 on the axes
    assert np.allclose(r.radius[idx], 1.25, atol=1e-9)
    assert np.allclose(r.theta[idx], np.arange(4) * np.pi / 2, atol=1e-9)
    csv = r.to_csv().splitlines()
    assert csv[0] == "theta,radius" and len(csv) == 721
    svg = r.to_svg()
    assert svg.startswith("<?xml") and svg.count("<circle") == 4
    with pytest.raises(ArgumentError):
        render_ball_2d(Euclidean.identity(3))
    with pytest.raises(ArgumentError):
        render_ball_2d(Euclidean.identity(2), 10)


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(S.dumps(doc))
    return str(p)


def test_cli_norm_eval(tmp_path, capsys):
    f = _write(tmp_path, "day.json", S.norm_to_dict(Day(4)))
    assert main(["norm", "eval", "--file", f, "--x", "1,1,0,0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["report"]["values"] == [pytest.approx(0.5590169943749475, abs=1e-15)]


def test_cli_input_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"kind\": ")
    assert main(["norm", "eval", "--file", str(bad), "--x", "1,1"]) == 2
    capsys.readouterr()
    f = _write(tmp_path, "e.json", S.norm_to_dict(Euclidean.identity(2)))
    assert main(["norm", "eval", "--file", f, "--x", "1,1,1"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["location"] == "--x"
    assert main(["render", "--file", f, "--resolution", "10"]) == 2


def test_cli_solver_errors_exit_3(tmp_path, monkeypatch, capsys):
    from renorm import pimple as P

    f = _write(tmp_path, "spec.json", S.pimple_spec_to_dict(interacting_c4()))

    def broken(spec, y, tol, config, start=None):
        return P.PimpleEvaluation(1.0, 0.0, np.zeros(2), np.zeros(len(spec.directions)))

    monkeypatch.setattr(P, "_general_solve", broken)
    assert main(["pimple", "eval", "--spec", f, "--x", "0.6,0.6"]) == 3
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "SolverError" and err["diagnostics"]["upper"] == 1.0


def test_manifest_replay_is_byte_identical(tmp_path, capsys):
    f = _write(tmp_path, "spec.json", S.pimple_spec_to_dict(single_pair()))
    man = str(tmp_path / "m.json")
    assert main(["pimple", "eval", "--spec", f, "--x", "0.7,0.3", "--x", "1,2",
                 "--save-manifest", man]) == 0
    first = capsys.readouterr().out
    assert main(["run", man]) == 0
    assert capsys.readouterr().out == first
    status, text = run_command(RunManifest.from_dict(S.load(man)))
    assert status == 0 and text == first


def test_out_dir_files(tmp_path):
    f = _write(tmp_path, "n.json", S.norm_to_dict(pimple_norm(single_pair())))
    out = tmp_path / "out"
    out.mkdir()
    status, text = run_command(RunManifest(["render"], {"file": f}, {"resolution": 90}, out_dir=str(out)))
    assert status == 0
    assert (out / "report.json").read_text() == text
    assert (out / "ball.csv").read_text().startswith("theta,radius")
    assert (out / "ball.svg").exists()


def test_unknown_command_and_manifest_keys():
    assert run_command(RunManifest(["fly"]))[0] == 2
    with pytest.raises(SchemaError):
        RunManifest.from_dict({"command": ["render"], "colour": 1})
    assert run_command(RunManifest(["norm", "eval"], config={"nonsense": 1}))[0] == 2


def test_cli_pimple_workflow(tmp_path, capsys):
    out = tmp_path / "out"
    out.mkdir()
    assert main(["pimple", "build", "--group", "cyclic4", "--dim", "2"]) == 0
    built = tmp_path / "c4.json"
    built.write_text(capsys.readouterr().out)
    assert main(["isometries", "enumerate", "--spec", str(built), "--target", "cyclic4"]) == 0
    rep = json.loads(capsys.readouterr().out)["report"]
    assert rep["order"] == 4 and rep["target_isomorphic"]
    assert main(["render", "--file", str(built), "--out-dir", str(out)]) == 0
    rep = json.loads(capsys.readouterr().out)["report"]
    assert len(rep["marks"]["tip"]) == 12 and rep["files"] == ["ball.svg", "ball.csv"]
