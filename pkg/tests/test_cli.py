import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import example_domain
from levikohn.cli import emit_report, main, parse_problem, run_command, build_parser
from levikohn.errors import InputError, NotRealError, ParseError
from levikohn import parse_expression

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def problem_text(n, r, **extra):
    return json.dumps({"dimension": n, "defining_function": r, **extra})


def run(argv, capsysbinary):
    code = main(argv)
    out = capsysbinary.readouterr()
    return code, out.out, out.err


def test_parse_examples():
    p = parse_problem(problem_text(
        3, "r = -x3 - z1*conj(z1)*z2*conj(z2) + (1/4)*(z1*conj(z1))^2 + (3/4)*(z2*conj(z2))^2"))
    assert p.r == example_domain().r
    ball = parse_problem(problem_text(2, "r = z1*conj(z1) - 1"))
    assert ball.r == parse_expression("z1*conj(z1) - 1", 2)
    with pytest.raises(NotRealError, match="defining function not real"):
        parse_problem(problem_text(2, "r = z1"))


def test_parse_errors():
    with pytest.raises(ParseError) as err:
        parse_problem('{"dimension": 2,\n "defining_function": }')
    assert err.value.line == 2
    with pytest.raises(ParseError):
        parse_problem(problem_text(2, "r = z7"))
    with pytest.raises(InputError):
        parse_problem(json.dumps({"dimension": 2}))
    with pytest.raises(InputError):
        parse_problem(problem_text(2, "x1", varieties={"bad": ["z1"]}))


def test_parse_named_objects():
    p = parse_problem((PROBLEMS / "example.json").read_text())
    assert set(p.varieties) == {"curve", "axis"}
    assert set(p.holo_maps) == {"curve", "axis"}
    assert p.q == 2 and p.metrics["default"].kind == "graph"
    h = parse_problem((PROBLEMS / "halfspace.json").read_text())
    assert len(h.vector_fields["heisenberg"]) == 2


def test_classify_example(capsysbinary):
    code, out, _ = run(["classify", "--q", "2", "--input", str(PROBLEMS / "example.json")], capsysbinary)
    assert code == 0
    rep = json.loads(out)
    v = rep["verdicts"]
    assert v["not_pseudoconvex_somewhere"]
    assert v["z_q_at_named_points"]["origin"] is False
    assert v["q_margin_nonnegative_everywhere"]
    origin = [e for e in rep["results"]["named_points"] if e["name"] == "origin"][0]
    assert origin["signature"] == [0, 0, 2]
    for e in rep["results"]["samples"]:
        assert e["eigenvalues"] == sorted(e["eigenvalues"])


def test_kohn_ball_certificate(capsysbinary):
    code, out, _ = run(["kohn", "--q", "1", "--input", str(PROBLEMS / "ball.json")], capsysbinary)
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["status"] == "certified" and rep["results"]["h"] == 1
    assert rep["verdicts"]["certificate_verified"] is True
    assert rep["results"]["certificate"]["unit_witness"]["power"] >= 1


def test_kohn_stuck_runs_holdim(capsysbinary):
    code, out, _ = run(["kohn", "--input", str(PROBLEMS / "halfspace.json")], capsysbinary)
    assert code == 0
    rep = json.loads(out)
    assert rep["verdicts"]["status"] == "stuck"
    assert rep["verdicts"]["holomorphic_dimension"] == 1
    assert rep["results"]["variety"] == ["conj(z2) + z2"]


def test_tangency_curve(capsysbinary):
    code, out, _ = run(["tangency", "--map", "curve", "--input", str(PROBLEMS / "example.json")], capsysbinary)
    assert code == 0 and json.loads(out)["verdicts"]["order"] == "identically-zero"
    code, out, _ = run(["tangency", "--map", "axis", "--input", str(PROBLEMS / "example.json")], capsysbinary)
    assert json.loads(out)["verdicts"]["order"] == 4


def test_other_commands(capsysbinary):
    ex = str(PROBLEMS / "example.json")
    half = str(PROBLEMS / "halfspace.json")
    code, out, _ = run(["levi", "--input", ex], capsysbinary)
    assert code == 0 and json.loads(out)["results"]["trace"] == "2*z2*conj(z2)"
    code, out, _ = run(["ctangent", "--variety", "curve", "--input", ex], capsysbinary)
    assert code == 0
    code, out, _ = run(["holdim", "--variety", "boundary", "--input", half], capsysbinary)
    assert code == 0 and json.loads(out)["results"]["value"] == 1
    code, out, _ = run(["brackets", "--fields", "heisenberg", "--variety", "boundary", "--input", half],
                       capsysbinary)
    rep = json.loads(out)
    assert code == 0 and rep["verdicts"]["dims"] == [2, 1] and rep["verdicts"]["involutive"] is False
    code, out, _ = run(["levi", "--input", ex, "--format", "text"], capsysbinary)
    assert code == 0 and b"trace: 2*z2*conj(z2)" in out


def test_exit_codes(tmp_path, capsysbinary):
    bad = tmp_path / "bad.json"
    bad.write_text(problem_text(2, "r = z1"))
    assert run(["levi", "--input", str(bad)], capsysbinary)[0] == 1
    assert run(["levi", "--input", str(tmp_path / "missing.json")], capsysbinary)[0] == 1
    assert run(["holdim", "--input", str(PROBLEMS / "ball.json")], capsysbinary)[0] == 1
    half = str(PROBLEMS / "halfspace.json")
    assert run(["kohn", "--max-steps", "1", "--input", half], capsysbinary)[0] == 2
    tight = tmp_path / "tight.json"
    tight.write_text(problem_text(2, "z1*conj(z1) + (z2*conj(z2))^2 - 1", q=1, budgets={"groebner_limit": 3}))
    assert run(["kohn", "--input", str(tight)], capsysbinary)[0] == 2
    assert run(["bogus", "--input", half], capsysbinary)[0] == 1


def test_internal_error_exit_code(monkeypatch, capsysbinary):
    import levikohn.cli as cli

    def boom(p, args):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli._DISPATCH, "levi", boom)
    code, _, err = run(["levi", "--input", str(PROBLEMS / "ball.json")], capsysbinary)
    assert code == 3 and b"internal error" in err


def report_bytes(argv):
    args = build_parser().parse_args(argv)
    p = parse_problem(Path(args.input).read_text())
    return emit_report(run_command(args.command, p, args), args.format)


def test_report_determinism():
    ex = str(PROBLEMS / "example.json")
    for argv in (["classify", "--input", ex], ["kohn", "--input", ex], ["levi", "--input", ex]):
        outs = {report_bytes(argv) for _ in range(3)}
        assert len(outs) == 1


def test_json_conventions():
    out = json.loads(report_bytes(["kohn", "--input", str(PROBLEMS / "example.json")]))
    assert "timings" not in out
    text = report_bytes(["classify", "--input", str(PROBLEMS / "example.json"), "--samples", "3"])
    point = json.loads(text)["results"]["named_points"][0]["point"][0]
    assert set(point) == {"re", "im"}
    keys = list(json.loads(text).keys())
    assert keys == sorted(keys)


def test_rationals_serialized_as_strings():
    from fractions import Fraction

    from levikohn.cli import to_jsonable
    from levikohn.gaussian import GaussianRational
    assert to_jsonable(Fraction(3, 4)) == "3/4"
    assert to_jsonable(GaussianRational(1, Fraction(-1, 2))) == {"re": "1/1", "im": "-1/2"}


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "levikohn", "tangency", "--map", "curve",
                          "--input", str(PROBLEMS / "example.json")], capture_output=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["verdicts"]["order"] == "identically-zero"
