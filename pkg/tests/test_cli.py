import io
import json

import pytest

from rquant.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    lines = [json.loads(line) for line in out.getvalue().splitlines()]
    return code, lines[-1], lines


def test_p_support_example():
    code, rep, _ = run("p-support", "--p", "3", "--n", "2", "--alpha", "x1^3*x2^2 dx2")
    assert code == 0 and rep["status"] == "ok"
    assert rep["result"]["generators"] == ["ξ1'", "ξ2' - h^3*((x1')^3*(x2')^2 - x1')"]
    assert all(t["ok"] for t in rep["trail"])


def test_p_op_of_h():
    code, rep, _ = run("p-op", "--p", "3", "--n", "1", "--elem", "h")
    assert code == 0 and rep["result"]["p_operation"] == "h"


def test_classify_dx1():
    code, rep, _ = run("classify-quantization", "--p", "3", "--n", "1", "--alpha", "dx1")
    assert code == 0 and rep["result"]["logarithmic"] is False


def test_classify_logarithmic_with_witness():
    code, rep, _ = run("classify-quantization", "--alpha", "(1 - x1 + x1^2) dx1")
    assert code == 0 and rep["result"]["logarithmic"] is True


def test_p_curvature_and_bracket():
    code, rep, _ = run("p-curvature", "--n", "2", "--alpha", "x1^3*x2^2 dx2", "--field", "2")
    assert code == 0 and rep["result"]["p_curvature"]["d/dx2"] == "h^3*x1^9*x2^6 - h^3*x1^3"
    code, rep, _ = run("bracket", "--a", "y1", "--b", "x1^2")
    # 2 = -1 in GF(3); coefficients print in the symmetric range
    assert code == 0 and rep["result"]["bracket"] == "-x1"


def test_graph_checks():
    code, rep, _ = run("check-lagrangian", "--n", "2", "--phi", "x2", "--phi", "0")
    assert code == 0 and rep["result"]["lagrangian"] is False
    code, rep, _ = run("check-restricted", "--n", "1", "--phi", "x1^2")
    assert code == 0 and rep["result"]["restricted"] is False


def test_coisotropic_from_alpha():
    code, rep, _ = run("check-coisotropic", "--n", "2", "--alpha", "x1^3*x2^2 dx2")
    assert code == 0 and rep["result"]["coisotropic"] is False


def test_normal_form_non_exact_is_domain_error():
    code, rep, _ = run("normal-form", "--image", "z1", "--image", "z1^2")
    assert code == 1 and rep["error"]["name"] == "NotExact"


def test_cech_class_and_coboundary(tmp_path):
    data = {"vars": ["x1"], "opens": [[], ["x1"]], "lo": [-1], "hi": [1],
            "transitions": {"0,1": "x1"}}
    code, rep, _ = run("cech-class", "--input", json.dumps(data))
    assert code == 0
    assert rep["result"]["class"]["alpha"] == {"0,1": "x1^-1*dx1"}
    path = tmp_path / "cls.json"
    path.write_text(json.dumps({"vars": ["x1"], "opens": [[]], "base_kind": "nil",
                                "gamma": ["dx1'"]}))
    code, rep, _ = run("coboundary", "--input", f"@{path}")
    assert code == 0 and rep["result"]["coboundary"] is True


def test_broken_cocycle_exits_one():
    data = {"vars": ["x1"], "opens": [[], ["x1"]], "lo": [-1], "hi": [0],
            "alpha": {"0,1": "dx1"}}
    code, rep, _ = run("coboundary", "--input", json.dumps(data))
    assert code == 1 and rep["error"]["name"] == "CocycleViolated"


@pytest.mark.parametrize("sign", ["minus", "plus"])
def test_chern_standard_model(sign):
    code, rep, _ = run("chern-check", "--sign-theta", sign)
    assert code == 0 and rep["result"]["holds"] is True


@pytest.mark.parametrize("sign,holds", [("minus", False), ("plus", True)])
def test_chern_theta_sign_switch(sign, holds):
    data = {"vars": ["x1"], "opens": [["x1"]], "lo": [-2], "hi": [2],
            "cL": {"gamma": ["(x1')^-1*dx1'"]}, "theta": "(x1')^-1*dx1'"}
    code, rep, _ = run("chern-check", "--sign-theta", sign, "--input", json.dumps(data))
    assert code == 0 and rep["result"]["holds"] is holds


def test_domain_error_exit_one():
    code, rep, _ = run("p-support", "--n", "2", "--alpha", "x2 dx1")
    assert code == 1 and rep["error"]["name"] == "NotClosed"


@pytest.mark.parametrize("argv", [
    ["p-op", "--elem", "x1 +"],
    ["p-op", "--p", "4", "--elem", "x1"],
    ["p-op", "--p", "3", "--trunc", "4", "--elem", "x1"],
    ["no-such-command"],
])
def test_usage_errors_exit_two(argv):
    out = io.StringIO()
    assert main(argv, out) == 2


def test_parse_error_reports_position():
    code, rep, _ = run("p-op", "--elem", "x1 $ y1")
    assert code == 2 and rep["error"]["position"] == 3


def test_pretty_output():
    out = io.StringIO()
    assert main(["p-op", "--elem", "h", "--pretty"], out) == 0
    assert "p_operation" in out.getvalue() and not out.getvalue().startswith("{")


def test_deterministic_output():
    a = run("suite", "--only", "3,4", "--seed", "5")
    b = run("suite", "--only", "3,4", "--seed", "5")
    assert a[0] == 0
    strip = lambda rows: [{k: v for k, v in r.get("case", r).items() if k != "seconds"} for r in rows]
    assert strip(a[2]) == strip(b[2])
