"""One test per acceptance criterion; each prints a PASS/FAIL line with its time budget."""

import io
import json
import os

import pytest

from rquant.cli import main
from rquant.suite import CRITERIA, run_case

from conftest import ACCEPTANCE_LINES

SEED = int(os.environ.get("RQUANT_SEED", "0"))


def cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, json.loads(out.getvalue().splitlines()[-1])


def report(r):
    line = r.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert r.ok, f"{line}\n{json.dumps(r.detail, indent=2, default=str)}"


@pytest.mark.parametrize("ident", [c[0] for c in CRITERIA], ids=[f"criterion-{c[0]}" for c in CRITERIA])
def test_criterion(ident):
    report(run_case(ident, SEED))


def test_criterion_1_through_cli():
    code, rep = cli("p-support", "--p", "3", "--n", "2", "--alpha", "x1^3*x2^2 dx2")
    assert code == 0
    assert rep["result"]["generators"] == ["ξ1'", "ξ2' - h^3*((x1')^3*(x2')^2 - x1')"]


def test_criterion_2_through_cli():
    code, rep = cli("check-coisotropic", "--p", "3", "--n", "2", "--alpha", "x1^3*x2^2 dx2")
    assert code == 0
    res = rep["result"]
    assert res["coisotropic"] is False
    assert res["h_valuation"] == 3 and res["unit_multiple_of_h_power"] is True
