import io
import json

import pytest

from caliber.cli import run
from caliber.exterior import dumps_form, e, from_span, loads_form
from caliber import catalog


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cay_file(tmp_path):
    p = tmp_path / "cay.json"
    p.write_text(dumps_form(from_span(catalog.cayley())))
    return str(p)


def test_comass_exact(cay_file):
    code, out, _ = call("comass", "--input", cay_file, "--method", "exact")
    assert code == 0 and out.strip() == "1"


def test_comass_json_exact_is_rational_string(cay_file):
    code, out, _ = call("comass", "--input", cay_file, "--json")
    data = json.loads(out)
    assert data["value"] == "1" and data["method"] == "exact" and "tol" not in data


def test_comass_numeric_carries_tol(cay_file):
    code, out, _ = call("comass", "--input", cay_file, "--method", "numeric", "--restarts", "20", "--json")
    data = json.loads(out)
    assert code == 0 and abs(data["value"] - 1) < 1e-6 and data["tol"] > 0
    assert len(data["frame"]) == 8


def test_comass_auto_uses_normal_form(tmp_path):
    p = tmp_path / "sd.json"
    code, out, _ = call("random", "--class", "self_dual", "--seed", "3")
    p.write_text(out)
    code, out, _ = call("comass", "--input", str(p), "--json")
    data = json.loads(out)
    assert code == 0 and data["method"] == "normal_form+exact"


def test_comass_exact_refuses_off_span(tmp_path):
    p = tmp_path / "f.json"
    p.write_text(dumps_form(e(1, 2, 3, 5)))
    code, _, err = call("comass", "--input", str(p), "--method", "exact")
    assert code == 2 and "span" in err


def test_missing_file():
    code, _, err = call("comass", "--input", "missing.json")
    assert code == 2 and "missing.json" in err


def test_malformed_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 8,\n  "k": 4,, "terms": []}')
    code, _, err = call("comass", "--input", str(p))
    assert code == 2 and "line 2" in err and "column" in err


def test_structural_error(tmp_path):
    p = tmp_path / "dup.json"
    p.write_text(json.dumps({"n": 8, "k": 4, "terms": [
        {"index": [1, 2, 3, 4], "coeff": "1"}, {"index": [1, 2, 3, 4], "coeff": "1"}]}))
    code, _, err = call("comass", "--input", str(p))
    assert code == 2 and "terms[1].index" in err


def test_usage_errors():
    assert call()[0] == 2
    assert call("bogus")[0] == 2
    assert call("comass")[0] == 2
    assert call("comass", "--input", "x", "--restarts", "0")[0] == 2


def test_span_input(tmp_path):
    p = tmp_path / "span.json"
    p.write_text(json.dumps({"span": ["1/2"] * 7}))
    code, out, _ = call("comass", "--input", str(p))
    assert code == 0 and out.strip() == "1"


def test_decompose(tmp_path):
    p = tmp_path / "span.json"
    p.write_text(json.dumps({"span": ["1/2"] * 7}))
    code, out, _ = call("decompose", "--input", str(p))
    assert code == 1 and out.strip() == "NONE"
    code, out, _ = call("decompose", "--input", str(p), "--conjugate", "--json")
    data = json.loads(out)
    assert code == 0 and data["weights"]["omega1"] == "1/4" and data["weights"]["omega2"] == "0"
    assert len(data["conjugate"]["coeffs"]) == 7


def test_stabilizer(cay_file):
    code, out, _ = call("stabilizer", "--input", cay_file, "--json")
    data = json.loads(out)
    assert code == 0 and data["dimension"] == 21 and len(data["basis"]) == 21
    assert call("stabilizer", "--input", cay_file)[1].strip() == "dimension 21"


def test_normal_form(tmp_path):
    p = tmp_path / "sd.json"
    p.write_text(call("random", "--seed", "8")[1])
    code, out, _ = call("normal-form", "--input", str(p), "--json")
    data = json.loads(out)
    assert code == 0 and data["success"] and data["residual"] < 1e-8


def test_random_is_seeded():
    a = call("random", "--class", "general", "--seed", "4")[1]
    assert a == call("random", "--class", "general", "--seed", "4")[1]
    assert loads_form(a).degree == 4


@pytest.mark.parametrize("fmt", ["md", "json", "csv"])
def test_catalog_formats(fmt):
    code, out, _ = call("catalog", "--format", fmt)
    assert code == 0
    if fmt == "json":
        assert json.loads(out) == catalog.load_golden()
    elif fmt == "csv":
        assert len(out.strip().splitlines()) == 10
    else:
        assert "78/25" in out


def test_verify_quick_json_is_reproducible():
    code, a, _ = call("verify", "--quick", "--json")
    assert code == 0
    data = json.loads(a)
    assert data["summary"] == {"total": 10, "passed": 10, "failed": 0}
    assert a == call("verify", "--quick", "--json")[1]
