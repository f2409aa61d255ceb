import json
import math
from fractions import Fraction

import pytest

from controls.coeffs_service import CoeffService
from controls.verify_service import KNOWN_E
from main import run


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_coeffs_json(capsys):
    code, out, _ = invoke(capsys, "coeffs", "--n", "6", "--format", "json")
    assert code == 0
    values = json.loads(out)
    assert len(values) == 7
    assert values[-1] == "238043/580608"


def test_coeffs_csv(capsys):
    code, out, _ = invoke(capsys, "coeffs", "--n", "2", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["n,e_n,f_n", "0,1,1", "1,-1/2,1/2", "2,11/24,11/24"]


def test_coeffs_pretty_table(capsys):
    code, out, _ = invoke(capsys, "coeffs", "--n", "3", "--pretty")
    assert code == 0
    assert "-7/16" in out and "7/16" in out.splitlines()[-1]


def test_enclose_report(capsys):
    code, out, _ = invoke(capsys, "enclose", "--x", "1/2", "--order", "2")
    assert code == 0
    report = json.loads(out)
    assert report["lower_mul"] == "3/4"
    assert report["upper_mul"] == "83/96"
    assert report["precision_bits"] == 256


def test_limit_single_value(capsys):
    code, out, _ = invoke(capsys, "limit", "--c", "0", "--y", "1048576", "--precision", "256")
    assert code == 0
    payload = json.loads(out)
    assert payload["value"]["lo"].startswith("2.71828182845")
    expected = math.e / 24 / 1048576 ** 2
    assert math.isclose(float(payload["abs_error"]), expected, rel_tol=1e-2)
    assert payload["precision_bits"] == 256


def test_limit_probe_csv(capsys):
    code, out, _ = invoke(capsys, "limit", "--probe-from", "10", "--probe-to", "12", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "y,abs_error,slope"
    assert len(lines) == 4


def test_limit_needs_y_or_probe(capsys):
    code, out, _ = invoke(capsys, "limit", "--c", "0")
    assert code == 2
    assert out == ""


def test_keller_custom_series(capsys):
    code, out, _ = invoke(capsys, "keller", "--order", "3", "--series", "[0, 1, 0, 0]", "--y", "10")
    assert code == 0
    payload = json.loads(out)
    assert payload["b"] == ["-1", "-1"]
    assert payload["scaled_by_e"] is False
    assert float(payload["value"]["lo"]) <= -0.011 <= float(payload["value"]["hi"])


def test_keller_default_e_series(capsys):
    code, out, _ = invoke(capsys, "keller", "--order", "2", "--c", "1")
    assert code == 0
    assert json.loads(out)["b"] == ["-11/24"]


def test_keller_digits_option(capsys):
    code, out, _ = invoke(capsys, "keller", "--order", "3", "--series", "[0, 1, 0, 0]", "--y", "10", "--digits", "5")
    assert code == 0
    value = json.loads(out)["value"]
    assert len(value["lo"].lstrip("-").replace(".", "").lstrip("0")) <= 5


def test_keller_negative_y_is_domain_error(capsys):
    code, out, err = invoke(capsys, "keller", "--order", "3", "--series", "[0, 1, 0, 0]", "--y", "-10")
    assert code == 1
    assert out == ""
    assert "validity" in err


@pytest.mark.parametrize("argv", [
    ["enclose", "--x", "abc", "--order", "2"],
    ["enclose", "--x", "0.5", "--order", "2"],
    ["transmogrify"],
    ["keller", "--order", "3", "--series", "[0, 1"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err


@pytest.mark.parametrize("argv", [
    ["enclose", "--x", "2", "--order", "2"],
    ["limit", "--c", "0", "--y", "1/2"],
    ["keller", "--order", "3", "--series", "[0, 1]"],
])
def test_domain_errors_exit_one(capsys, argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 1
    assert out == ""
    assert "Error" in err


def test_caps_are_usage_errors(capsys):
    code, out, err = invoke(capsys, "coeffs", "--n", "100000")
    assert code == 2
    assert "cap" in err
    code, _, err = invoke(capsys, "keller", "--order", "1000")
    assert code == 2
    assert "cap" in err


def test_bfile_round_trip(capsys):
    _, via_coeffs, _ = invoke(capsys, "coeffs", "--n", "6", "--format", "bfile", "--which", "denominators")
    _, via_export, _ = invoke(capsys, "export", "--n", "6", "--which", "denominators")
    assert via_coeffs == via_export == CoeffService.export_bfile(6, "denominators")
    _, numerators, _ = invoke(capsys, "export", "--n", "6")
    assert CoeffService.rationals_from_bfiles(numerators, via_export) == KNOWN_E


def test_identical_invocations_identical_bytes(capsys):
    argv = ["enclose", "--x", "-9/10", "--order", "7", "--precision", "300"]
    first = invoke(capsys, *argv)
    second = invoke(capsys, *argv)
    assert first == second
    assert json.loads(first[1])["sided"] == "lower"
    assert Fraction(json.loads(first[1])["x"]) == Fraction(-9, 10)


@pytest.mark.slow
def test_verify_command_passes(capsys):
    code, out, _ = invoke(capsys, "verify", "--max-n", "30")
    results = json.loads(out)
    assert [r["name"] for r in results if not r["passed"]] == []
    assert code == 0
