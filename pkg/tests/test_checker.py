import copy
import json

import pytest

from fib3pow2.checker import check_certificate, enumerate_by_exponent, main, psi_is_special
from fib3pow2.search import enumerate_oracle, shipped_table


def test_psi_identities():
    assert psi_is_special(1, 1, 0, 0) and psi_is_special(3, 0, 0, 0)
    assert psi_is_special(4, 3, 1, 0) and psi_is_special(5, 1, 2, 1) and psi_is_special(8, 7, 3, 1)
    assert not psi_is_special(2, 2, 0, 0) and not psi_is_special(4, 3, 1, 1)


def test_independent_enumeration():
    assert enumerate_by_exponent(60) == enumerate_oracle(60)


@pytest.fixture(scope="module")
def cert_dict(certificate):
    return json.loads(certificate.to_json())


def test_certificate_passes(certificate, cert_dict):
    assert certificate.verdict == "PASS"
    rep = check_certificate(cert_dict, shipped_table())
    assert rep.ok, rep.failures()


def test_cli_check(certificate, tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text(certificate.to_json())
    assert main([str(p), "--table", str(shipped_table())]) == 0
    assert "CHECK PASS" in capsys.readouterr().out


def _stage(d, name):
    return next(s for s in d["stages"] if s["name"] == name)


@pytest.mark.parametrize("tamper", ["solution", "gap", "epsilon", "special", "q", "legendre", "verdict"])
def test_tampering_detected(cert_dict, tamper):
    d = copy.deepcopy(cert_dict)
    if tamper == "solution":
        _stage(d, "search")["results"]["solutions"].pop()
    elif tamper == "gap":
        _stage(d, "stage1")["results"]["gap_bound"] = 150
    elif tamper == "epsilon":
        _stage(d, "stage1")["results"]["epsilon"]["lo"] = "0.5"
        _stage(d, "stage1")["results"]["epsilon"]["hi"] = "0.6"
    elif tamper == "special":
        p = next(p for p in _stage(d, "stage2")["results"]["pairs"] if p["special"])
        p["decomposition"] = [p["decomposition"][0] + 1, p["decomposition"][1]]
    elif tamper == "q":
        p = next(p for p in _stage(d, "stage2")["results"]["pairs"] if not p["special"])
        p["q"] = str(int(p["q"]) + 2)
    elif tamper == "legendre":
        _stage(d, "special")["results"]["legendre"]["a_M"] = 11
    elif tamper == "verdict":
        _stage(d, "stage2")["verdict"] = "fail"
    assert not check_certificate(d).ok


def test_default_certificate_rejected(default_certificate, capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(default_certificate.to_json())
    assert main([str(p)]) == 1
