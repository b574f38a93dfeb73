# SPDX-License-Identifier: Apache-2.0
import pathlib

import pytest

import strsolve

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "suite"


def test_sat_with_model():
    r = strsolve.check(
        '(declare-fun x () String)(declare-fun y () String)'
        '(assert (= (str.++ x y) "ab"))(assert (= (str.len x) 1))(get-model)',
        {"validate_model": True},
    )
    assert r["verdict"] == "sat"
    assert r["validation"] is True
    assert '(define-fun x () String "a")' in r["model"]
    assert r["exit_code"] == 0


def test_unsat_and_error():
    assert strsolve.check("(assert false)")["verdict"] == "unsat"
    r = strsolve.check("(assert (= 1")
    assert r["verdict"] == "error"
    assert r["exit_code"] == 3


def test_unsupported_is_unknown():
    r = strsolve.check('(declare-fun x () String)(assert (str.contains x "a"))')
    assert r["verdict"] == "unknown"


def test_stats_keys():
    r = strsolve.check('(declare-fun x () String)(assert (= x "a"))')
    for k in ["decisions", "conflicts", "propagations", "restarts", "case_split_decisions",
              "theory_activity_overrides"]:
        assert k in r["stats"]


def test_tokenize_and_decode():
    toks = strsolve.tokenize("(check-sat)")
    assert [t[0] for t in toks] == ["lparen", "symbol", "rparen"]
    assert toks[1][2:] == (1, 2)
    assert strsolve.decode_string_literal('"a""b"') == 'a"b'
    with pytest.raises(strsolve.ParseError):
        strsolve.tokenize('"open')


def test_suite():
    res = strsolve.run_suite(str(FIXTURES), {"timeout": 1.0, "validate_model": True}, 2)
    assert sum(res["counts"].values()) == len(res["reports"]) == 10
    assert res["counts"]["timeout"] == 1
    assert "Total time without timeouts (s)" in res["summary"]
    assert res["csv"].startswith("file,verdict,time,decisions,conflicts\n")
