"""Smoke tests for the resp_hnn Python module.

The module exposes the same self-contained JSON documents as the CLI, so
these tests focus on the bindings: construction, routing, verification and
error translation.  Deep algorithmic coverage lives in the C++ test suites.
"""

import pytest

import resp_hnn as r

LINE = {
    "schema": 1,
    "group": {"kind": "abelian", "p": 3, "exponents": [1, 1]},
    "A": [[1, 0]],
    "B": [[1, 0]],
    "phi": [[[1, 0], [1, 0]]],
}

MULT2 = {
    "schema": 1,
    "group": {"kind": "abelian", "p": 3, "exponents": [1]},
    "A": [[1]],
    "B": [[1]],
    "phi": [[[1], [2]]],
}


def test_fixture_decides_and_verifies():
    p = r.fixture("cyclic_shift")
    assert p.group_order == 27
    assert p.prime == 3
    assert p.fixture == "cyclic_shift"
    doc = p.decide()
    assert doc["decision"]["verdict"] == "not_residually_p"
    assert doc["decision"]["method"] == "decide_chief"
    report = r.verify_certificate(doc)
    assert report["ok"]
    assert not report["failures"]


def test_problem_from_dict_and_phi():
    p = r.problem(LINE)
    assert (p.group_order, p.a_order, p.b_order) == (9, 3, 3)
    assert p.phi((1, 0)) == (1, 0)
    assert p.document()["schema"] == 1


def test_problem_from_json_string():
    p = r.problem('{"schema": 1, "group": {"kind": "fixture", "name": "wreath"}}')
    assert p.group_order == 3**11


def test_core_document():
    doc = r.problem(LINE).core()
    assert doc["order"] == 1
    assert doc["r"] == 0
    assert len(doc["core"]) == 3
    assert r.verify_certificate(doc)["ok"]


def test_violation_for_non_p_power_order():
    doc = r.problem(MULT2).decide()
    assert doc["decision"]["verdict"] == "not_residually_p"
    assert doc["decision"]["violation"]["map_order"] == 2
    assert r.verify_certificate(doc)["ok"]


def test_witness_routes():
    elementary = r.problem(LINE).witness()
    assert elementary["witness"]["route"] == "elementary"
    assert r.verify_certificate(elementary)["ok"]

    cover = r.fixture("abelian_rank3(p=3,x=1,y=1,z=1)").witness()
    assert cover["witness"]["route"] == "cover"
    assert cover["witness"]["cover"]["s"] == 9
    assert r.verify_certificate(cover)["ok"]


def test_twisted_problem_records_the_twist():
    p = r.fixture("cyclic_shift")
    t = p.twisted((1, 0, 2, 2), (0, 0, 0, 0))
    assert t.document()["twist"]["a"] == [1, 0, 2, 2]
    assert t.group_order == p.group_order


def test_reduce_pinches_to_a_group_letter():
    p = r.fixture("cyclic_shift")
    doc = p.reduce([{"t": -1}, {"g": [1, 0, 2, 2]}, {"t": 1}])
    assert doc["is_group_letter"] is True
    assert doc["reduced"] == [{"g": [2, 0, 2, 0]}]
    assert r.verify_certificate(doc)["ok"]


def test_verify_rejects_tampering():
    doc = r.problem(MULT2).decide()
    doc["decision"]["verdict"] = "residually_p"
    report = r.verify_certificate(doc)
    assert not report["ok"]
    assert report["failures"]


def test_input_errors_are_located():
    with pytest.raises(r.InputError, match="unsupported schema version"):
        r.problem({"schema": 9})
    with pytest.raises(r.InputError, match="problem.A\\[0\\]"):
        r.problem({**LINE, "A": [[7, 0]]})
    with pytest.raises(r.InputError, match="available:"):
        r.fixture("nope")


def test_enumerate_is_deterministic():
    a = r.enumerate_pairs(p=3, seed=7, count=10, max_order=27)
    b = r.enumerate_pairs(p=3, seed=7, count=10, max_order=27)
    assert a == b
    assert sum(a["verdicts"].values()) == 10


def test_fixture_facts_all_pass():
    doc = r.verify_fixtures()
    assert doc["ok"]
    assert doc["passed"] == doc["total"]


def test_canonical_json_bytes():
    text = r.to_canonical_json({"b": 1, "a": [2, 3]})
    assert text == '{\n  "a": [\n    2,\n    3\n  ],\n  "b": 1\n}\n'
