import json

import pytest

from klcells import build_full_table, build_system
from klcells.catalog import realize_all, standard_config
from klcells.coxeter import subset_mask
from klcells.verifier import (
    run_verification,
    verify_a2_transport,
    verify_b2_transport,
    verify_cell_properties,
    verify_d4_catalog,
    verify_d4_transport,
    verify_edge_transport_axioms,
    verify_interval_vs_full,
    verify_map_structure,
    verify_nonnegative,
    verify_parabolic,
)


def _corrupt(tbl, y, w, value):
    M = tbl.mu_matrix()
    a, b = tbl.loc(y), tbl.loc(w)
    M[a, b] = M[b, a] = value


@pytest.mark.parametrize("name", ["A3", "B3", "D4"])
def test_a2_passes(name, groups, tables):
    r = verify_a2_transport(groups(name), tables(name))
    assert r.passed and r.instances_checked > 0


@pytest.mark.parametrize("name", ["B2", "B3"])
def test_b2_passes(name, groups, tables):
    r = verify_b2_transport(groups(name), tables(name))
    assert r.passed and r.instances_checked > 0


def test_b2_skips_without_order_four(groups, tables):
    r = verify_b2_transport(groups("A3"), tables("A3"))
    assert r.verdict == "skip" and "m(s,t) = 4" in r.skipped
    assert run_verification("b2", groups("A3"), tables("A3"))[0].verdict == "skip"


def test_d4_transport_and_catalog(D4, D4_table):
    r = verify_d4_transport(D4, D4_table)
    assert r.passed, r.to_text()
    assert r.details["closure_sizes"]
    c = verify_d4_catalog(D4, D4_table)
    assert c.passed, c.to_text()
    assert c.details["string_cases"]["edges"] == 25


def test_axioms_on_d4(D4, D4_table):
    for r in (verify_edge_transport_axioms(D4, D4_table), verify_map_structure(D4),
              verify_cell_properties(D4, D4_table)):
        assert r.passed, r.to_text()


def test_parabolic_and_nonnegative(groups, tables):
    B3 = groups("B3")
    assert verify_parabolic(B3, tables("B3"), subset_mask((1, 2))).passed
    assert verify_nonnegative(tables("D4")).passed


def test_interval_vs_full(D4, D4_table):
    r = verify_interval_vs_full(D4, D4_table, [D4.parse("1 2 3 4 3 1 2")])
    assert r.passed and r.instances_checked > 0


def test_fault_injection_catalog(D4):
    tbl = build_full_table(D4)
    cat = realize_all(D4, standard_config(D4))["14a1"]
    m = sorted(cat.members.values())
    y, w = m[0], m[-1]
    _corrupt(tbl, y, w, 1 - int(tbl.mu_matrix()[tbl.loc(y), tbl.loc(w)]))
    r = verify_d4_catalog(D4, tbl)
    assert not r.passed
    assert any("catalog edges" in v.check for v in r.violations)


def test_fault_injection_a2(D4):
    tbl = build_full_table(D4)
    M = tbl.mu_matrix()
    import numpy as np
    ys, ws = np.nonzero(np.triu(M, 1))
    hits = 0
    for k in range(0, len(ys), max(1, len(ys) // 10)):
        _corrupt(tbl, int(tbl.universe[ys[k]]), int(tbl.universe[ws[k]]), 0)
        hits += 1
    r = verify_a2_transport(D4, tbl)
    assert r.verdict == "fail" and r.violations


def test_report_json(D4, D4_table):
    r = verify_a2_transport(D4, D4_table)
    data = json.loads(json.dumps(r.to_json()))
    assert data["verdict"] == "pass"
    assert "[PASS]" in r.to_text()


def test_unknown_id(D4, D4_table):
    with pytest.raises(ValueError):
        run_verification("zz", D4, D4_table)
