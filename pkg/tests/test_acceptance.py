"""Acceptance criteria 1-10, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import time
from functools import lru_cache

import pytest

from klcells import build_full_table, build_system, build_wgraph, cells
from klcells.catalog import realize_all, standard_config
from klcells.coxeter import subset_mask
from klcells.gentau import gentau_refine
from klcells.maps import knuth_maps
from klcells.verifier import (
    FAMILIES,
    MuView,
    verify_a2_transport,
    verify_b2_transport,
    verify_d4_catalog,
    verify_d4_transport,
    verify_e6_example,
    verify_edge_transport_axioms,
    verify_gentau_cells,
    verify_interval_vs_full,
    verify_map_structure,
    verify_nonnegative,
    verify_parabolic,
)

E6_BUDGET = 600.0


@lru_cache(maxsize=None)
def group(name):
    return build_system(name)


@lru_cache(maxsize=None)
def table(name):
    return build_full_table(group(name))


def announce(n, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}", flush=True)
    return ok


def _reports_ok(reports):
    bad = [r for r in reports if not r.passed]
    return not bad, "; ".join(r.to_text(3).splitlines()[0] for r in reports)


def criterion_1():
    t0 = time.perf_counter()
    W = build_system("D4")
    tbl = build_full_table(W)
    g = build_wgraph(tbl)
    left, two = cells(g, "L"), cells(g, "LR")
    cats = realize_all(W, standard_config(W))
    mid = two.cell(W.parse("1 2 4"))
    mid_left = sorted(len(c) for c in left.classes if c[0] in set(mid))
    bottoms = {
        "10a": ["1 2 4"], "10b": ["1 2 4 3"],
        "14a4": ["4 3 4"], "14a1": ["1 3 1"], "14a2": ["2 3 2"],
        "14b4": ["1 3 1 2", "2 3 2 1"], "14b1": ["2 3 2 4", "4 3 4 2"], "14b2": ["1 3 1 4", "4 3 4 1"],
    }
    ok_bottoms = True
    for key, words in bottoms.items():
        mem = set(cats[key].members.values())
        cell = set(left.cell(next(iter(mem))))
        low = min(W.length[x] for x in cell)
        want = {W.parse(x) for x in words}
        ok_bottoms &= cell == mem and {x for x in cell if W.length[x] == low} == want
    dt = time.perf_counter() - t0
    ok = (W.size == 192 and len(mid) == 104 and mid_left == [10, 10, 14, 14, 14, 14, 14, 14]
          and ok_bottoms and dt < 10)
    return ok, (f"|W|={W.size}, middle two-sided cell {len(mid)}, left cells {mid_left}, "
                f"bottoms {'match' if ok_bottoms else 'differ'}, {dt:.2f}s")


def criterion_2():
    W = group("D4")
    mv = MuView(table("D4"))
    counts, ok = {}, True
    for key, cat in realize_all(W, standard_config(W)).items():
        mem = sorted(cat.members.values())
        comp = {frozenset((y, w)) for i, y in enumerate(mem) for w in mem[i + 1:] if mv.mt(y, w)}
        ok &= comp == cat.drawn_edges()
        counts[cat.title] = len(comp)
    return ok, "edges " + ", ".join(f"{k}={v}" for k, v in counts.items())


def criterion_3():
    t0 = time.perf_counter()
    reps = [verify_a2_transport(group(g), table(g)) for g in ("A3", "A4", "B3", "D4")]
    dt = time.perf_counter() - t0
    ok, txt = _reports_ok(reps)
    return ok and dt < 60, f"{txt}; total {dt:.1f}s"


def criterion_4():
    t0 = time.perf_counter()
    reps = [verify_b2_transport(group(g), table(g)) for g in ("B2", "B3", "B4")]
    dt = time.perf_counter() - t0
    ok, txt = _reports_ok(reps)
    return ok and dt < 300, f"{txt}; total {dt:.1f}s"


def criterion_5():
    t0 = time.perf_counter()
    D5 = group("D5")
    tbl = table("D5")
    build = time.perf_counter() - t0
    reps = [verify_d4_transport(group("D4"), table("D4")), verify_d4_transport(D5, tbl, relabel=True)]
    ok, txt = _reports_ok(reps)
    return ok and build < 1800, f"{txt}; D5 table {build:.1f}s"


def criterion_6():
    r = verify_d4_catalog(group("D4"), table("D4"))
    rc = r.details.get("string_cases", {})
    ok = (r.passed and rc.get("edges") == 25 and rc.get("case2") == 2 and rc.get("case3") == 4)
    return ok, (f"C(14,a,1) edges {rc.get('edges')}, case1 {rc.get('case1')}, case2 {rc.get('case2')}, "
                f"case3 {rc.get('case3')}, image {rc.get('image')}")


def criterion_7():
    W = group("D4")
    p = gentau_refine(W, knuth_maps(W, "L"), "L")
    z, w = W.parse("4"), W.parse("4 3 1 2")
    orders_ok = p.equal_at(0, z, w) and p.equal_at(1, z, w) and not p.equal_at(2, z, w)
    pr = gentau_refine(W, knuth_maps(W, "R"), "R")
    cats = realize_all(W, standard_config(W))
    ids = {frozenset(pr.class_of[x] for x in c.members.values()) for c in cats.values()}
    distinct = len(ids) == 8 and all(len(s) == 1 for s in ids)
    r = verify_gentau_cells(W, table("D4"), FAMILIES)
    ok = orders_ok and distinct and r.passed
    return ok, (f"s4 ~1 s4s3s1s2 and split at 2: {orders_ok}; 8 middle cells in distinct right classes: "
                f"{distinct}; conclusion over {len(FAMILIES)} families: {r.verdict}")


def criterion_8():
    D4, B3, D5 = group("D4"), group("B3"), group("D5")
    reps = [verify_edge_transport_axioms(D4, table("D4")),
            verify_edge_transport_axioms(B3, table("B3")),
            verify_map_structure(D4), verify_map_structure(D5)]
    return _reports_ok(reps)


def criterion_9():
    D5, B3 = group("D5"), group("B3")
    reps = [verify_parabolic(D5, table("D5"), subset_mask((0, 1, 2, 3))),
            verify_parabolic(B3, table("B3"), subset_mask((1, 2))),
            verify_nonnegative(table("D4")), verify_nonnegative(table("D5"))]
    return _reports_ok(reps)


def criterion_10():
    r = verify_e6_example(budget=E6_BUDGET)
    if r.skipped is None:
        return r.passed, r.to_text(3).splitlines()[0] + f", interval {r.details.get('interval_size')}"
    D4 = group("D4")
    fb = verify_interval_vs_full(D4, table("D4"), [D4.parse("1 2 3 4 3 1 2"), D4.parse("3 1 2 3")])
    return fb.passed, f"E6 skipped ({r.skipped}); D4 interval vs full: {fb.verdict}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    with capsys.disabled():
        announce(n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = [announce(n, *CRITERIA[n - 1]()) for n in range(1, 11)]
    raise SystemExit(0 if all(results) else 1)
