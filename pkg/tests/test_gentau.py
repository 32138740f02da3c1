import pytest

from klcells import build_wgraph, cells, gentau_equal, gentau_refine
from klcells.catalog import realize_all, standard_config
from klcells.gentau import gentau_json
from klcells.maps import b2_maps, d4_maps, knuth_maps


def test_left_knuth_orders(D4):
    p = gentau_refine(D4, knuth_maps(D4, "L"), "L")
    assert p.counts() == [16, 30, 36, 36]
    z, w = D4.parse("4"), D4.parse("4 3 1 2")
    assert p.equal_at(0, z, w)
    assert p.equal_at(1, z, w)
    assert not p.equal_at(2, z, w)
    assert not gentau_equal(p, z, w)


def test_right_knuth_separates_middle_cells(D4):
    p = gentau_refine(D4, knuth_maps(D4, "R"), "R")
    cats = realize_all(D4, standard_config(D4))
    ids = set()
    for c in cats.values():
        mem = c.members.values()
        assert len({p.class_of[w] for w in mem}) == 1
        ids.add(p.class_of[next(iter(mem))])
    assert len(ids) == 8


@pytest.mark.parametrize("family", ["knuth", "knuth+b2", "knuth+d4"])
@pytest.mark.parametrize("name", ["D4", "B3"])
def test_constant_on_opposite_cells(name, family, groups, tables):
    W = groups(name)
    g = build_wgraph(tables(name))
    for side, other in (("L", "R"), ("R", "L")):
        fam = knuth_maps(W, side)
        if "b2" in family:
            fam += b2_maps(W, side)
        if "d4" in family and name == "D4":
            fam += d4_maps(W, standard_config(W, side))
        p = gentau_refine(W, fam, side)
        for c in cells(g, other).classes:
            assert len({p.class_of[w] for w in c}) == 1


def test_max_order_and_json(D4):
    fam = knuth_maps(D4, "L")
    p = gentau_refine(D4, fam, "L", max_order=1)
    assert p.counts() == [16, 30]
    data = gentau_json(D4, p, fam)
    assert data["side"] == "left" and len(data["elements"]) == 192
    assert data["class_counts"] == [16, 30]
