import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klcells import build_system
from klcells.catalog import CATALOG_KEYS, D4Config, catalog_title, realize_all, standard_config
from klcells.maps import (
    B2Map,
    D4Map,
    DerivedMap,
    KnuthMap,
    PreconditionError,
    b2_maps,
    catalog_type,
    classify_d4_type,
    clump_of,
    config_knuth,
    d4_maps,
    knuth_maps,
    long_element_conjugate,
    knuth_cycle_check,
)

D4 = build_system("D4")
CFG = standard_config(D4)


def words(W, elems):
    return [W.format(x) for x in elems]


def test_knuth_examples():
    T = KnuthMap(D4, "L", 2, 3)  # T_{3,4}
    assert words(D4, T.image(D4.parse("4"))) == ["3 4"]
    assert words(D4, T.image(D4.parse("4 3 1"))) == ["3 1"]
    assert not T.domain(D4.parse("3"))
    with pytest.raises(PreconditionError):
        T.image(D4.parse("3"))


def test_knuth_maps_are_involutive_pairs():
    for T in knuth_maps(D4, "L") + knuth_maps(D4, "R"):
        P = T.pair()
        for w, (x,) in T.images().items():
            assert P.apply(x) == w
            long_element_conjugate(T, w)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 191), st.sampled_from(["L", "R"]))
def test_knuth_alt_definition(w, side):
    for T in knuth_maps(D4, side):
        if not T.domain(w):
            continue
        x = T.apply(w)
        s, t = T.s, T.t
        mul = D4.left_mul if side == "L" else D4.right_mul
        assert x in (int(mul[w, s]), int(mul[w, t]))
        tau = D4.left_tau if side == "L" else D4.right_tau
        J = (1 << s) | (1 << t)
        assert int(tau[x]) & J == 1 << s


def test_right_maps_by_inversion():
    for TL, TR in zip(knuth_maps(D4, "L"), knuth_maps(D4, "R")):
        for w, img in TL.images().items():
            assert TR.image(int(D4.inverse[w])) == tuple(sorted(int(D4.inverse[x]) for x in img))


def test_b2_map_shapes():
    B3 = build_system("B3")
    fams = b2_maps(B3, "L")
    assert len(fams) == 2
    T = B2Map(B3, "L", 1, 2)
    sizes = sorted({len(v) for v in T.images().values()})
    assert sizes == [1, 2]
    P = T.pair()
    for w, img in T.images().items():
        for x in img:
            assert w in P.image(x)
    U = DerivedMap(T)
    for w in T.images():
        assert U.apply(U.apply(w)) == w
    with pytest.raises(Exception):
        B2Map(D4, "L", 0, 2)


def test_catalog_sizes_and_titles():
    cats = realize_all(D4, CFG)
    assert sorted(cats) == sorted(CATALOG_KEYS)
    assert sorted(c.size for c in cats.values()) == [10, 10, 14, 14, 14, 14, 14, 14]
    assert catalog_title("14b2") == "C(14,b,2)"
    assert cats["10a"].title == "C(10,a)"


def test_clump_types_match_alt_definition():
    for base in CFG.relabelings():
        for side in ("L", "R"):
            cfg = base.with_side(side)
            for w in range(D4.size):
                t = catalog_type(D4, cfg, w)
                assert all(classify_d4_type(D4, cfg, w, c) == t for c in range(3))


def test_clump_example():
    c = clump_of(D4, CFG, D4.parse("1 2 4"))
    assert c.catalog == "10a" and c.size == 10
    assert sorted(c.types.values()).count("C") == 2
    assert clump_of(D4, CFG, 0) is None


def test_d4_map_examples():
    T = D4Map(D4, CFG, "i,C", 1)
    assert T.name == "T(1,C)"
    w = D4.parse("1 2 4")
    assert words(D4, T.image(w)) == ["2 3 4 3 1 2"]
    for M in d4_maps(D4, CFG):
        for w in M.images():
            assert M.image(w) == M.multiplier_image(w)
            for x in M.image(w):
                assert w in M.pair().image(x)


def test_main_maps_and_pairs():
    for i in (1, 2, 4):
        T = D4Map(D4, CFG, "main", i)
        Tb = T.pair()
        assert Tb.name == f"Tbar{i}"
        for w, img in T.images().items():
            assert catalog_type(D4, CFG, w) == "C"
            assert all(catalog_type(D4, CFG, x) == f"A{i}" for x in img)


def test_knuth_cycle():
    # fixes A1 elements of 10-clumps, moves those of 14-clumps within the clump
    sizes = set()
    for w in range(D4.size):
        if catalog_type(D4, CFG, w) == "A1":
            r = knuth_cycle_check(D4, CFG, w)
            c = clump_of(D4, CFG, w)
            assert catalog_type(D4, CFG, r) == "A1"
            assert r in c.members
            assert (r == w) == (c.size == 10)
            sizes.add(c.size)
    assert sizes == {10, 14}


def test_config_knuth_labels():
    T = config_knuth(D4, CFG, 4, 3)
    assert (T.s, T.t) == (CFG.gen(4), CFG.gen(3))


def test_d5_configs():
    D5 = build_system("D5")
    cfg = standard_config(D5)
    st_ = realize_all(D5, cfg)
    assert len(st_) == 8
    n = sum(1 for w in range(D5.size) if catalog_type(D5, cfg, w) is not None)
    # 104 middle elements per coset of the D4 parabolic
    assert n == 104 * D5.size // 192
