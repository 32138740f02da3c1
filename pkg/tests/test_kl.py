from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klcells import build_full_table, build_interval_table, build_system
from klcells.coxeter import bruhat_leq, lower_ideal
from klcells.kl import (
    CacheChecksumError,
    CacheGroupError,
    CacheTruncatedError,
    CacheVersionError,
    KLPolynomial,
    ScopeError,
    kl_poly,
    load_cache,
    mu,
    mu_tilde,
    save_cache,
    tables_equal,
)


def _add(a, b, shift=0, sign=1):
    out = list(a) + [0] * max(0, len(b) + shift - len(a))
    for k, c in enumerate(b):
        out[k + shift] += sign * c
    while out and out[-1] == 0:
        out.pop()
    return out


def scalar_oracle(W):
    """Textbook recursion on one pair at a time, memoized."""
    L = W.length

    @lru_cache(maxsize=None)
    def P(y, w):
        if not bruhat_leq(W, y, w):
            return ()
        if y == w:
            return (1,)
        s = int(W.first[w])
        v = int(W.left_mul[w, s])
        sy = int(W.left_mul[y, s])
        if L[sy] < L[y]:
            res = _add(_add([], P(sy, v)), P(y, v), 1)
        else:
            res = _add(_add([], P(sy, v), 1), P(y, v))
        for z in range(W.size):
            if L[W.left_mul[z, s]] < L[z] and L[z] < L[v] and bruhat_leq(W, y, z):
                m = M(z, v)
                if m:
                    res = _add(res, [m * c for c in P(y, z)], (int(L[w]) - int(L[z])) // 2, -1)
        return tuple(res)

    def M(z, v):
        gap = int(L[v]) - int(L[z])
        if gap % 2 == 0:
            return 0
        p = P(z, v)
        d = (gap - 1) // 2
        return p[d] if d < len(p) else 0

    return P


@pytest.mark.parametrize("name", ["A3", "B3", "A2", "B2"])
def test_table_matches_scalar_oracle(name, tables):
    W = build_system(name)
    tbl = tables(name)
    P = scalar_oracle(W)
    for w in range(W.size):
        for y in range(W.size):
            assert kl_poly(tbl, y, w).coefficients == P(y, w), (W.format(y), W.format(w))


def test_known_values(tables):
    A2 = build_system("A2")
    assert str(kl_poly(tables("A2"), A2.parse("1"), A2.parse("1 2 1"))) == "1"
    A3 = build_system("A3")
    t = tables("A3")
    assert str(kl_poly(t, A3.parse("2"), A3.parse("2 1 3 2"))) == "1 + q"
    assert mu(t, A3.parse("2"), A3.parse("2 1 3 2")) == 1
    D4 = build_system("D4")
    assert str(kl_poly(tables("D4"), 0, D4.long_element)) == "1"
    assert str(kl_poly(tables("D4"), D4.parse("1 2"), D4.parse("3"))) == "0"


def test_dihedral_polys_are_one(tables):
    W = build_system("B2")
    tbl = tables("B2")
    for w in range(W.size):
        for y in range(W.size):
            expect = "1" if bruhat_leq(W, y, w) else "0"
            assert str(kl_poly(tbl, y, w)) == expect


def test_degree_and_constant_term(D4, D4_table):
    for w in range(D4.size):
        for y, p in D4_table.column(w).items():
            assert p[0] == 1
            if y != w:
                assert 2 * p.degree <= D4.length[w] - D4.length[y] - 1
            assert all(c >= 0 for c in p.coefficients)


def test_mu_tilde_symmetric(D4, D4_table):
    M = D4_table.mu_matrix()
    assert np.array_equal(M, M.T)
    for y in range(0, D4.size, 7):
        for w in range(D4.size):
            assert mu_tilde(D4_table, y, w) == mu_tilde(D4_table, w, y)
            if bruhat_leq(D4, y, w):
                assert mu_tilde(D4_table, y, w) == mu(D4_table, y, w)


def test_polynomial_format():
    assert str(KLPolynomial.from_seq([1, 0, 2, 0])) == "1 + 2q^2"
    assert str(KLPolynomial.from_seq([])) == "0"
    assert str(KLPolynomial.from_seq([1, 1])) == "1 + q"


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(0, 191), min_size=1, max_size=3))
def test_interval_matches_full(tops):
    D4 = build_system("D4")
    from klcells.kl import build_full_table as bft
    full = bft(D4)
    it = build_interval_table(D4, tops)
    assert set(it.universe.tolist()) == set(lower_ideal(D4, tops).tolist())
    for w in it.universe.tolist():
        for y, p in it.column(w).items():
            assert p == kl_poly(full, y, w)


def test_interval_scope(D4):
    w = D4.parse("1 2 4")
    it = build_interval_table(D4, w)
    with pytest.raises(ScopeError):
        kl_poly(it, 0, D4.long_element)


def test_cache_roundtrip(tmp_path, D4, D4_table):
    path = tmp_path / "D4.klcache"
    save_cache(D4_table, path)
    again = load_cache(D4, path)
    assert tables_equal(D4_table, again)
    path2 = tmp_path / "again.klcache"
    save_cache(again, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_cache_faults(tmp_path, D4, D4_table):
    path = tmp_path / "D4.klcache"
    save_cache(D4_table, path)
    data = path.read_bytes()

    cut = tmp_path / "cut.klcache"
    cut.write_bytes(data[: len(data) // 2])
    with pytest.raises(CacheTruncatedError, match=r"byte \d+"):
        load_cache(D4, cut)

    ver = tmp_path / "ver.klcache"
    ver.write_bytes(data.replace(b"klcache v1", b"klcache v9", 1))
    with pytest.raises(CacheVersionError):
        load_cache(D4, ver)

    flip = bytearray(data)
    nl = data.index(b"\n") + 1
    i = data.index(b" 1\n", nl)
    flip[i + 1] = ord("2")
    bad = tmp_path / "bad.klcache"
    bad.write_bytes(bytes(flip))
    with pytest.raises(CacheChecksumError):
        load_cache(D4, bad)

    with pytest.raises(CacheGroupError):
        load_cache(build_system("A3"), path)
