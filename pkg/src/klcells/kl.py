"""
Kazhdan-Lusztig polynomials over a lower ideal of W.

Columns P_{., w} are computed in increasing index order (hence increasing
length). For w with smallest left descent s and v = sw, rows y with sy < y use

    P_{y,w} = P_{sy,v} + q P_{y,v} - sum_z mu(z,v) q^{(l(w)-l(z))/2} P_{y,z}

(z over sz < z, z < v, mu(z,v) != 0), and rows with sy > y copy row sy. Each
column is stored sparsely over its Bruhat interval [e, w].

A table's universe is either all of W or the lower ideal below some set of
tops; the recursion never leaves a lower ideal.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .coxeter import (
    DENSE_BRUHAT_LIMIT,
    CoxeterSystem,
    Element,
    EnumerationLimitError,
    lower_ideal,
    lower_ideal_order,
)

CACHE_VERSION = "v1"
INTERVAL_BUDGET = 20_000
_OVERFLOW_GUARD = 1 << 60


class ScopeError(LookupError):
    """Element outside the scope of a KL table."""


class NonNegativityError(AssertionError):
    """A computed KL coefficient was negative; this signals an engine bug."""


class CacheError(ValueError):
    """Bad KL cache file."""


class CacheTruncatedError(CacheError):
    pass


class CacheVersionError(CacheError):
    pass


class CacheChecksumError(CacheError):
    pass


class CacheGroupError(CacheError):
    pass


@dataclass(frozen=True)
class KLPolynomial:
    """Integer polynomial in q; ``coefficients[k]`` is the coefficient of q^k."""

    coefficients: tuple[int, ...] = ()

    @classmethod
    def from_seq(cls, coeffs: Iterable[int]) -> "KLPolynomial":
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        return cls(tuple(c))

    def __bool__(self) -> bool:
        return bool(self.coefficients)

    def __getitem__(self, k: int) -> int:
        return self.coefficients[k] if 0 <= k < len(self.coefficients) else 0

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        terms = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            mono = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}{mono}")
        return " + ".join(terms)


ONE = KLPolynomial((1,))
ZERO = KLPolynomial(())


@dataclass(eq=False)
class KLTable:
    """KL polynomials for all pairs y <= w inside ``universe``.

    ``rows[k]`` are local indices y <= w (w local index k), ``coeffs[k]`` the
    matching coefficient rows. ``mu_rows[k]``/``mu_vals[k]`` list the z < w with
    mu(z, w) != 0.
    """

    system: CoxeterSystem
    universe: np.ndarray
    local: np.ndarray
    below: np.ndarray
    rows: list = field(default_factory=list)
    coeffs: list = field(default_factory=list)
    mu_rows: list = field(default_factory=list)
    mu_vals: list = field(default_factory=list)
    scope: str = "full"
    _mu_matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return int(self.universe.shape[0])

    def loc(self, w: Element) -> int:
        if not 0 <= w < self.system.size:
            raise ScopeError(f"element index {w} out of range")
        k = int(self.local[w])
        if k >= self.size:
            raise ScopeError(f"element {self.system.format(w)} is outside the table scope")
        return k

    def in_scope(self, w: Element) -> bool:
        return 0 <= w < self.system.size and int(self.local[w]) < self.size

    def column(self, w: Element) -> dict[Element, KLPolynomial]:
        k = self.loc(w)
        return {int(self.universe[r]): KLPolynomial.from_seq(c)
                for r, c in zip(self.rows[k], self.coeffs[k])}

    def mu_matrix(self) -> np.ndarray:
        """Dense symmetric mu-tilde matrix over local indices."""
        if self._mu_matrix is None:
            n = self.size
            m = np.zeros((n, n), dtype=np.int32)
            for k in range(n):
                m[k, self.mu_rows[k]] = self.mu_vals[k]
            m = m + m.T
            self._mu_matrix = m
        return self._mu_matrix

    def pair_count(self) -> int:
        return int(sum(len(r) for r in self.rows))


def _new_table(sys: CoxeterSystem, universe: np.ndarray, scope: str) -> KLTable:
    universe = np.asarray(universe, dtype=np.int64)
    n = universe.shape[0]
    local = np.full(sys.size + 1, n, dtype=np.int64)
    local[universe] = np.arange(n)
    if scope == "full" and "bruhat" in sys._cache:
        below = sys._cache["bruhat"]
    else:
        below = lower_ideal_order(sys, universe)
        if scope == "full":
            sys._cache["bruhat"] = below
    return KLTable(system=sys, universe=universe, local=local, below=below, scope=scope)


def build_full_table(sys: CoxeterSystem, limit: int = DENSE_BRUHAT_LIMIT) -> KLTable:
    """All P_{y,w} for the whole group."""
    if sys.size > limit:
        raise EnumerationLimitError(
            f"full KL table limited to {limit} elements, {sys.name} has {sys.size}")
    tbl = _new_table(sys, np.arange(sys.size), "full")
    _compute(tbl)
    return tbl


def build_interval_table(sys: CoxeterSystem, top: Element | Sequence[Element],
                         budget: int = INTERVAL_BUDGET) -> KLTable:
    """P_{y,w} for pairs inside the lower ideal below ``top`` (one element or several)."""
    tops = [int(top)] if np.isscalar(top) else [int(t) for t in top]
    universe = lower_ideal(sys, tops)
    if universe.shape[0] > budget:
        raise EnumerationLimitError(
            f"interval has {universe.shape[0]} elements, budget is {budget}")
    tbl = _new_table(sys, universe, "interval")
    _compute(tbl)
    return tbl


def _compute(tbl: KLTable, dtype=np.int64) -> None:
    sys = tbl.system
    uni = tbl.universe
    n = tbl.size
    length = sys.length[uni]
    lmul = np.vstack([tbl.local[sys.left_mul[uni]], np.full((1, sys.rank), n)])
    ltau = sys.left_tau[uni]
    width = int(length.max()) // 2 + 2 if n else 1
    rows, coeffs, mu_rows, mu_vals = [], [], [], []
    for k in range(n):
        if k == 0:
            r = np.zeros(1, dtype=np.int64)
            c = np.ones((1, 1), dtype=dtype)
        else:
            s = int(sys.first[uni[k]])
            v = int(lmul[k, s])
            lw = int(length[k])
            dense = np.zeros((n + 1, width), dtype=dtype)
            dense[rows[v], :coeffs[v].shape[1]] = coeffs[v]
            sy = lmul[:n, s]
            down = ((ltau >> s) & 1).astype(bool)
            col = np.zeros((n + 1, width), dtype=dtype)
            col[:n][down] = dense[sy[down]]
            col[:n, 1:][down] += dense[:n][down][:, :-1]
            for z, m in zip(mu_rows[v], mu_vals[v]):
                if not (ltau[z] >> s) & 1:
                    continue
                shift = (lw - int(length[z])) // 2
                rz, cz = rows[z], coeffs[z]
                keep = down[rz]
                col[rz[keep], shift:shift + cz.shape[1]] -= m * cz[keep]
            up = ~down
            col[:n][up] = col[sy[up]]
            r = np.nonzero(tbl.below[k])[0]
            support = np.nonzero(col[:n].any(axis=1))[0]
            if not np.array_equal(support, r):
                raise AssertionError(
                    f"KL support differs from Bruhat interval at w={sys.format(int(uni[k]))}")
            deg = (lw - length[r] - 1) // 2 + 1
            deg[-1] = 1
            c = col[r]
            if c.size and (c < 0).any():
                bad = int(r[np.nonzero((c < 0).any(axis=1))[0][0]])
                raise NonNegativityError(
                    f"negative KL coefficient at y={sys.format(int(uni[bad]))}, "
                    f"w={sys.format(int(uni[k]))}")
            mask = np.arange(width)[None, :] >= deg[:, None]
            if (c[mask] != 0).any():
                raise AssertionError(
                    f"degree bound violated at w={sys.format(int(uni[k]))}")
            c = c[:, :max(int(deg.max()), 1)]
            if dtype is not object and c.size and int(np.abs(c).max()) > _OVERFLOW_GUARD:
                return _restart_exact(tbl)
        rows.append(r)
        coeffs.append(c)
        gap = lw - length[r] if k else np.zeros(1, dtype=np.int64)
        odd = (gap % 2 == 1)
        idx = np.nonzero(odd)[0]
        vals = c[idx, (gap[idx] - 1) // 2] if idx.size else np.zeros(0, dtype=dtype)
        nz = vals != 0
        mu_rows.append(r[idx[nz]])
        mu_vals.append(np.asarray(vals[nz], dtype=np.int64))
    tbl.rows, tbl.coeffs, tbl.mu_rows, tbl.mu_vals = rows, coeffs, mu_rows, mu_vals


def _restart_exact(tbl: KLTable) -> None:
    # coefficients approached int64 range: redo the whole table with Python ints
    _compute(tbl, dtype=object)


# ---------------------------------------------------------------------------
# Queries


def kl_poly(tbl: KLTable, y: Element, w: Element) -> KLPolynomial:
    """P_{y,w}; zero when y is not below w."""
    ky, kw = tbl.loc(y), tbl.loc(w)
    if not tbl.below[kw, ky]:
        return ZERO
    r = tbl.rows[kw]
    i = int(np.searchsorted(r, ky))
    return KLPolynomial.from_seq(tbl.coeffs[kw][i])


def mu(tbl: KLTable, y: Element, w: Element) -> int:
    """Coefficient of q^{(l(w)-l(y)-1)/2} in P_{y,w}; 0 for even gaps or y not below w."""
    ky, kw = tbl.loc(y), tbl.loc(w)
    if ky == kw or not tbl.below[kw, ky]:
        return 0
    return _mu_local(tbl, ky, kw)


def _mu_local(tbl: KLTable, ky: int, kw: int) -> int:
    if tbl._mu_matrix is not None:
        return int(tbl._mu_matrix[ky, kw])
    r = tbl.mu_rows[kw]
    i = int(np.searchsorted(r, ky))
    return int(tbl.mu_vals[kw][i]) if i < r.shape[0] and r[i] == ky else 0


def mu_tilde(tbl: KLTable, y: Element, w: Element) -> int:
    """mu(y,w) if y <= w, mu(w,y) if w < y, else 0. Symmetric."""
    ky, kw = tbl.loc(y), tbl.loc(w)
    if tbl.below[kw, ky]:
        return _mu_local(tbl, ky, kw) if ky != kw else 0
    if tbl.below[ky, kw]:
        return _mu_local(tbl, kw, ky)
    return 0


def degree_bound(sys: CoxeterSystem, y: Element, w: Element) -> float:
    return (int(sys.length[w]) - int(sys.length[y]) - 1) / 2


# ---------------------------------------------------------------------------
# Cache file


def save_cache(tbl: KLTable, path: str | Path) -> None:
    """Write ``klcache v1 <group> <count>``, one ``y w c0 c1 ...`` line per pair,
    then ``end <sha256>`` over everything before it."""
    if tbl.scope != "full":
        raise CacheError("only full tables can be cached")
    sys = tbl.system
    lines = [f"klcache {CACHE_VERSION} {sys.name} {sys.size}"]
    for k in range(tbl.size):
        w = int(tbl.universe[k])
        for r, c in zip(tbl.rows[k], tbl.coeffs[k]):
            cs = list(c)
            while len(cs) > 1 and cs[-1] == 0:
                cs.pop()
            lines.append(f"{int(tbl.universe[r])} {w} " + " ".join(str(int(x)) for x in cs))
    body = ("\n".join(lines) + "\n").encode()
    digest = hashlib.sha256(body).hexdigest()
    Path(path).write_bytes(body + f"end {digest}\n".encode())


def load_cache(sys: CoxeterSystem, path: str | Path) -> KLTable:
    """Read a cache written by :func:`save_cache` for the same group."""
    data = Path(path).read_bytes()
    nl = data.find(b"\n")
    if nl < 0:
        raise CacheTruncatedError(f"{path}: truncated at byte {len(data)} (no header line)")
    header = data[:nl].decode(errors="replace").split()
    if len(header) != 4 or header[0] != "klcache":
        raise CacheError(f"{path}: not a klcache file")
    if header[1] != CACHE_VERSION:
        raise CacheVersionError(f"{path}: version {header[1]}, expected {CACHE_VERSION}")
    if header[2] != sys.name or header[3] != str(sys.size):
        raise CacheGroupError(
            f"{path}: cache is for {header[2]} ({header[3]} elements), "
            f"not {sys.name} ({sys.size})")
    end = data.rfind(b"\nend ")
    if end < 0 or not data.endswith(b"\n"):
        last = data.rfind(b"\n", 0, len(data) - 1) + 1 if data.endswith(b"\n") else data.rfind(b"\n") + 1
        raise CacheTruncatedError(f"{path}: truncated at byte {last} (missing end record)")
    body = data[:end + 1]
    trailer = data[end + 1:].decode(errors="replace").split()
    if len(trailer) != 2 or hashlib.sha256(body).hexdigest() != trailer[1]:
        raise CacheChecksumError(f"{path}: checksum mismatch")

    tbl = _new_table(sys, np.arange(sys.size), "full")
    n = sys.size
    cols: list[list] = [[] for _ in range(n)]
    for line in body[nl + 1:].decode().splitlines():
        parts = line.split()
        y, w = int(parts[0]), int(parts[1])
        cols[w].append((y, [int(x) for x in parts[2:]]))
    length = sys.length
    for k in range(n):
        ent = sorted(cols[k])
        r = np.array([y for y, _ in ent], dtype=np.int64)
        width = max((len(c) for _, c in ent), default=1)
        big = any(abs(x) > _OVERFLOW_GUARD for _, c in ent for x in c)
        c = np.zeros((len(ent), width), dtype=object if big else np.int64)
        for i, (_, cs) in enumerate(ent):
            c[i, :len(cs)] = cs
        if not np.array_equal(r, np.nonzero(tbl.below[k])[0]):
            raise CacheError(f"{path}: column {k} does not match the Bruhat interval")
        tbl.rows.append(r)
        tbl.coeffs.append(c)
        gap = length[k] - length[r]
        idx = np.nonzero(gap % 2 == 1)[0]
        deg = (gap[idx] - 1) // 2
        vals = np.array([c[i, d] if d < width else 0 for i, d in zip(idx, deg)], dtype=np.int64)
        nz = vals != 0
        tbl.mu_rows.append(r[idx[nz]])
        tbl.mu_vals.append(vals[nz])
    return tbl


def tables_equal(a: KLTable, b: KLTable) -> bool:
    """Same universe and identical polynomials."""
    if not np.array_equal(a.universe, b.universe):
        return False
    for k in range(a.size):
        if not np.array_equal(a.rows[k], b.rows[k]):
            return False
        ca, cb = a.coeffs[k], b.coeffs[k]
        wa = max(ca.shape[1], cb.shape[1])
        pa = np.zeros((ca.shape[0], wa), dtype=object)
        pb = np.zeros((cb.shape[0], wa), dtype=object)
        pa[:, :ca.shape[1]] = ca
        pb[:, :cb.shape[1]] = cb
        if not (pa == pb).all():
            return False
    return True
