"""Knuth maps, B2 maps, D4 maps, clumps, and derived maps.

Every map is built from its left version; a right map is the left map
conjugated by inversion, T^R(w) = T^L(w^-1)^-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .catalog import (
    CENTER,
    OUTER,
    Catalog,
    D4Config,
    catalog_lookup,
    node_type,
    realize_all,
    standard_config,
)
from .coxeter import (
    LEFT,
    RIGHT,
    CoxeterError,
    CoxeterSystem,
    Element,
    parabolic_tables,
    subset_mask,
)

D4_TYPES = ("A1", "A2", "A4", "B1", "B2", "B4", "C", "D")

__all__ = [
    "D4Config", "standard_config", "PreconditionError", "TransportMap", "KnuthMap",
    "B2Map", "D4Map", "DerivedMap", "ComposedMap", "Clump", "D4Structure",
    "knuth_maps", "b2_maps", "d4_maps", "classify_d4_type", "clump_of",
    "knuth_cycle_check", "long_element_conjugate", "pair_of",
]


class PreconditionError(ValueError):
    """A map was applied outside its domain."""


def _side(side: str) -> str:
    s = side.upper()[:1]
    if s not in (LEFT, RIGHT):
        raise CoxeterError(f"side must be L or R, got {side!r}")
    return s


# ---------------------------------------------------------------------------
# Base


class TransportMap:
    """A map D -> P(W) with images of size 1 or 2.

    Subclasses implement ``_ldomain`` and ``_limage`` for the left version.
    """

    kind = 2  # 1 for injective maps, 2 for set-valued maps

    def __init__(self, sys: CoxeterSystem, side: str):
        self.system = sys
        self.side = _side(side)
        self._images: dict[Element, tuple[Element, ...]] | None = None

    # left versions -------------------------------------------------------
    def _ldomain(self, w: Element) -> bool:
        raise NotImplementedError

    def _limage(self, w: Element) -> tuple[Element, ...]:
        raise NotImplementedError

    # public --------------------------------------------------------------
    @property
    def name(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{self.name}^{self.side}"

    def domain(self, w: Element) -> bool:
        if self.side == LEFT:
            return self._ldomain(w)
        return self._ldomain(int(self.system.inverse[w]))

    def image(self, w: Element) -> tuple[Element, ...]:
        """Sorted image; raises PreconditionError outside the domain."""
        if not self.domain(w):
            raise PreconditionError(f"{self!r}: {self.system.format(w)} is not in the domain")
        if self.side == LEFT:
            return self._limage(w)
        inv = self.system.inverse
        return tuple(sorted(int(inv[x]) for x in self._limage(int(inv[w]))))

    __call__ = image

    def domain_elements(self) -> list[Element]:
        return sorted(self.images())

    def images(self) -> dict[Element, tuple[Element, ...]]:
        """All domain elements with their images (cached)."""
        if self._images is None:
            self._images = {w: self.image(w) for w in range(self.system.size) if self.domain(w)}
        return self._images

    def pair(self) -> "TransportMap":
        """The pair function: x -> {w : x in T(w)}."""
        return PairMap(self)


class PairMap(TransportMap):
    """Generic pair function computed by inverting a map's table."""

    def __init__(self, base: TransportMap):
        super().__init__(base.system, base.side)
        self.base = base
        inv: dict[Element, list[Element]] = {}
        for w, img in base.images().items():
            for x in img:
                inv.setdefault(x, []).append(w)
        self._table = {x: tuple(sorted(v)) for x, v in inv.items()}
        self._images = dict(self._table)

    @property
    def name(self) -> str:
        return f"pair({self.base.name})"

    def domain(self, w: Element) -> bool:
        return w in self._table

    def image(self, w: Element) -> tuple[Element, ...]:
        if w not in self._table:
            raise PreconditionError(f"{self!r}: {self.system.format(w)} is not in the domain")
        return self._table[w]

    __call__ = image

    def pair(self) -> TransportMap:
        return self.base


# ---------------------------------------------------------------------------
# Rank-two maps


class _RankTwo(TransportMap):
    order = 0

    def __init__(self, sys: CoxeterSystem, side: str, s: int, t: int):
        super().__init__(sys, side)
        if s == t or not (0 <= s < sys.rank and 0 <= t < sys.rank):
            raise CoxeterError(f"bad generator pair ({s + 1}, {t + 1})")
        if sys.m(s, t) != self.order:
            raise CoxeterError(
                f"m(s{s + 1}, s{t + 1}) = {sys.m(s, t)}, expected {self.order}")
        self.s, self.t = s, t
        self.J = subset_mask((s, t))
        self._pj = parabolic_tables(sys, self.J, LEFT)[0]
        self._ts = int(sys.left_mul[sys.left_mul[0, s], t])   # t*s
        self._t = int(sys.left_mul[0, t])

    def _ldomain(self, w: Element) -> bool:
        return int(self.system.left_tau[w]) & self.J == 1 << self.t

    @property
    def name(self) -> str:
        return f"T({self.s + 1},{self.t + 1})"


class KnuthMap(_RankTwo):
    """T_{s,t} for m(s,t) = 3: sw if p_J(w) = t, else tw."""

    kind = 1
    order = 3

    def _limage(self, w: Element) -> tuple[Element, ...]:
        lm = self.system.left_mul
        if int(self._pj[w]) == self._t:
            return (int(lm[w, self.s]),)
        return (int(lm[w, self.t]),)

    def apply(self, w: Element) -> Element:
        return self.image(w)[0]

    def pair(self) -> "KnuthMap":
        return KnuthMap(self.system, self.side, self.t, self.s)


class B2Map(_RankTwo):
    """T_{s,t} for m(s,t) = 4: {sw}, {sw, tw} or {tw} as p_J(w) is t, ts or tst."""

    order = 4

    def _limage(self, w: Element) -> tuple[Element, ...]:
        lm = self.system.left_mul
        p = int(self._pj[w])
        sw, tw = int(lm[w, self.s]), int(lm[w, self.t])
        if p == self._t:
            return (sw,)
        if p == self._ts:
            return tuple(sorted((sw, tw)))
        return (tw,)

    def pair(self) -> "B2Map":
        return B2Map(self.system, self.side, self.t, self.s)


def knuth_maps(sys: CoxeterSystem, side: str) -> list[KnuthMap]:
    return [KnuthMap(sys, side, s, t) for s in range(sys.rank) for t in range(sys.rank)
            if s != t and sys.m(s, t) == 3]


def b2_maps(sys: CoxeterSystem, side: str) -> list[B2Map]:
    return [B2Map(sys, side, s, t) for s in range(sys.rank) for t in range(sys.rank)
            if s != t and sys.m(s, t) == 4]


def long_element_conjugate(T: KnuthMap, w: Element) -> Element:
    """T_{s,t}(w) w0, asserting it equals T_{t,s}(w w0)."""
    sys = T.system
    w0 = sys.long_element
    lhs = sys.mul(T.apply(w), w0)
    rhs = T.pair().apply(sys.mul(w, w0))
    if lhs != rhs:
        raise AssertionError(
            f"{T!r}: T(w)w0 = {sys.format(lhs)} but T'(w w0) = {sys.format(rhs)}")
    return lhs


# ---------------------------------------------------------------------------
# D4 structure: types and clumps


@dataclass(frozen=True)
class Clump:
    """A coset translate of a catalog cell (left convention members)."""

    catalog: str
    coset_rep: Element
    members: tuple[Element, ...]
    types: dict = field(hash=False, compare=False)
    nodes: dict = field(hash=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.members)

    def of_type(self, tag: str) -> list[Element]:
        return sorted(w for w in self.members if self.types[w] == tag)


class D4Structure:
    """Left types and clumps of every element of W for one labeling."""

    def __init__(self, sys: CoxeterSystem, cfg: D4Config):
        cfg.validate(sys)
        self.system = sys
        self.config = cfg
        self.J = cfg.mask
        self.catalogs: dict[str, Catalog] = realize_all(sys, cfg)
        lookup = catalog_lookup(sys, cfg)
        pj, up = parabolic_tables(sys, self.J, LEFT)
        self.type_of: dict[Element, str] = {}
        self.clump_index: dict[Element, int] = {}
        self.clumps: list[Clump] = []
        groups: dict[tuple[int, str], list[Element]] = {}
        for w in range(sys.size):
            hit = lookup.get(int(pj[w]))
            if hit is None:
                continue
            self.type_of[w] = node_type(hit[1])
            groups.setdefault((int(up[w]), hit[0]), []).append(w)
        for (rep, key), mem in sorted(groups.items()):
            k = len(self.clumps)
            cat = self.catalogs[key]
            nodes = {}
            for name, x in cat.members.items():
                nodes[name] = sys.mul(x, rep)
            members = tuple(sorted(mem))
            self.clumps.append(Clump(
                catalog=key, coset_rep=rep, members=members,
                types={w: self.type_of[w] for w in members}, nodes=nodes))
            for w in members:
                self.clump_index[w] = k

    def clump(self, w: Element) -> Clump | None:
        k = self.clump_index.get(w)
        return None if k is None else self.clumps[k]


def d4_structure(sys: CoxeterSystem, cfg: D4Config) -> D4Structure:
    key = ("d4_structure", cfg.labeling)
    if key not in sys._cache:
        sys._cache[key] = D4Structure(sys, cfg.with_side(LEFT))
    return sys._cache[key]


def _to_left(sys: CoxeterSystem, cfg: D4Config, w: Element) -> Element:
    return w if cfg.side == LEFT else int(sys.inverse[w])


def clump_of(sys: CoxeterSystem, cfg: D4Config, w: Element) -> Clump | None:
    """The clump containing w (members inverted for a right config), or None."""
    st = d4_structure(sys, cfg)
    c = st.clump(_to_left(sys, cfg, w))
    if c is None or cfg.side == LEFT:
        return c
    inv = sys.inverse
    members = tuple(sorted(int(inv[x]) for x in c.members))
    return Clump(catalog=c.catalog, coset_rep=int(inv[c.coset_rep]), members=members,
                 types={int(inv[x]): t for x, t in c.types.items()},
                 nodes={n: int(inv[x]) for n, x in c.nodes.items()})


def catalog_type(sys: CoxeterSystem, cfg: D4Config, w: Element) -> str | None:
    """Type from the catalog of p_J(w)."""
    return d4_structure(sys, cfg).type_of.get(_to_left(sys, cfg, w))


def classify_d4_type(sys: CoxeterSystem, cfg: D4Config, w: Element,
                     choice: int = 0) -> str | None:
    """Type of w from descent sets and Knuth maps on the config labels.

    A_i: tau = {i,3} and tau(T_{j,3} w) = {i,j}.
    B_i: tau = {j,k} and tau(T_{3,j} w) = {k,3}.
    C:   tau = {1,2,4} and tau(T_{3,i} w) = {3}.
    D:   tau = {3} and tau(T_{i,3} w) = {1,2,4}.
    ``choice`` picks which of the admissible j (or i) is used.
    """
    x = _to_left(sys, cfg, w)
    g = cfg.gen
    J = cfg.mask

    def tau(v: Element) -> frozenset[int]:
        m = int(sys.left_tau[v]) & J
        return frozenset(lab for lab in (1, 2, 3, 4) if (m >> g(lab)) & 1)

    def knuth(a: int, b: int, v: Element) -> Element | None:
        T = KnuthMap(sys, LEFT, g(a), g(b))
        return T.apply(v) if T.domain(v) else None

    t0 = tau(x)
    for i in OUTER:
        j, k = [o for o in OUTER if o != i][choice % 2], [o for o in OUTER if o != i][1 - choice % 2]
        if t0 == {i, CENTER}:
            y = knuth(j, CENTER, x)
            if y is not None and tau(y) == {i, j}:
                return f"A{i}"
        if t0 == {j, k}:
            y = knuth(CENTER, j, x)
            if y is not None and tau(y) == {k, CENTER}:
                return f"B{i}"
    i = OUTER[choice % 3]
    if t0 == set(OUTER):
        y = knuth(CENTER, i, x)
        if y is not None and tau(y) == {CENTER}:
            return "C"
    if t0 == {CENTER}:
        y = knuth(i, CENTER, x)
        if y is not None and tau(y) == set(OUTER):
            return "D"
    return None


# ---------------------------------------------------------------------------
# D4 maps

_SOURCE_TARGET = {
    "D,i": ("A{i}", "D"),
    "C,i": ("B{i}", "C"),
    "i,C": ("C", "B{i}"),
    "i,D": ("D", "A{i}"),
    "main": ("C", "A{i}"),
    "bar": ("A{i}", "C"),
}
_PAIR = {"D,i": "i,D", "i,D": "D,i", "C,i": "i,C", "i,C": "C,i", "main": "bar", "bar": "main"}


class D4Map(TransportMap):
    """Same-clump map between D4 types.

    ``form`` is one of "D,i", "C,i", "i,C", "i,D" (the four D4 maps),
    "main" (T_i, C -> A_i) or "bar" (its pair, A_i -> C). ``i`` is a label in {1,2,4}.
    """

    def __init__(self, sys: CoxeterSystem, cfg: D4Config, form: str, i: int):
        super().__init__(sys, cfg.side)
        if form not in _SOURCE_TARGET:
            raise CoxeterError(f"unknown D4 map form {form!r}")
        if i not in OUTER:
            raise CoxeterError(f"D4 map index must be 1, 2 or 4, got {i}")
        self.config = cfg
        self.form = form
        self.i = i
        src, dst = _SOURCE_TARGET[form]
        self.source = src.format(i=i)
        self.target = dst.format(i=i)
        self.structure = d4_structure(sys, cfg)

    @property
    def name(self) -> str:
        if self.form == "main":
            return f"T{self.i}"
        if self.form == "bar":
            return f"Tbar{self.i}"
        return "T(" + self.form.replace("i", str(self.i)) + ")"

    def _ldomain(self, w: Element) -> bool:
        return self.structure.type_of.get(w) == self.source

    def _limage(self, w: Element) -> tuple[Element, ...]:
        c = self.structure.clump(w)
        return tuple(c.of_type(self.target))

    def pair(self) -> "D4Map":
        return D4Map(self.system, self.config, _PAIR[self.form], self.i)

    def multiplier_image(self, w: Element) -> tuple[Element, ...]:
        """Target-type elements among four explicit products, for the four D4 maps."""
        sys, g = self.system, self.config.gen
        i = self.i
        j, k = [o for o in OUTER if o != i]
        if self.form in ("D,i", "C,i"):
            words = [[i], [CENTER, j, k], [CENTER, j, CENTER], [CENTER, k, CENTER]]
        elif self.form in ("i,C", "i,D"):
            words = [[i], [j, k, CENTER], [CENTER, j, CENTER], [CENTER, k, CENTER]]
        else:
            raise CoxeterError("multiplier form only exists for the four D4 maps")
        if not self.domain(w):
            raise PreconditionError(f"{self!r}: {sys.format(w)} is not in the domain")
        x = _to_left(sys, self.config, w)
        out = set()
        for word in words:
            y = x
            for lab in reversed(word):
                y = int(sys.left_mul[y, g(lab)])
            if self.structure.type_of.get(y) == self.target:
                out.add(y)
        if self.side == RIGHT:
            out = {int(sys.inverse[y]) for y in out}
        return tuple(sorted(out))


def d4_maps(sys: CoxeterSystem, cfg: D4Config, forms: Sequence[str] = ("D,i", "C,i", "i,C", "i,D")
            ) -> list[D4Map]:
    return [D4Map(sys, cfg, f, i) for f in forms for i in OUTER]


def config_knuth(sys: CoxeterSystem, cfg: D4Config, a: int, b: int) -> KnuthMap:
    """Knuth map T_{a,b} in config labels."""
    return KnuthMap(sys, cfg.side, cfg.gen(a), cfg.gen(b))


# ---------------------------------------------------------------------------
# Derived maps and composition


class DerivedMap(TransportMap):
    """U: w if |T(w)| = 2, else the other preimage w* of T(w)."""

    kind = 1

    def __init__(self, base: TransportMap):
        super().__init__(base.system, base.side)
        self.base = base
        self._bar = base.pair()

    @property
    def name(self) -> str:
        return f"U[{self.base.name}]"

    def domain(self, w: Element) -> bool:
        return self.base.domain(w)

    def image(self, w: Element) -> tuple[Element, ...]:
        img = self.base.image(w)
        if len(img) == 2:
            return (w,)
        back = self._bar.image(img[0])
        others = [x for x in back if x != w]
        if len(others) != 1:
            raise PreconditionError(
                f"{self!r}: {self.system.format(w)} has no unique partner")
        return (others[0],)

    __call__ = image

    def apply(self, w: Element) -> Element:
        return self.image(w)[0]


class ComposedMap(TransportMap):
    """outer o inner, applied elementwise to set images."""

    def __init__(self, outer: TransportMap, inner: TransportMap):
        super().__init__(inner.system, inner.side)
        self.outer, self.inner = outer, inner

    @property
    def name(self) -> str:
        return f"{self.outer.name}.{self.inner.name}"

    def domain(self, w: Element) -> bool:
        return self.inner.domain(w) and all(self.outer.domain(x) for x in self.inner.image(w))

    def image(self, w: Element) -> tuple[Element, ...]:
        if not self.domain(w):
            raise PreconditionError(f"{self!r}: {self.system.format(w)} is not in the domain")
        out = set()
        for x in self.inner.image(w):
            out.update(self.outer.image(x))
        return tuple(sorted(out))

    __call__ = image


def pair_of(T: TransportMap) -> TransportMap:
    return T.pair()


def apply_chain(maps: Iterable[KnuthMap], w: Element) -> Element | None:
    """Apply maps in the given order (first map first); None if a domain fails."""
    for T in maps:
        if not T.domain(w):
            return None
        w = T.apply(w)
    return w


def knuth_cycle_check(sys: CoxeterSystem, cfg: D4Config, w: Element) -> Element:
    """T_{3,4} T_{1,3} T_{3,2} T_{4,3} T_{3,1} T_{2,3} applied to a type A_1 element."""
    if catalog_type(sys, cfg, w) != "A1":
        raise PreconditionError(f"{sys.format(w)} is not of type A1")
    order = [(2, 3), (3, 1), (4, 3), (3, 2), (1, 3), (3, 4)]
    out = apply_chain([config_knuth(sys, cfg, a, b) for a, b in order], w)
    if out is None:
        raise AssertionError(f"knuth cycle composite undefined at {sys.format(w)}")
    return out
