"""The eight D4 left cells of the middle two-sided cell, realized in any system.

Catalogs are stored in abstract labels 1..4 (3 central). A :class:`D4Config`
sends those labels to generators of the ambient system.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .coxeter import LEFT, RIGHT, CoxeterError, CoxeterSystem, Element, subset_mask

CATALOG_KEYS = ("10a", "10b", "14a1", "14a2", "14a4", "14b1", "14b2", "14b4")
OUTER = (1, 2, 4)
CENTER = 3


def catalog_title(key: str) -> str:
    """``"14a1"`` -> ``"C(14,a,1)"``."""
    if len(key) == 3:
        return f"C({key[:2]},{key[2]})"
    return f"C({key[:2]},{key[2]},{key[3]})"


def node_type(node: str) -> str:
    """Node names are a type tag plus optional primes: ``"A4'"`` -> ``"A4"``."""
    return node.rstrip("'")


@dataclass(frozen=True)
class D4Config:
    """A labeled D4 diagram inside a Coxeter system.

    ``labeling[k]`` is the 0-based generator carrying label k+1; label 3 is central.
    """

    side: str
    labeling: tuple[int, int, int, int]

    def gen(self, label: int) -> int:
        return self.labeling[label - 1]

    @property
    def mask(self) -> int:
        return subset_mask(self.labeling)

    def validate(self, sys: CoxeterSystem) -> "D4Config":
        if self.side not in (LEFT, RIGHT):
            raise CoxeterError(f"side must be L or R, got {self.side!r}")
        if len(set(self.labeling)) != 4 or not all(0 <= g < sys.rank for g in self.labeling):
            raise CoxeterError(f"labeling {self.labeling} is not an injection into S")
        c = self.gen(CENTER)
        for a in OUTER:
            if sys.m(self.gen(a), c) != 3:
                raise CoxeterError(f"m(s{self.gen(a) + 1}, s{c + 1}) must be 3")
        for a, b in itertools.combinations(OUTER, 2):
            if sys.m(self.gen(a), self.gen(b)) != 2:
                raise CoxeterError(f"m(s{self.gen(a) + 1}, s{self.gen(b) + 1}) must be 2")
        return self

    def relabelings(self) -> list["D4Config"]:
        """All six configs with the same generators and permuted outer labels."""
        outer = [self.gen(a) for a in OUTER]
        out = []
        for p in itertools.permutations(outer):
            out.append(D4Config(self.side, (p[0], p[1], self.gen(CENTER), p[2])))
        return out

    def with_side(self, side: str) -> "D4Config":
        return D4Config(side, self.labeling)


def standard_config(sys: CoxeterSystem, side: str = LEFT) -> D4Config:
    """The first D4 subdiagram found, with its center as label 3.

    For D_n this is generators 1, 2, 3, 4 in their natural labels.
    """
    n = sys.rank
    for c in range(n):
        nbrs = [g for g in range(n) if g != c and sys.m(g, c) == 3]
        for trio in itertools.combinations(nbrs, 3):
            if all(sys.m(a, b) == 2 for a, b in itertools.combinations(trio, 2)):
                return D4Config(side, (trio[0], trio[1], c, trio[2])).validate(sys)
    raise CoxeterError(f"{sys.name} has no D4 parabolic subsystem")


# ---------------------------------------------------------------------------
# Abstract data


@lru_cache(maxsize=1)
def _raw() -> dict:
    text = resources.files("klcells").joinpath("data/d4_catalogs.json").read_text()
    return json.loads(text)


def _swap_name(node: str, perm: dict[int, int]) -> str:
    tag = node_type(node)
    primes = node[len(tag):]
    if len(tag) == 2:
        tag = tag[0] + str(perm[int(tag[1])])
    return tag + primes


@lru_cache(maxsize=None)
def abstract_catalog(key: str) -> dict:
    """Bottoms, lines and gray edges in abstract labels for one catalog key."""
    raw = _raw()
    if key in raw["base"]:
        return raw["base"][key]
    if key not in raw["derived"]:
        raise KeyError(f"unknown catalog {key!r}")
    spec = raw["derived"][key]
    a, b = spec["swap"]
    perm = {1: 1, 2: 2, 3: 3, 4: 4}
    perm[a], perm[b] = b, a
    base = raw["base"][spec["from"]]
    return {
        "bottoms": {_swap_name(n, perm): [perm[g] for g in w] for n, w in base["bottoms"].items()},
        "lines": [[_swap_name(x, perm), perm[g], _swap_name(y, perm)] for x, g, y in base["lines"]],
        "gray": [[_swap_name(x, perm), _swap_name(y, perm)] for x, y in base["gray"]],
    }


# ---------------------------------------------------------------------------
# Realization


@dataclass(frozen=True)
class Catalog:
    """One catalog cell realized inside W_J (left convention)."""

    key: str
    members: dict[str, Element]
    lines: tuple[tuple[str, int, str], ...]
    gray: tuple[tuple[str, str], ...]

    @property
    def title(self) -> str:
        return catalog_title(self.key)

    @property
    def size(self) -> int:
        return len(self.members)

    def type_of(self, node: str) -> str:
        return node_type(node)

    def drawn_edges(self) -> set[frozenset]:
        """All W-graph edges the catalog lists, as sets of elements."""
        m = self.members
        out = {frozenset((m[x], m[y])) for x, _, y in self.lines}
        out |= {frozenset((m[x], m[y])) for x, y in self.gray}
        return out


def realize(sys: CoxeterSystem, cfg: D4Config, key: str) -> Catalog:
    """Generate members from the bottom words through the colored lines."""
    data = abstract_catalog(key)
    members: dict[str, Element] = {}
    for node, word in data["bottoms"].items():
        members[node] = sys.from_word([cfg.gen(g) for g in word])
    lines = [tuple(x) for x in data["lines"]]
    pending = list(lines)
    while pending:
        rest = []
        for x, g, y in pending:
            s = cfg.gen(g)
            if x in members and y not in members:
                members[y] = int(sys.left_mul[members[x], s])
            elif y in members and x not in members:
                members[x] = int(sys.left_mul[members[y], s])
            elif x not in members:
                rest.append((x, g, y))
        if len(rest) == len(pending):
            raise ValueError(f"catalog {key}: disconnected line data")
        pending = rest
    for x, g, y in lines:
        if int(sys.left_mul[members[x], cfg.gen(g)]) != members[y]:
            raise ValueError(f"catalog {key}: line {x}-{g}-{y} inconsistent")
    if len(set(members.values())) != len(members):
        raise ValueError(f"catalog {key}: repeated element")
    return Catalog(key=key, members=members, lines=tuple(lines),
                   gray=tuple(tuple(p) for p in data["gray"]))


def realize_all(sys: CoxeterSystem, cfg: D4Config) -> dict[str, Catalog]:
    key = ("catalogs", cfg.labeling)
    if key not in sys._cache:
        sys._cache[key] = {k: realize(sys, cfg, k) for k in CATALOG_KEYS}
    return sys._cache[key]


def catalog_lookup(sys: CoxeterSystem, cfg: D4Config) -> dict[Element, tuple[str, str]]:
    """Element of W_J -> (catalog key, node name)."""
    key = ("catalog_lookup", cfg.labeling)
    if key not in sys._cache:
        sys._cache[key] = {w: (c.key, n) for c in realize_all(sys, cfg).values()
                           for n, w in c.members.items()}
    return sys._cache[key]
