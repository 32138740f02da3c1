"""
Finite Coxeter systems enumerated exactly.

Elements are found by breadth-first search on the orbit of rho in
fundamental-weight coordinates, acting by the integer Cartan matrix. Since rho
is regular the orbit is in bijection with W, and the sign pattern of w(rho)
gives the left descent set of w.

Elements are plain ints (indices into the enumeration). They are sorted by
length, then by the lexicographically minimal reduced word, so index 0 is the
identity and indices are stable across runs.

Generator subsets (descent sets, parabolic subsets) are int bitmasks.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Element = int
GeneratorSubset = int

ENUMERATION_BUDGET = 1_000_000
DENSE_BRUHAT_LIMIT = 4096

LEFT = "L"
RIGHT = "R"


class CoxeterError(ValueError):
    """Malformed Coxeter data or bad input."""


class EnumerationLimitError(RuntimeError):
    """The group is infinite or larger than the enumeration budget."""


def _check_side(side: str) -> str:
    s = side.upper()[:1]
    if s not in (LEFT, RIGHT):
        raise CoxeterError(f"side must be L or R, got {side!r}")
    return s


# ---------------------------------------------------------------------------
# Named types

def _chain(n: int) -> list[tuple[int, int, int]]:
    return [(i, i + 1, 3) for i in range(n - 1)]


def named_coxeter_matrix(name: str) -> np.ndarray:
    """Coxeter matrix (0-based) for A_n, B_n, D_n and E6.

    D_n uses the labeling where generators 1 and 2 form the fork at node 3 and
    3, 4, ..., n is a chain; for D4 this makes 3 the central node. B_n is the
    Bourbaki chain with m(n-1, n) = 4. E6 uses Bourbaki labels.
    """
    key = name.strip().upper()
    if len(key) < 2 or not key[1:].isdigit():
        raise CoxeterError(f"unknown group name {name!r}")
    kind, n = key[0], int(key[1:])
    edges: list[tuple[int, int, int]]
    if kind == "A" and n >= 1:
        edges = _chain(n)
    elif kind == "B" and n >= 2:
        edges = _chain(n)
        edges[-1] = (n - 2, n - 1, 4)
    elif kind == "D" and n >= 4:
        edges = [(0, 2, 3), (1, 2, 3)] + [(i, i + 1, 3) for i in range(2, n - 1)]
    elif kind == "E" and n == 6:
        edges = [(0, 2, 3), (2, 3, 3), (3, 4, 3), (4, 5, 3), (1, 3, 3)]
    else:
        raise CoxeterError(f"unknown group name {name!r}")
    m = np.full((n, n), 2, dtype=np.int64)
    np.fill_diagonal(m, 1)
    for i, j, order in edges:
        m[i, j] = m[j, i] = order
    return m


def parse_matrix_file(path: str | Path) -> np.ndarray:
    """Read a Coxeter matrix from lines of 1-based ``i j m`` triples.

    Pairs not listed default to m = 2. Blank lines and ``#`` comments are skipped.
    """
    triples = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or not all(p.lstrip("-").isdigit() for p in parts):
            raise CoxeterError(f"{path}:{lineno}: expected 'i j m', got {raw!r}")
        triples.append(tuple(int(p) for p in parts))
    if not triples:
        raise CoxeterError(f"{path}: no entries")
    n = max(max(i, j) for i, j, _ in triples)
    m = np.full((n, n), 2, dtype=np.int64)
    np.fill_diagonal(m, 1)
    seen: dict[tuple[int, int], int] = {}
    for i, j, order in triples:
        if i < 1 or j < 1:
            raise CoxeterError(f"{path}: generator indices are 1-based")
        a, b = i - 1, j - 1
        if a == b:
            if order != 1:
                raise CoxeterError(f"{path}: m(s,s) must be 1")
            continue
        key = (min(a, b), max(a, b))
        if key in seen and seen[key] != order:
            raise CoxeterError(f"{path}: conflicting orders for pair ({i}, {j})")
        seen[key] = order
        m[a, b] = m[b, a] = order
    return m


def validate_coxeter_matrix(m: np.ndarray) -> None:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise CoxeterError("Coxeter matrix must be square and non-empty")
    if not np.array_equal(m, m.T):
        raise CoxeterError("Coxeter matrix must be symmetric")
    if not np.all(np.diag(m) == 1):
        raise CoxeterError("diagonal entries must be 1")
    off = m[~np.eye(m.shape[0], dtype=bool)]
    if np.any((off < 2) & (off != 0)):
        raise CoxeterError("off-diagonal entries must be >= 2 (or 0 for infinity)")


def cartan_matrix(m: np.ndarray) -> np.ndarray:
    """Integer Cartan matrix realizing the Coxeter matrix m.

    Only crystallographic orders 2, 3, 4, 6 (and 0 meaning infinity, realized by
    the affine A1 entries) are accepted.
    """
    validate_coxeter_matrix(m)
    n = m.shape[0]
    a = np.zeros((n, n), dtype=np.int64)
    np.fill_diagonal(a, 2)
    for i in range(n):
        for j in range(i + 1, n):
            order = int(m[i, j])
            if order == 2:
                continue
            if order == 3:
                a[i, j] = a[j, i] = -1
            elif order == 4:
                a[i, j], a[j, i] = -1, -2
            elif order == 6:
                a[i, j], a[j, i] = -1, -3
            elif order == 0:
                a[i, j] = a[j, i] = -2
            else:
                raise CoxeterError(f"non-crystallographic order m = {order} is not supported")
    return a


# ---------------------------------------------------------------------------
# The system


@dataclass(eq=False)
class CoxeterSystem:
    """A fully enumerated finite Coxeter system.

    ``left_mul[w, s]`` is s*w and ``right_mul[w, s]`` is w*s. ``first[w]`` is the
    first letter of the canonical reduced word of w (-1 for e) and ``rest[w]`` is
    ``left_mul[w, first[w]]``.
    """

    name: str
    coxeter_matrix: np.ndarray
    length: np.ndarray
    left_mul: np.ndarray
    right_mul: np.ndarray
    inverse: np.ndarray
    left_tau: np.ndarray
    right_tau: np.ndarray
    first: np.ndarray
    rest: np.ndarray
    layer_start: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def rank(self) -> int:
        return int(self.coxeter_matrix.shape[0])

    @property
    def size(self) -> int:
        return int(self.length.shape[0])

    def __len__(self) -> int:
        return self.size

    @property
    def all_generators(self) -> GeneratorSubset:
        return (1 << self.rank) - 1

    def m(self, s: int, t: int) -> int:
        return int(self.coxeter_matrix[s, t])

    @property
    def long_element(self) -> Element:
        return self.size - 1

    # words ---------------------------------------------------------------

    def word(self, w: Element) -> tuple[int, ...]:
        """Canonical (lex-minimal) reduced word, 0-based."""
        out = []
        while w:
            out.append(int(self.first[w]))
            w = int(self.rest[w])
        return tuple(out)

    def from_word(self, word: Iterable[int]) -> Element:
        """Multiply out a 0-based word (need not be reduced)."""
        w = 0
        for s in word:
            if not 0 <= s < self.rank:
                raise CoxeterError(f"generator index {s + 1} out of range 1..{self.rank}")
            w = int(self.right_mul[w, s])
        return w

    def format(self, w: Element) -> str:
        wd = self.word(w)
        return " ".join(str(s + 1) for s in wd) if wd else "e"

    def parse(self, text: str) -> Element:
        """Parse a 1-based word such as ``"1 2 1"``, ``"s1s2s1"`` or ``"e"``."""
        return self.from_word(parse_word(text))

    def mul(self, x: Element, y: Element) -> Element:
        """Group product x*y."""
        for s in self.word(y):
            x = int(self.right_mul[x, s])
        return x

    def format_subset(self, mask: GeneratorSubset) -> str:
        return "{" + ",".join(str(s + 1) for s in subset_members(mask)) + "}"


def parse_word(text: str) -> list[int]:
    """1-based word text to a 0-based list. Accepts ``e``, ``1 2 1``, ``1,2`` or ``s1s2``."""
    t = text.strip()
    if t in ("", "e", "1_W", "id"):
        return []
    t = t.replace(",", " ").replace("s", " ").replace("*", " ")
    parts = t.split()
    if not parts or not all(p.isdigit() for p in parts):
        raise CoxeterError(f"cannot parse word {text!r}")
    word = [int(p) - 1 for p in parts]
    if any(s < 0 for s in word):
        raise CoxeterError(f"generators are 1-based in {text!r}")
    return word


def subset_members(mask: GeneratorSubset) -> list[int]:
    out, i = [], 0
    while mask >> i:
        if (mask >> i) & 1:
            out.append(i)
        i += 1
    return out


def subset_mask(gens: Iterable[int]) -> GeneratorSubset:
    mask = 0
    for g in gens:
        mask |= 1 << g
    return mask


def build_system(descriptor: str | Path | np.ndarray, budget: int = ENUMERATION_BUDGET,
                 name: str | None = None) -> CoxeterSystem:
    """Enumerate a finite Coxeter group from a name, a matrix file or a matrix."""
    if isinstance(descriptor, np.ndarray):
        m = descriptor.astype(np.int64)
        label = name or "custom"
    else:
        text = str(descriptor)
        p = Path(text)
        if p.is_file():
            m = parse_matrix_file(p)
            label = name or p.stem
        else:
            m = named_coxeter_matrix(text)
            label = name or text.strip().upper()
    validate_coxeter_matrix(m)
    return _enumerate(label, m, budget)


def _enumerate(name: str, m: np.ndarray, budget: int) -> CoxeterSystem:
    a = cartan_matrix(m)
    r = a.shape[0]
    layers = [np.ones((1, r), dtype=np.int64)]
    parents_of: list[np.ndarray] = [np.zeros(1, dtype=np.int64)]
    firsts: list[np.ndarray] = [np.full(1, -1, dtype=np.int64)]
    up_edges = []  # per layer: (parent_global, gen, child_global)
    total, offset = 1, 0
    while True:
        cur = layers[-1]
        src, gen, vecs = [], [], []
        for i in range(r):
            ok = np.nonzero(cur[:, i] > 0)[0]
            if ok.size == 0:
                continue
            v = cur[ok] - cur[ok, i:i + 1] * a[i][None, :]
            src.append(ok)
            gen.append(np.full(ok.size, i, dtype=np.int64))
            vecs.append(v)
        if not vecs:
            break
        src_a = np.concatenate(src)
        gen_a = np.concatenate(gen)
        allv = np.concatenate(vecs)
        uniq, inv = np.unique(allv, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        k = uniq.shape[0]
        if total + k > budget:
            raise EnumerationLimitError(
                f"enumeration exceeded {budget} elements (group infinite or too large)")
        neg = uniq < 0
        min_desc = np.argmax(neg, axis=1)
        sel = gen_a == min_desc[inv]
        parent_for = np.empty(k, dtype=np.int64)
        parent_for[inv[sel]] = src_a[sel]
        order = np.lexsort((parent_for, min_desc))
        rank_of = np.empty(k, dtype=np.int64)
        rank_of[order] = np.arange(k)
        new_offset = offset + cur.shape[0]
        layers.append(uniq[order])
        firsts.append(min_desc[order])
        parents_of.append(parent_for[order] + offset)
        up_edges.append((src_a + offset, gen_a, rank_of[inv] + new_offset))
        offset = new_offset
        total += k

    n = total
    vec = np.concatenate(layers)
    layer_start = np.cumsum([0] + [x.shape[0] for x in layers])
    length = np.repeat(np.arange(len(layers)), [x.shape[0] for x in layers])
    left = np.full((n, r), -1, dtype=np.int64)
    for p, g, c in up_edges:
        left[p, g] = c
        left[c, g] = p
    assert (left >= 0).all()
    first = np.concatenate(firsts)
    rest = np.concatenate(parents_of)
    rest[0] = 0
    right = np.empty_like(left)
    inverse = np.empty(n, dtype=np.int64)
    right[0] = left[0]
    inverse[0] = 0
    for li in range(1, len(layers)):
        lo, hi = layer_start[li], layer_start[li + 1]
        t = first[lo:hi]
        u = rest[lo:hi]
        # w = t*u, so w*s = t*(u*s) and w^-1 = u^-1 * t
        right[lo:hi] = left[right[u], t[:, None]]
        inverse[lo:hi] = right[inverse[u], t]
    bits = (1 << np.arange(r, dtype=np.int64))
    left_tau = ((vec < 0).astype(np.int64) * bits).sum(axis=1)
    right_tau = left_tau[inverse]
    return CoxeterSystem(
        name=name, coxeter_matrix=m, length=length, left_mul=left, right_mul=right,
        inverse=inverse, left_tau=left_tau, right_tau=right_tau, first=first, rest=rest,
        layer_start=layer_start,
    )


# ---------------------------------------------------------------------------
# Operations


def mul_gen(sys: CoxeterSystem, side: str, w: Element, s: int) -> Element:
    """s*w (left) or w*s (right)."""
    _check_index(sys, w)
    if not 0 <= s < sys.rank:
        raise CoxeterError(f"generator {s} out of range")
    table = sys.left_mul if _check_side(side) == LEFT else sys.right_mul
    return int(table[w, s])


def descents(sys: CoxeterSystem, side: str, w: Element) -> GeneratorSubset:
    """tau_L(w) or tau_R(w) as a bitmask."""
    _check_index(sys, w)
    tau = sys.left_tau if _check_side(side) == LEFT else sys.right_tau
    return int(tau[w])


def _check_index(sys: CoxeterSystem, w: Element) -> None:
    if not 0 <= w < sys.size:
        raise CoxeterError(f"element index {w} out of range 0..{sys.size - 1}")


def bruhat_matrix(sys: CoxeterSystem) -> np.ndarray:
    """Dense matrix with ``B[w, y]`` true iff y <= w. Only for |W| <= 4096."""
    if "bruhat" not in sys._cache:
        if sys.size > DENSE_BRUHAT_LIMIT:
            raise EnumerationLimitError(
                f"dense Bruhat matrix limited to {DENSE_BRUHAT_LIMIT} elements")
        sys._cache["bruhat"] = lower_ideal_order(sys, np.arange(sys.size))
    return sys._cache["bruhat"]


def lower_ideal_order(sys: CoxeterSystem, universe: np.ndarray) -> np.ndarray:
    """Bruhat matrix restricted to a sorted lower ideal ``universe``.

    Row w holds the local indices y with y <= w, via
    y <= w  iff  y <= sw or sy <= sw, for s the first letter of w.
    """
    n = universe.shape[0]
    local = np.full(sys.size + 1, n, dtype=np.int64)
    local[universe] = np.arange(n)
    below = np.zeros((n + 1, n + 1), dtype=bool)
    below[0, 0] = True
    for k in range(1, n):
        w = universe[k]
        s = sys.first[w]
        v = local[sys.rest[w]]
        perm = local[sys.left_mul[universe, s]]
        row = below[v, :n] | below[v, perm]
        row[k] = True
        below[k, :n] = row
    return below[:n, :n]


def bruhat_leq(sys: CoxeterSystem, y: Element, w: Element) -> bool:
    """True iff y <= w in Bruhat order."""
    _check_index(sys, y)
    _check_index(sys, w)
    if sys.size <= DENSE_BRUHAT_LIMIT:
        return bool(bruhat_matrix(sys)[w, y])
    return _bruhat_rec(sys, y, w)


def _bruhat_rec(sys: CoxeterSystem, y: Element, w: Element) -> bool:
    memo = sys._cache.setdefault("bruhat_memo", {})
    return _bruhat_memo(sys, memo, y, w)


def _bruhat_memo(sys: CoxeterSystem, memo: dict, y: int, w: int) -> bool:
    ly, lw = sys.length[y], sys.length[w]
    if ly > lw:
        return False
    if y == 0 or y == w:
        return True
    if ly == lw:
        return False
    key = (y, w)
    hit = memo.get(key)
    if hit is not None:
        return hit
    s = sys.first[w]
    v = int(sys.rest[w])
    sy = int(sys.left_mul[y, s])
    res = _bruhat_memo(sys, memo, sy if sys.length[sy] < ly else y, v)
    memo[key] = res
    return res


def lower_ideal(sys: CoxeterSystem, tops: Iterable[Element]) -> np.ndarray:
    """Sorted array of all y with y <= some top."""
    seen: dict[int, np.ndarray] = {0: np.zeros(1, dtype=np.int64)}

    def ideal(w: int) -> np.ndarray:
        chain = []
        while w not in seen:
            chain.append(w)
            w = int(sys.rest[w])
        for x in reversed(chain):
            below = seen[int(sys.rest[x])]
            s = sys.first[x]
            seen[x] = np.union1d(below, sys.left_mul[below, s])
        return seen[chain[0] if chain else w]

    parts = [ideal(int(t)) for t in tops]
    if not parts:
        return np.zeros(1, dtype=np.int64)
    return functools.reduce(np.union1d, parts)


def parabolic_decompose(sys: CoxeterSystem, J: GeneratorSubset, w: Element,
                        side: str = LEFT) -> tuple[Element, Element]:
    """(w_J, w^J) with w = w_J * w^J (left) or (w_J, ^J w) with w = ^J w * w_J (right)."""
    _check_index(sys, w)
    side = _check_side(side)
    pj, up = parabolic_tables(sys, J, side)
    return int(pj[w]), int(up[w])


def parabolic_tables(sys: CoxeterSystem, J: GeneratorSubset, side: str = LEFT):
    """Arrays (p_J, coset part) over all of W for the given side."""
    side = _check_side(side)
    key = ("parabolic", J, side)
    if key not in sys._cache:
        if side == RIGHT:
            pj, up = parabolic_tables(sys, J, LEFT)
            inv = sys.inverse
            sys._cache[key] = (inv[pj[inv]], inv[up[inv]])
        else:
            n = sys.size
            pj = np.zeros(n, dtype=np.int64)
            up = np.zeros(n, dtype=np.int64)
            jmask = np.int64(J)
            for w in range(1, n):
                d = int(sys.left_tau[w] & jmask)
                if d == 0:
                    up[w] = w
                    continue
                s = (d & -d).bit_length() - 1
                v = int(sys.left_mul[w, s])
                # w = s * v, v = p_J(v) * v^J, so p_J(w) = s * p_J(v)
                pj[w] = sys.left_mul[pj[v], s]
                up[w] = up[v]
            sys._cache[key] = (pj, up)
    return sys._cache[key]


def min_coset_reps(sys: CoxeterSystem, J: GeneratorSubset, side: str = LEFT) -> list[Element]:
    """W^J: minimal representatives of the cosets W_J a (left) or a W_J (right)."""
    tau = sys.left_tau if _check_side(side) == LEFT else sys.right_tau
    return [int(w) for w in np.nonzero((tau & J) == 0)[0]]


def parabolic_elements(sys: CoxeterSystem, J: GeneratorSubset) -> list[Element]:
    """All elements of W_J."""
    pj, up = parabolic_tables(sys, J, LEFT)
    return [int(w) for w in np.nonzero(up == 0)[0]]


def long_element(sys: CoxeterSystem) -> Element:
    return sys.long_element


def word_element(sys: CoxeterSystem, word: Sequence[int]) -> Element:
    return sys.from_word(word)
