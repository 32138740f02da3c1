"""Generalized tau-invariant by synchronous partition refinement."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .coxeter import LEFT, RIGHT, CoxeterSystem, Element
from .maps import TransportMap


@dataclass
class GenTauPartition:
    side: str
    class_of: list[int]
    order_reached: int
    history: list[list[int]] = field(default_factory=list)

    @property
    def num_classes(self) -> int:
        return max(self.class_of) + 1 if self.class_of else 0

    def counts(self) -> list[int]:
        return [max(h) + 1 for h in self.history]

    def classes(self) -> list[list[Element]]:
        out: dict[int, list[Element]] = {}
        for w, c in enumerate(self.class_of):
            out.setdefault(c, []).append(w)
        return [out[k] for k in sorted(out)]

    def equal_at(self, order: int, x: Element, y: Element) -> bool:
        """x and y equivalent to the given order."""
        h = self.history[min(order, len(self.history) - 1)]
        return h[x] == h[y]


def _canonical(keys: Sequence) -> list[int]:
    """Class ids numbered by first occurrence in element order."""
    ids: dict = {}
    return [ids.setdefault(k, len(ids)) for k in keys]


def gentau_refine(sys: CoxeterSystem, family: Sequence[TransportMap], side: str = LEFT,
                  max_order: int | None = None) -> GenTauPartition:
    """The side-generalized tau-invariant with respect to ``family``.

    Order 0 classes are tau_side fibers. At order n, w carries the signature
    (class at n-1, per map: in-domain bit and the set of classes of its image).
    """
    side = side.upper()[:1]
    tau = sys.left_tau if side == LEFT else sys.right_tau
    tables = [T.images() for T in family]
    cls = _canonical([int(t) for t in tau])
    history = [cls]
    limit = sys.size if max_order is None else max_order
    order = 0
    while order < limit:
        sig = []
        for w in range(sys.size):
            parts = [cls[w]]
            for tab in tables:
                img = tab.get(w)
                parts.append(None if img is None else frozenset(cls[x] for x in img))
            sig.append(tuple(parts))
        new = _canonical(sig)
        order += 1
        if max(new) == max(cls):
            # no class split, so the partition is stable from here on
            history.append(new)
            return GenTauPartition(side=side, class_of=new, order_reached=order - 1, history=history)
        history.append(new)
        cls = new
    return GenTauPartition(side=side, class_of=cls, order_reached=order, history=history)


def gentau_equal(p: GenTauPartition, x: Element, y: Element) -> bool:
    return p.class_of[x] == p.class_of[y]


def gentau_json(sys: CoxeterSystem, p: GenTauPartition, family: Sequence[TransportMap]) -> dict:
    return {
        "group": sys.name,
        "side": "left" if p.side == LEFT else "right",
        "maps": [repr(T) for T in family],
        "order_reached": p.order_reached,
        "class_counts": p.counts(),
        "elements": [{"word": sys.format(w), "class": c} for w, c in enumerate(p.class_of)],
    }
