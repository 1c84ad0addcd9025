"""Turns, the derivative map and legality."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from ..core import EdgePath, OrientedEdge


def _key(e: OrientedEdge):
    return (e.name, e.inverted)


@dataclass(frozen=True)
class Turn:
    """An unordered pair of oriented edges with a common initial vertex."""

    a: OrientedEdge
    b: OrientedEdge

    @classmethod
    def of(cls, a: OrientedEdge, b: OrientedEdge) -> "Turn":
        if a.origin != b.origin:
            raise ValueError(f"{a} and {b} do not share an initial vertex")
        return cls(a, b) if _key(a) <= _key(b) else cls(b, a)

    @property
    def degenerate(self) -> bool:
        return self.a == self.b

    def __str__(self) -> str:
        return "{" + f"{self.a}, {self.b}" + "}"


def derivative(fmap, e: OrientedEdge) -> OrientedEdge:
    """``Df``: the first oriented edge of ``f(e)``."""
    return fmap.image[e][0]


def turn_map(fmap, t: Turn) -> Turn:
    return Turn.of(derivative(fmap, t.a), derivative(fmap, t.b))


def turn_orbit(fmap, t: Turn) -> list[Turn]:
    """Iterate ``Tf`` until a turn repeats; the repeated turn is included last."""
    seen = set()
    orbit = []
    while t not in seen:
        seen.add(t)
        orbit.append(t)
        t = turn_map(fmap, t)
    orbit.append(t)
    return orbit


def is_legal_turn(fmap, t: Turn) -> tuple[bool, list[Turn]]:
    orbit = turn_orbit(fmap, t)
    return (not any(s.degenerate for s in orbit)), orbit


def turns_taken(path: EdgePath) -> Iterator[tuple[int, Turn]]:
    """The turn ``{~e_i, e_{i+1}}`` at each interior vertex, keyed by position ``i + 1``."""
    es = path.edges
    for i in range(len(es) - 1):
        yield i + 1, Turn.of(~es[i], es[i + 1])


def illegal_turns_in(fmap, path: EdgePath, r: int) -> list[tuple[int, Turn]]:
    """Positions where ``path`` takes an illegal turn with both half-edges in ``H_r``."""
    filt = fmap.filtration
    out = []
    for pos, t in turns_taken(path):
        if filt.of_edge(t.a) == r and filt.of_edge(t.b) == r and t in fmap.illegal_turns:
            out.append((pos, t))
    return out


def is_r_legal(fmap, path: EdgePath, r: int) -> bool:
    return not illegal_turns_in(fmap, path, r)


def all_turns(fmap) -> list[Turn]:
    out = set()
    oriented = fmap.letters
    for a in oriented:
        for b in oriented:
            if a.origin == b.origin:
                out.add(Turn.of(a, b))
    return sorted(out, key=lambda t: (_key(t.a), _key(t.b)))
