"""Finite graphs, oriented edges, edge paths and free reduction.

Path literals are whitespace separated edge names; ``~NAME`` is the
reversed edge.  The empty literal denotes the trivial path at a vertex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import EmptyPath, NotIncident, ParseError, UnknownEdge

REVERSAL_MARK = "~"


class OrientedEdge(NamedTuple):
    name: str
    inverted: bool
    origin: str
    terminus: str

    def __invert__(self) -> "OrientedEdge":
        return OrientedEdge(self.name, not self.inverted, self.terminus, self.origin)

    def __str__(self) -> str:
        return REVERSAL_MARK + self.name if self.inverted else self.name


Word = tuple  # tuple[OrientedEdge, ...]


@dataclass(frozen=True)
class MarkedGraph:
    """A finite graph given by named edges ``(name, origin, terminus)``."""

    edge_records: tuple[tuple[str, str, str], ...]
    extra_vertices: tuple[str, ...] = ()
    _by_name: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        by_name = {}
        for name, o, t in self.edge_records:
            if not name or name.startswith(REVERSAL_MARK) or any(c.isspace() for c in name):
                raise ParseError(f"invalid edge name {name!r}")
            if name in by_name:
                raise ParseError(f"duplicate edge {name!r}")
            by_name[name] = OrientedEdge(name, False, o, t)
        object.__setattr__(self, "_by_name", by_name)

    @classmethod
    def rose(cls, names: Iterable[str], vertex: str = "v") -> "MarkedGraph":
        return cls(tuple((n, vertex, vertex) for n in names))

    @property
    def vertices(self) -> tuple[str, ...]:
        seen = {}
        for _, o, t in self.edge_records:
            seen.setdefault(o, None)
            seen.setdefault(t, None)
        for v in self.extra_vertices:
            seen.setdefault(v, None)
        return tuple(seen)

    @property
    def basepoint(self) -> str:
        return self.vertices[0]

    @property
    def edge_names(self) -> tuple[str, ...]:
        return tuple(r[0] for r in self.edge_records)

    def edge(self, name: str) -> OrientedEdge:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownEdge(f"unknown edge {name!r}") from None

    def oriented_edges(self) -> list[OrientedEdge]:
        out = []
        for name in self.edge_names:
            e = self._by_name[name]
            out += [e, ~e]
        return out

    def token(self, tok: str) -> OrientedEdge:
        if tok.startswith(REVERSAL_MARK):
            return ~self.edge(tok[len(REVERSAL_MARK):])
        return self.edge(tok)

    def __contains__(self, e: OrientedEdge) -> bool:
        base = self._by_name.get(e.name)
        return base is not None and (e == base or e == ~base)


@dataclass(frozen=True)
class EdgePath:
    """A sequence of incident oriented edges; not necessarily tight.

    ``base`` is the basepoint and only matters for the empty path; for a
    nonempty path it always equals the origin of the first edge.
    """

    edges: tuple
    base: str

    def __post_init__(self):
        if self.edges and self.base != self.edges[0].origin:
            object.__setattr__(self, "base", self.edges[0].origin)

    @classmethod
    def of(cls, edges: Sequence[OrientedEdge], base: str | None = None) -> "EdgePath":
        """Build a path, validating incidence."""
        edges = tuple(edges)
        for a, b in zip(edges, edges[1:]):
            if a.terminus != b.origin:
                raise NotIncident(f"{a} ends at {a.terminus} but {b} starts at {b.origin}")
        if not edges and base is None:
            raise EmptyPath("the empty path needs a basepoint")
        return cls(edges, base if not edges else edges[0].origin)

    @classmethod
    def empty(cls, vertex: str) -> "EdgePath":
        return cls((), vertex)

    @property
    def start(self) -> str:
        return self.base

    @property
    def end(self) -> str:
        return self.edges[-1].terminus if self.edges else self.base

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[OrientedEdge]:
        return iter(self.edges)

    def __bool__(self) -> bool:
        return bool(self.edges)

    def vertex_at(self, i: int) -> str:
        """The vertex between ``edges[i-1]`` and ``edges[i]``."""
        if i < len(self.edges):
            return self.edges[i].origin
        return self.end

    def __getitem__(self, item):
        if isinstance(item, slice):
            lo, hi, step = item.indices(len(self.edges))
            if step != 1:
                raise ValueError("edge paths only support contiguous slices")
            hi = max(hi, lo)
            return EdgePath(self.edges[lo:hi], self.vertex_at(lo))
        return self.edges[item]

    def reverse(self) -> "EdgePath":
        return EdgePath(tuple(~e for e in reversed(self.edges)), self.end)

    def __add__(self, other: "EdgePath") -> "EdgePath":
        return concat(self, other)

    def is_tight(self) -> bool:
        es = self.edges
        return all(es[i + 1] != ~es[i] for i in range(len(es) - 1))

    def is_closed(self) -> bool:
        return self.start == self.end

    def literal(self) -> str:
        return " ".join(str(e) for e in self.edges)

    def __str__(self) -> str:
        return self.literal() if self.edges else f"<{self.base}>"

    def __repr__(self) -> str:
        return f"EdgePath({self.literal()!r}, base={self.base!r})" if not self.edges else f"EdgePath({self.literal()!r})"


def parse_path(text: str, graph: MarkedGraph, at: str | None = None) -> EdgePath:
    """Parse a path literal; no tightening is performed."""
    edges = [graph.token(tok) for tok in text.split()]
    base = at if at is not None else graph.basepoint
    if at is not None and at not in graph.vertices:
        raise ParseError(f"unknown vertex {at!r}")
    return EdgePath.of(edges, base)


def reduce_word(word: Iterable[OrientedEdge]) -> tuple:
    """Free reduction by a single left-to-right pushdown pass."""
    stack: list = []
    push, pop = stack.append, stack.pop
    for e in word:
        if stack and stack[-1] == ~e:
            pop()
        else:
            push(e)
    return tuple(stack)


def tighten(path: EdgePath) -> EdgePath:
    """The unique tight path homotopic rel endpoints to ``path``."""
    return EdgePath(reduce_word(path.edges), path.start)


def concat(a: EdgePath, b: EdgePath) -> EdgePath:
    if a.end != b.start:
        raise NotIncident(f"cannot concatenate: {a} ends at {a.end}, {b} starts at {b.start}")
    return EdgePath(a.edges + b.edges, a.start)


def sub_edge_paths(path: EdgePath, max_len: int | None = None) -> Iterator[EdgePath]:
    """All contiguous nonempty sub edge-paths, by start index then length."""
    n = len(path)
    cap = n if max_len is None else min(n, max_len)
    for i in range(n):
        for j in range(i + 1, min(n, i + cap) + 1):
            yield path[i:j]


def is_freely_trivial(word: Sequence[OrientedEdge]) -> bool:
    return not reduce_word(word)


def primitive_root(path: EdgePath) -> tuple[EdgePath, int]:
    """Write a tight closed path as ``[root ** n]`` with ``root`` not a proper power."""
    w = path.edges
    if not w:
        raise EmptyPath("the trivial path has no root")
    if not path.is_closed():
        return path, 1
    c = 0
    while c < len(w) - 1 - c and w[c] == ~w[-1 - c]:
        c += 1
    core = w[c:len(w) - c]
    n = len(core)
    for d in range(1, n + 1):
        if n % d == 0 and core == core[:d] * (n // d):
            root = w[:c] + core[:d] + tuple(~e for e in reversed(w[:c]))
            return EdgePath(root, path.start), n // d
    raise AssertionError("unreachable")


def power(path: EdgePath, n: int) -> EdgePath:
    """The tight representative of ``path ** n`` for a closed path (n may be negative)."""
    if n < 0:
        return power(path.reverse(), -n)
    if not path.is_closed() and n != 1:
        raise NotIncident("only closed paths have powers")
    return EdgePath(reduce_word(path.edges * n), path.start)


def freely_trivial_flags(word: Sequence) -> list[bool]:
    """``flags[i]`` is True iff ``word[:i]`` reduces to the empty word (i = 0..len)."""
    stack: list = []
    out = [True]
    for e in word:
        if stack and stack[-1] == ~e:
            stack.pop()
        else:
            stack.append(e)
        out.append(not stack)
    return out


def path_key(path: EdgePath) -> tuple:
    """Sort key: lexicographic on (name, reversed) with forward before reversed."""
    return tuple((e.name, e.inverted) for e in path.edges)


def canonical_orientation(path: EdgePath) -> EdgePath:
    """The smaller of ``path`` and its reverse under ``path_key``."""
    rev = path.reverse()
    return path if path_key(path) <= path_key(rev) else rev
