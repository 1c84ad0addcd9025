"""Topological representatives: edge images, iteration and the ``.ttm`` format.

Internally every oriented edge also has an integer code ``2 * index + inverted``
so that reversal is ``code ^ 1``.  Raw (untightened) iterated images are kept
as code tuples and cached per map.
"""
from __future__ import annotations

import re
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from ..config import DEFAULT_CAPS, Caps
from ..core import EdgePath, MarkedGraph, OrientedEdge, parse_path
from ..errors import CapExceeded, InvalidMap, NotIncident, ParseError


class GraphMap:
    """A map of a finite graph sending vertices to vertices and edges to tight edge paths.

    ``images`` maps each declared edge name to its image path.  Images must
    be nonempty, tight, and compatible with a single vertex map.
    """

    def __init__(self, graph: MarkedGraph, images: dict, *, name: str = "map",
                 caps: Caps = DEFAULT_CAPS, declared_order: Sequence[str] | None = None,
                 declared_fixed: Sequence[str] = (), iterate_of: tuple | None = None,
                 k1_certified: bool = False):
        self.graph = graph
        self.name = name
        self.caps = caps
        self.declared_order = tuple(declared_order) if declared_order else None
        self.declared_fixed = tuple(declared_fixed)
        # (base map name, exponent) when built by iterate_map
        self.iterate_of = iterate_of
        self.k1_certified = k1_certified

        self.edges: tuple[OrientedEdge, ...] = tuple(graph.edge(n) for n in graph.edge_names)
        self.letters: list[OrientedEdge] = []
        for e in self.edges:
            self.letters += [e, ~e]
        self.code_of = {e: i for i, e in enumerate(self.letters)}

        missing = [n for n in graph.edge_names if n not in images]
        if missing:
            raise InvalidMap(f"no image given for edge(s) {', '.join(missing)}")
        extra = [n for n in images if n not in graph.edge_names]
        if extra:
            raise InvalidMap(f"image given for undeclared edge(s) {', '.join(extra)}")

        vmap: dict[str, str] = {}
        self.image: dict[OrientedEdge, EdgePath] = {}
        for e in self.edges:
            img = images[e.name]
            if not isinstance(img, EdgePath):
                img = EdgePath.of(img)
            if not img:
                raise InvalidMap(f"image of {e} is empty; collapsing maps are not supported")
            if not img.is_tight():
                raise InvalidMap(f"image of {e} is not tight: {img.literal()}")
            for v, w in ((e.origin, img.start), (e.terminus, img.end)):
                if vmap.setdefault(v, w) != w:
                    raise InvalidMap(f"vertex {v} would map to both {vmap[v]} and {w} (edge {e})")
            self.image[e] = img
            self.image[~e] = img.reverse()
        for v in graph.vertices:
            if v not in vmap:
                vmap[v] = v
        self.vertex_map = vmap

        self.img_codes: list[tuple[int, ...]] = [
            tuple(self.code_of[x] for x in self.image[e]) for e in self.letters
        ]
        self._raw_cache: dict[tuple[int, int], tuple[int, ...]] = {}
        self._len_cache: dict[int, list[int]] = {0: [1] * len(self.letters)}

    # -- basic data ---------------------------------------------------------

    @property
    def L(self) -> int:
        """Maximum image length over edges."""
        return max(len(self.image[e]) for e in self.edges)

    def codes(self, path: EdgePath | Iterable[OrientedEdge]) -> tuple[int, ...]:
        return tuple(self.code_of[e] for e in path)

    def decode(self, codes: Iterable[int], base: str) -> EdgePath:
        letters = self.letters
        return EdgePath(tuple(letters[c] for c in codes), base)

    def parse(self, text: str, at: str | None = None) -> EdgePath:
        return parse_path(text, self.graph, at)

    def f_vertex(self, v: str, k: int = 1) -> str:
        for _ in range(k):
            v = self.vertex_map[v]
        return v

    def __repr__(self) -> str:
        return f"GraphMap({self.name!r}, {len(self.edges)} edges)"

    def describe(self) -> str:
        lines = [f"# {self.name}"]
        for e in self.edges:
            lines.append(f"{e.name} -> {self.image[e].literal()}")
        return "\n".join(lines)

    # -- raw iterated images --------------------------------------------------

    def raw_lengths(self, k: int) -> list[int]:
        """``|f^k(e)|`` (untightened) for every letter code."""
        if k not in self._len_cache:
            prev = self.raw_lengths(k - 1)
            self._len_cache[k] = [sum(prev[x] for x in img) for img in self.img_codes]
        return self._len_cache[k]

    def raw_power_codes(self, c: int, k: int) -> tuple[int, ...]:
        """The untightened word ``f^k(e)`` for the letter with code ``c``."""
        if k == 0:
            return (c,)
        if k == 1:
            return self.img_codes[c]
        key = (c, k)
        hit = self._raw_cache.get(key)
        if hit is not None:
            return hit
        if self.raw_lengths(k)[c] > self.caps.word_cap:
            raise CapExceeded(
                f"raw image f^{k}({self.letters[c]}) has {self.raw_lengths(k)[c]} letters, "
                f"over the cap {self.caps.word_cap}")
        if c & 1:
            out = tuple(x ^ 1 for x in reversed(self.raw_power_codes(c ^ 1, k)))
        else:
            out = tuple(y for x in self.img_codes[c] for y in self.raw_power_codes(x, k - 1))
        self._raw_cache[key] = out
        return out

    def raw_word_codes(self, word: Sequence[int], k: int) -> list[int]:
        lens = self.raw_lengths(k)
        total = sum(lens[c] for c in word)
        if total > self.caps.word_cap:
            raise CapExceeded(f"raw image f^{k} has {total} letters, over the cap {self.caps.word_cap}")
        out: list[int] = []
        for c in word:
            out.extend(self.raw_power_codes(c, k))
        return out

    # -- path images ------------------------------------------------------------

    def image_raw(self, path: EdgePath) -> EdgePath:
        """Concatenation of edge images, untightened."""
        edges: list[OrientedEdge] = []
        for e in path:
            edges.extend(self.image[e].edges)
        return EdgePath(tuple(edges), self.vertex_map[path.start])

    def raw_power(self, path: EdgePath, k: int) -> EdgePath:
        """``f^k(path)`` without any tightening."""
        word = self.raw_word_codes(self.codes(path), k)
        return self.decode(word, self.f_vertex(path.start, k))

    def sharp_codes(self, word: Sequence[int], k: int = 1) -> list[int]:
        """Tightened ``k``-th image of a code word, tightening after every step."""
        imgs = self.img_codes
        cap = self.caps.word_cap
        for _ in range(k):
            if sum(len(imgs[c]) for c in word) > cap:
                raise CapExceeded(f"image of a {len(word)}-edge path exceeds the cap {cap}")
            stack: list[int] = []
            push, pop = stack.append, stack.pop
            for c in word:
                for x in imgs[c]:
                    if stack and stack[-1] == x ^ 1:
                        pop()
                    else:
                        push(x)
            word = stack
        return list(word)

    def f_sharp(self, path: EdgePath, k: int = 1) -> EdgePath:
        """``[f^k(path)]``, tightening after every application."""
        if k == 0:
            return path
        word = self.sharp_codes(self.codes(path), k)
        return self.decode(word, self.f_vertex(path.start, k))

    def with_caps(self, caps: Caps) -> "GraphMap":
        return GraphMap(self.graph, {e.name: self.image[e] for e in self.edges}, name=self.name,
                        caps=caps, declared_order=self.declared_order,
                        declared_fixed=self.declared_fixed, iterate_of=self.iterate_of,
                        k1_certified=self.k1_certified)

    # -- derived tables (lazy, immutable once computed) ------------------------

    @cached_property
    def filtration(self):
        from .filtration import compute_filtration
        return compute_filtration(self)

    @cached_property
    def illegal_turns(self) -> frozenset:
        from .turns import all_turns, is_legal_turn
        return frozenset(t for t in all_turns(self) if not is_legal_turn(self, t)[0])

    @cached_property
    def letter_closure(self) -> dict[int, frozenset]:
        """Letters occurring in some iterated raw image ``f^k(e)``, k >= 0, per letter."""
        reach = {c: {c} for c in range(len(self.letters))}
        changed = True
        while changed:
            changed = False
            for c, seen in reach.items():
                grown = seen.union(*(self.img_codes[x] for x in seen))
                if len(grown) != len(seen):
                    reach[c] = grown
                    changed = True
        return {c: frozenset(s) for c, s in reach.items()}

    def closure_of(self, codes: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for c in codes:
            out |= self.letter_closure[c]
        return out


def iterate_map(fmap: GraphMap, k: int, *, k1_certified: bool = False) -> GraphMap:
    """The map sending each edge to ``f_#^k(E)``."""
    if k < 1:
        raise ValueError("iterate exponent must be at least 1")
    images = {}
    for e in fmap.edges:
        img = fmap.f_sharp(EdgePath((e,), e.origin), k)
        if len(img) > fmap.caps.word_cap:
            raise CapExceeded(f"f_#^{k}({e}) exceeds the cap")
        images[e.name] = img
    base_name, base_k = fmap.iterate_of or (fmap.name, 1)
    return GraphMap(fmap.graph, images, name=base_name if base_k * k == 1 else f"{base_name}^{base_k * k}", caps=fmap.caps,
                    declared_order=fmap.declared_order, iterate_of=(base_name, base_k * k),
                    k1_certified=k1_certified)


_EDGE = re.compile(r"^edge\s+(\S+)\s+(\S+)\s+(\S+)$")
_MAP = re.compile(r"^map\s+(\S+)\s*=\s*(.*)$")


def parse_ttm(text: str, name: str = "map", caps: Caps = DEFAULT_CAPS) -> GraphMap:
    """Parse the line-oriented ``.ttm`` format."""
    records: list[tuple[str, str, str]] = []
    raw_images: dict[str, tuple[int, str]] = {}
    order: list[str] | None = None
    fixed: list[str] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0]
        if head == "edge":
            m = _EDGE.match(line)
            if not m:
                raise ParseError(f"line {lineno}: expected 'edge NAME V_FROM V_TO'")
            records.append(m.groups())
        elif head == "map":
            m = _MAP.match(line)
            if not m:
                raise ParseError(f"line {lineno}: expected 'map NAME = TOKENS'")
            if m.group(1) in raw_images:
                raise ParseError(f"line {lineno}: duplicate image for {m.group(1)}")
            raw_images[m.group(1)] = (lineno, m.group(2))
        elif head == "order":
            if order is not None:
                raise ParseError(f"line {lineno}: duplicate order directive")
            order = line.split()[1:]
        elif head == "fix":
            fixed += line.split()[1:]
        else:
            raise ParseError(f"line {lineno}: unknown directive {head!r}")
    if not records:
        raise ParseError("no edges declared")
    graph = MarkedGraph(tuple(records))
    images = {}
    for edge_name, (lineno, literal) in raw_images.items():
        if edge_name not in graph.edge_names:
            raise ParseError(f"line {lineno}: image for undeclared edge {edge_name!r}")
        try:
            path = parse_path(literal, graph)
        except NotIncident as exc:
            raise InvalidMap(f"line {lineno}: {exc}") from None
        if not path:
            raise InvalidMap(f"line {lineno}: image of {edge_name} is empty")
        images[edge_name] = path
    fmap = GraphMap(graph, images, name=name, caps=caps, declared_order=order, declared_fixed=fixed)
    for v in fixed:
        if v not in graph.vertices:
            raise ParseError(f"fix: unknown vertex {v!r}")
    if order is not None:
        # a declared order is checked at load, not on first use
        fmap.filtration
    return fmap


def load_ttm(path: str | Path, caps: Caps = DEFAULT_CAPS) -> GraphMap:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {p}: {exc}") from None
    return parse_ttm(text, name=p.stem, caps=caps)


def bundled_path(name: str) -> Path:
    """Location of a map shipped in ``beadtrack/data``."""
    base = Path(__file__).resolve().parent.parent / "data"
    p = base / (name if name.endswith(".ttm") else name + ".ttm")
    if not p.exists():
        raise ParseError(f"no bundled map named {name!r}")
    return p


def load_bundled(name: str, caps: Caps = DEFAULT_CAPS) -> GraphMap:
    return load_ttm(bundled_path(name), caps)


def bundled_names() -> list[str]:
    base = Path(__file__).resolve().parent.parent / "data"
    return sorted(p.stem for p in base.glob("*.ttm"))
