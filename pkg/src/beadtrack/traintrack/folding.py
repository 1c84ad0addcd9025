"""Stallings folding of the image of a subgraph.

Used to decide whether ``f`` restricted to a subgraph is injective on
fundamental groups (equal first Betti numbers, by Hopficity) and whether
distinct vertices become identified after tightening.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


@dataclass(frozen=True)
class FoldResult:
    vertices: int
    edges: int
    components: int
    # original vertex -> representative in the folded graph
    vertex_class: dict

    @property
    def betti(self) -> int:
        return self.edges - self.vertices + self.components


def fold(edge_chains: Iterable[tuple[str, tuple[int, ...], str]]) -> FoldResult:
    """Fold a graph whose edges are labelled words ``(origin, codes, terminus)``.

    Each word is subdivided into single-letter edges first.  Letters are
    integer codes with reversal ``code ^ 1``.
    """
    uf = _UnionFind()
    edges: list[tuple[object, int, object]] = []
    originals = set()
    fresh = 0
    for u, word, v in edge_chains:
        originals.update((u, v))
        uf.add(("v", u))
        uf.add(("v", v))
        prev = ("v", u)
        for i, c in enumerate(word):
            if i == len(word) - 1:
                nxt = ("v", v)
            else:
                fresh += 1
                nxt = ("s", fresh)
                uf.add(nxt)
            edges.append((prev, c, nxt))
            prev = nxt
    while True:
        seen: dict = {}
        merged = False
        kept = []
        dead = set()
        for idx, (s, c, t) in enumerate(edges):
            s, t = uf.find(s), uf.find(t)
            for key, other in (((s, c), t), ((t, c ^ 1), s)):
                hit = seen.get(key)
                if hit is None:
                    seen[key] = (idx, other)
                elif hit[0] != idx:
                    if uf.union(hit[1], other):
                        merged = True
                    dead.add(idx)
                    break
        for idx, e in enumerate(edges):
            if idx not in dead:
                kept.append(e)
        if not dead and not merged:
            break
        edges = kept
    roots = {uf.find(x) for x in uf.parent}
    comp = _UnionFind()
    for r in roots:
        comp.add(r)
    for s, _, t in edges:
        comp.union(uf.find(s), uf.find(t))
    ncomp = len({comp.find(r) for r in roots})
    return FoldResult(len(roots), len(edges), ncomp, {v: uf.find(("v", v)) for v in originals})
