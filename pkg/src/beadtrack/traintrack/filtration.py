"""Invariant filtrations, transition matrices and strata classification."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import networkx as nx

from ..core import EdgePath, OrientedEdge
from ..errors import EmptyPath, InvalidMap


class StratumKind(str, enum.Enum):
    ZERO = "Zero"
    PARABOLIC = "Parabolic"
    EXPONENTIAL = "Exponential"


@dataclass(frozen=True)
class Stratum:
    """One stratum ``H_r``; ``index`` is 1-based."""

    index: int
    edges: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]
    kind: StratumKind
    lambda_lo: Fraction
    lambda_hi: Fraction
    aperiodic: bool
    # parabolic strata only: f(E) = E . suffix when the image starts with E
    suffix: EdgePath | None = None

    @property
    def edge(self) -> str:
        if len(self.edges) != 1:
            raise ValueError(f"stratum {self.index} has {len(self.edges)} edges")
        return self.edges[0]

    def to_json(self) -> dict:
        out = {
            "index": self.index,
            "edges": list(self.edges),
            "kind": self.kind.value,
            "matrix": [list(row) for row in self.matrix],
            "lambda_lo": str(self.lambda_lo),
            "lambda_hi": str(self.lambda_hi),
            "aperiodic": self.aperiodic,
        }
        if self.kind is StratumKind.PARABOLIC:
            out["suffix"] = None if self.suffix is None else self.suffix.literal()
        return out


@dataclass(frozen=True)
class Filtration:
    strata: tuple[Stratum, ...]
    stratum_of: dict = field(compare=False)

    @property
    def omega(self) -> int:
        return len(self.strata)

    def __getitem__(self, r: int) -> Stratum:
        if not 1 <= r <= len(self.strata):
            raise IndexError(f"no stratum {r}")
        return self.strata[r - 1]

    def of_edge(self, e: OrientedEdge | str) -> int:
        return self.stratum_of[e if isinstance(e, str) else e.name]

    def weight(self, path: EdgePath) -> int:
        if not path:
            raise EmptyPath("the trivial path has no weight")
        return max(self.stratum_of[e.name] for e in path)

    def edges_below(self, r: int) -> frozenset:
        """Edge names of ``G_r``."""
        return frozenset(n for n, s in self.stratum_of.items() if s <= r)

    def exponential(self) -> list[Stratum]:
        return [s for s in self.strata if s.kind is StratumKind.EXPONENTIAL]

    def parabolic(self) -> list[Stratum]:
        return [s for s in self.strata if s.kind is StratumKind.PARABOLIC]


def weight(filtration: Filtration, path: EdgePath) -> int:
    return filtration.weight(path)


def crossing_counts(fmap, name: str) -> dict[str, int]:
    counts: dict[str, int] = {}
    for x in fmap.image[fmap.graph.edge(name)]:
        counts[x.name] = counts.get(x.name, 0) + 1
    return counts


def _is_permutation(matrix: Sequence[Sequence[int]]) -> bool:
    n = len(matrix)
    return all(sorted(row) == [0] * (n - 1) + [1] for row in matrix) and all(
        sum(matrix[i][j] for i in range(n)) == 1 for j in range(n))


def pf_bounds(matrix: Sequence[Sequence[int]], rounds: int = 24) -> tuple[Fraction, Fraction]:
    """Exact Collatz-Wielandt bounds on the spectral radius of an irreducible matrix.

    For a positive vector x, min (Mx)_i / x_i <= lambda <= max (Mx)_i / x_i.
    We use x = (I + M)^k 1, which is positive for k >= n - 1 and converges
    to the Perron vector direction.
    """
    n = len(matrix)
    if all(v == 0 for row in matrix for v in row):
        return Fraction(0), Fraction(0)
    x = [1] * n
    best_lo, best_hi = Fraction(0), None
    for step in range(max(rounds, n)):
        mx = [sum(matrix[i][j] * x[j] for j in range(n)) for i in range(n)]
        if step >= n - 1 and all(v > 0 for v in x):
            ratios = [Fraction(mx[i], x[i]) for i in range(n)]
            lo, hi = min(ratios), max(ratios)
            best_lo = max(best_lo, lo)
            best_hi = hi if best_hi is None else min(best_hi, hi)
            if best_lo == best_hi:
                break
        x = [x[i] + mx[i] for i in range(n)]
        g = 0
        for v in x:
            g = gcd(g, v)
        if g > 1:
            x = [v // g for v in x]
    if best_hi is None:
        best_hi = Fraction(max(sum(row) for row in matrix))
    return best_lo, best_hi


def period(matrix: Sequence[Sequence[int]]) -> int:
    """Period of an irreducible nonnegative matrix; 1 means aperiodic."""
    n = len(matrix)
    level = {0: 0}
    queue = [0]
    g = 0
    for u in queue:
        for v in range(n):
            if matrix[v][u]:
                if v not in level:
                    level[v] = level[u] + 1
                    queue.append(v)
                else:
                    g = gcd(g, level[u] + 1 - level[v])
    return abs(g)


def _crossing_digraph(fmap) -> nx.DiGraph:
    dg = nx.DiGraph()
    names = fmap.graph.edge_names
    dg.add_nodes_from(names)
    for n in names:
        for m in crossing_counts(fmap, n):
            # m must sit in a stratum at or below that of n
            dg.add_edge(m, n)
    return dg


def compute_filtration(fmap) -> Filtration:
    """Strata are the strongly connected components of the crossing digraph."""
    names = fmap.graph.edge_names
    rank = {n: i for i, n in enumerate(names)}
    if fmap.declared_order is not None:
        _check_declared_order(fmap)
        rank = {n: i for i, n in enumerate(fmap.declared_order)}
    dg = _crossing_digraph(fmap)
    cond = nx.condensation(dg)
    members = cond.graph["mapping"]
    comps: dict[int, list[str]] = {}
    for n in names:
        comps.setdefault(members[n], []).append(n)
    order = list(nx.lexicographical_topological_sort(cond, key=lambda c: min(rank[n] for n in comps[c])))

    strata = []
    stratum_of = {}
    for idx, c in enumerate(order, 1):
        edges = tuple(sorted(comps[c], key=rank.__getitem__))
        for n in edges:
            stratum_of[n] = idx
        strata.append(_make_stratum(fmap, idx, edges))
    filt = Filtration(tuple(strata), stratum_of)
    for n in names:
        for m in crossing_counts(fmap, n):
            if stratum_of[m] > stratum_of[n]:
                raise AssertionError("filtration is not invariant")
    return filt


def _make_stratum(fmap, idx: int, edges: tuple[str, ...]) -> Stratum:
    pos = {n: i for i, n in enumerate(edges)}
    size = len(edges)
    mat = [[0] * size for _ in range(size)]
    for j, n in enumerate(edges):
        for m, cnt in crossing_counts(fmap, n).items():
            if m in pos:
                mat[pos[m]][j] += cnt
    matrix = tuple(tuple(row) for row in mat)
    if all(v == 0 for row in mat for v in row):
        return Stratum(idx, edges, matrix, StratumKind.ZERO, Fraction(0), Fraction(0), False)
    lo, hi = pf_bounds(mat)
    aperiodic = period(mat) == 1
    if _is_permutation(mat):
        suffix = None
        if size == 1:
            e = fmap.graph.edge(edges[0])
            img = fmap.image[e]
            if img[0] == e:
                suffix = img[1:]
        return Stratum(idx, edges, matrix, StratumKind.PARABOLIC, Fraction(1), Fraction(1),
                       aperiodic, suffix)
    return Stratum(idx, edges, matrix, StratumKind.EXPONENTIAL, lo, hi, aperiodic)


def _check_declared_order(fmap) -> None:
    order = fmap.declared_order
    names = fmap.graph.edge_names
    if sorted(order) != sorted(names) or len(set(order)) != len(order):
        raise InvalidMap("order directive must list every edge exactly once")
    dg = _crossing_digraph(fmap)
    comp = {}
    for i, scc in enumerate(nx.strongly_connected_components(dg)):
        for n in scc:
            comp[n] = i
    pos = {n: i for i, n in enumerate(order)}
    for n in names:
        for m in crossing_counts(fmap, n):
            if pos[m] > pos[n] and comp[m] != comp[n]:
                raise InvalidMap(f"order directive is not invariant: f({n}) crosses {m}, listed later")
    # members of one stratum must be listed contiguously
    seen_done = set()
    current = None
    for n in order:
        if comp[n] != current:
            if comp[n] in seen_done:
                raise InvalidMap(f"order directive splits the stratum containing {n}")
            if current is not None:
                seen_done.add(current)
            current = comp[n]
