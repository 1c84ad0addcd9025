"""Nibbled futures, family forests and monochromatic path generation."""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Iterator

from ..config import Caps
from ..core import EdgePath, canonical_orientation, path_key, sub_edge_paths
from ..errors import CapExceeded, EmptyPath


class NibbleKind(str, enum.Enum):
    ENTIRE = "Entire"
    LEFT_ONLY = "LeftOnly"
    RIGHT_ONLY = "RightOnly"
    BOTH_ENDS = "BothEnds"
    EXHAUSTIVE = "Exhaustive"
    SEEDED = "Seeded"


@dataclass(frozen=True)
class NibblePolicy:
    kind: NibbleKind = NibbleKind.ENTIRE
    # edges removed per step (LeftOnly/RightOnly/BothEnds), or a per-step schedule
    trim: int | tuple[int, ...] = 1
    cap: int = 200_000
    seed: int = 0

    @classmethod
    def entire(cls) -> "NibblePolicy":
        return cls(NibbleKind.ENTIRE, 0)

    @classmethod
    def exhaustive(cls, cap: int = 200_000) -> "NibblePolicy":
        return cls(NibbleKind.EXHAUSTIVE, 0, cap)

    @classmethod
    def seeded(cls, seed: int) -> "NibblePolicy":
        return cls(NibbleKind.SEEDED, 0, seed=seed)

    def trim_at(self, step: int) -> int:
        if isinstance(self.trim, tuple):
            return self.trim[step - 1] if step - 1 < len(self.trim) else 0
        return self.trim

    def window(self, n: int, step: int, rng: random.Random | None = None) -> tuple[int, int]:
        """The kept range ``[lo, hi)`` of an ``n``-edge image."""
        k = self.kind
        if k is NibbleKind.ENTIRE or n == 0:
            return 0, n
        if k is NibbleKind.SEEDED:
            lo = rng.randrange(n)
            hi = rng.randrange(lo + 1, n + 1)
            return lo, hi
        t = self.trim_at(step)
        lo = t if k in (NibbleKind.LEFT_ONLY, NibbleKind.BOTH_ENDS) else 0
        hi = n - t if k in (NibbleKind.RIGHT_ONLY, NibbleKind.BOTH_ENDS) else n
        if hi <= lo:
            raise EmptyPath(f"trimming {t} edges at step {step} leaves nothing of a {n}-edge path")
        return lo, hi


# -- tightening with provenance ----------------------------------------------------------------


def tighten_survivors(word, rng: random.Random | None = None) -> list[int]:
    """Indices of letters of ``word`` that survive free reduction.

    Without ``rng`` this is leftmost-innermost (stack) reduction; with it,
    cancelling pairs are removed in a random order.  The reduced word is the
    same either way but the surviving instances may differ.
    """
    if rng is None:
        stack: list[int] = []
        for i, c in enumerate(word):
            if stack and word[stack[-1]] == c ^ 1:
                stack.pop()
            else:
                stack.append(i)
        return stack
    alive = list(range(len(word)))
    while True:
        pairs = [j for j in range(len(alive) - 1) if word[alive[j]] == word[alive[j + 1]] ^ 1]
        if not pairs:
            return alive
        j = rng.choice(pairs)
        del alive[j:j + 2]


@dataclass(frozen=True)
class ForestNode:
    pos: int
    parent_pos: int | None
    weight: int


@dataclass(frozen=True)
class FamilyForest:
    """Per step, each edge's parent position in the previous step and its weight."""

    levels: tuple[tuple[ForestNode, ...], ...]

    @classmethod
    def root(cls, fmap, path: EdgePath) -> "FamilyForest":
        strat = fmap.filtration.stratum_of
        return cls((tuple(ForestNode(i, None, strat[e.name]) for i, e in enumerate(path)),))

    def extend(self, nodes: tuple[ForestNode, ...]) -> "FamilyForest":
        return FamilyForest(self.levels + (nodes,))

    @property
    def steps(self) -> int:
        return len(self.levels) - 1

    def past(self, step: int, pos: int) -> list[ForestNode]:
        """The ancestry of an edge back to step 0, oldest first."""
        out = []
        while pos is not None:
            node = self.levels[step][pos]
            out.append(node)
            pos = node.parent_pos
            step -= 1
        return out[::-1]

    def weights_nonincreasing(self) -> bool:
        for k in range(1, len(self.levels)):
            prev = self.levels[k - 1]
            for node in self.levels[k]:
                if node.weight > prev[node.parent_pos].weight:
                    return False
        return True

    def to_json(self) -> list[dict]:
        return [{"step": k, "edges": [{"pos": n.pos, "parent_pos": n.parent_pos, "weight": n.weight}
                                      for n in lvl]}
                for k, lvl in enumerate(self.levels)]

    def render(self, paths: list[EdgePath] | None = None) -> str:
        lines = []
        for k, lvl in enumerate(self.levels):
            head = f"step {k}"
            if paths is not None:
                head += f": {paths[k].literal()}"
            lines.append(head)
            for n in lvl:
                name = f" {paths[k][n.pos]}" if paths is not None else ""
                par = "-" if n.parent_pos is None else str(n.parent_pos)
                lines.append(f"  {n.pos}{name} <- {par} (weight {n.weight})")
        return "\n".join(lines)


def step_with_forest(fmap, path: EdgePath, forest: FamilyForest, window, rng=None):
    """One nibbling step: ``f_#`` with provenance, then keep ``window(n)``."""
    strat = fmap.filtration.stratum_of
    raw: list[int] = []
    parent: list[int] = []
    for j, e in enumerate(path):
        img = fmap.img_codes[fmap.code_of[e]]
        raw.extend(img)
        parent.extend([j] * len(img))
    if len(raw) > fmap.caps.word_cap:
        raise CapExceeded(f"image of a {len(path)}-edge path exceeds the cap {fmap.caps.word_cap}")
    keep = tighten_survivors(raw, rng)
    lo, hi = window(len(keep))
    keep = keep[lo:hi]
    if keep:
        new = fmap.decode([raw[i] for i in keep], fmap.letters[raw[keep[0]]].origin)
    else:
        new = EdgePath.empty(fmap.f_vertex(path.start))
    nodes = tuple(ForestNode(p, parent[i], strat[fmap.letters[raw[i]].name]) for p, i in enumerate(keep))
    return new, forest.extend(nodes)


def nibbled_futures(fmap, path: EdgePath, steps: int, policy: NibblePolicy | None = None,
                    tightening_seed: int | None = None) -> Iterator[tuple[int, EdgePath, FamilyForest]]:
    """Stream ``(step, path, forest)``; step 0 is the path itself."""
    policy = policy or NibblePolicy.entire()
    if not path.is_tight():
        raise ValueError("nibbled futures start from a tight path")
    trng = None if tightening_seed is None else random.Random(tightening_seed)
    forest = FamilyForest.root(fmap, path)
    if policy.kind is not NibbleKind.EXHAUSTIVE:
        rng = random.Random(policy.seed)
        yield 0, path, forest
        cur = path
        for k in range(1, steps + 1):
            if not cur:
                return
            cur, forest = step_with_forest(fmap, cur, forest,
                                           lambda n, k=k: policy.window(n, k, rng), trng)
            yield k, cur, forest
        return
    yield from _exhaustive(fmap, path, steps, policy.cap, forest)


def _exhaustive(fmap, path, steps, cap, forest):
    seen = {(0, path.start, path.edges)}
    frontier = [(path, forest)]
    yield 0, path, forest
    for k in range(1, steps + 1):
        nxt = []
        for p, fo in frontier:
            full, ffo = step_with_forest(fmap, p, fo, lambda n: (0, n))
            n = len(full)
            for lo in range(n):
                for hi in range(lo + 1, n + 1):
                    sub = full[lo:hi]
                    key = (k, sub.start, sub.edges)
                    if key in seen:
                        continue
                    seen.add(key)
                    if len(seen) > cap:
                        raise CapExceeded(f"exhaustive nibbling exceeded {cap} states")
                    sfo = FamilyForest(ffo.levels[:-1] + (tuple(
                        ForestNode(i - lo, nd.parent_pos, nd.weight)
                        for i, nd in enumerate(ffo.levels[-1][lo:hi], start=lo)),))
                    nxt.append((sub, sfo))
                    yield k, sub, sfo
        frontier = nxt


def monochromatic_paths(fmap, r: int, depth: int, caps: Caps | None = None) -> Iterator[tuple[int, EdgePath]]:
    """``(depth, path)`` for r-monochromatic paths, canonical up to reversal.

    Level 0 is the edges; level ``d + 1`` adds sub edge-paths of ``f_#^r`` of level ``d``.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    caps = caps or fmap.caps
    seen = set()
    level = []
    for e in fmap.edges:
        p = EdgePath((e,), e.origin)
        seen.add((p.start, path_key(p)))
        level.append(p)
    level.sort(key=path_key)
    for p in level:
        yield 0, p
    for d in range(1, depth + 1):
        new = {}
        for p in level:
            img = fmap.f_sharp(p, r)
            for sub in sub_edge_paths(img):
                c = canonical_orientation(sub)
                key = (c.start, path_key(c))
                if key in seen:
                    continue
                seen.add(key)
                if len(seen) > caps.max_paths:
                    raise CapExceeded(f"more than {caps.max_paths} monochromatic paths")
                new[key] = c
        level = sorted(new.values(), key=lambda q: (len(q), path_key(q)))
        for p in level:
            yield d, p


def sample_monochromatic(fmap, r: int, depth: int, count: int, seed: int = 0) -> list[EdgePath]:
    """Seeded random r-monochromatic paths: random nibbled futures of random edges.

    Distinct up to reversal, in generation order.
    """
    g = fmap if r == 1 else _iterate(fmap, r)
    rng = random.Random(seed)
    out: dict = {}
    for _ in range(count):
        e = rng.choice(fmap.letters)
        steps = rng.randint(0, depth)
        policy = NibblePolicy.seeded(rng.randrange(2 ** 31))
        last = None
        for _, q, _ in nibbled_futures(g, EdgePath((e,), e.origin), steps, policy):
            last = q
        c = canonical_orientation(last)
        out.setdefault((c.start, path_key(c)), c)
    return list(out.values())


def _iterate(fmap, r):
    from ..traintrack.graphmap import iterate_map
    return iterate_map(fmap, r)


def monochromatic_evidence(fmap, path: EdgePath, r: int, horizon: int) -> int | None:
    """Least ``t <= horizon`` with ``path`` (or its reverse) inside some ``f_#^{r t}(edge)``."""
    fwd, bwd = path.edges, path.reverse().edges
    n = len(fwd)
    if n == 1:
        return 0
    for t in range(1, horizon + 1):
        for e in fmap.edges:
            img = fmap.f_sharp(EdgePath((e,), e.origin), r * t).edges
            if len(img) < n:
                continue
            for i in range(len(img) - n + 1):
                w = img[i:i + n]
                if w == fwd or w == bwd:
                    return t
    return None


__all__ = ["NibbleKind", "NibblePolicy", "FamilyForest", "ForestNode", "tighten_survivors",
           "step_with_forest", "nibbled_futures", "monochromatic_paths", "sample_monochromatic",
           "monochromatic_evidence"]
