"""Bead classification and beaded decompositions."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..core import EdgePath
from ..nielsen_gep import (GepData, PepData, is_gep, is_nielsen, is_pep, linear_edges,
                           split_into_indivisibles)
from ..splitting import Decomposition, SplitVerdict, all_verdicts


class BeadKind(str, enum.Enum):
    GEP = "Gep"
    PEP = "Pep"
    NIELSEN = "Nielsen"
    ATOM = "Atom"


@dataclass(frozen=True)
class Bead:
    kind: BeadKind
    path: EdgePath
    data: GepData | PepData | None = None
    # for atoms: how monochromaticity was established
    evidence: str | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "path": self.path.literal(), "length": len(self.path)}
        if self.data is not None:
            out["data"] = self.data.to_json()
        if self.evidence is not None:
            out["evidence"] = self.evidence
        return out

    def __str__(self) -> str:
        return f"{self.kind.value}({self.path.literal()})"


def classify_bead(fmap, path: EdgePath, J: int, kmax: int | None = None,
                  evidence: str | None = None, horizon: int | None = None) -> Bead | None:
    """First match in the order GEP, ΨEP, indivisible Nielsen (<= J), atom (<= J).

    ``evidence`` marks a path already known to be monochromatic; otherwise a
    bounded membership search up to ``horizon`` supplies it.
    """
    if not path:
        return None
    g = is_gep(fmap, path)
    if g is not None:
        return Bead(BeadKind.GEP, path, g)
    p = is_pep(fmap, path)
    if p is not None:
        return Bead(BeadKind.PEP, path, p)
    if len(path) > J:
        return None
    if is_nielsen(fmap, path):
        pieces = split_into_indivisibles(fmap, path)
        if pieces is not None and len(pieces) == 1:
            return Bead(BeadKind.NIELSEN, path)
    if evidence is None:
        from .nibble import monochromatic_evidence
        t = monochromatic_evidence(fmap, path, 1, horizon if horizon is not None else fmap.caps.horizon)
        if t is None:
            return None
        evidence = "edge" if t == 0 else f"inside f_#^{t}(edge)"
    return Bead(BeadKind.ATOM, path, None, evidence)


@dataclass
class BeadedResult:
    path: EdgePath
    decomposition: Decomposition | None
    beads: list[Bead] = field(default_factory=list)
    # a factor of the maximal hard splitting that no merge could classify
    failure: EdgePath | None = None

    @property
    def ok(self) -> bool:
        return self.decomposition is not None

    def render(self) -> str:
        if not self.ok:
            return f"not beaded: factor {self.failure.literal()} of {self.path.literal()}"
        return " ⊙ ".join(str(b) for b in self.beads)

    def to_json(self) -> dict:
        return {"path": self.path.literal(), "beaded": self.ok,
                "beads": [b.to_json() for b in self.beads],
                "failure": None if self.failure is None else self.failure.literal()}


def beaded_decomposition(fmap, path: EdgePath, J: int, kmax: int | None = None,
                         evidence: str | None = None,
                         verdicts: dict[int, SplitVerdict] | None = None) -> BeadedResult:
    """Hard-split ``path`` into beads, merging factors of the maximal splitting when needed.

    Any subset of hard positions is itself a hard splitting, so a dynamic
    program over the hard positions looks for a split into beads, preferring
    the finest one.
    """
    if verdicts is None:
        verdicts = all_verdicts(fmap, path, kmax)
    cuts = [0] + sorted(p for p, v in verdicts.items() if v.hard) + [len(path)]
    n = len(cuts)
    cache: dict[tuple[int, int], Bead | None] = {}

    def bead(a: int, b: int) -> Bead | None:
        if (a, b) not in cache:
            seg = path[cuts[a]:cuts[b]]
            cache[(a, b)] = classify_bead(fmap, seg, J, kmax, evidence)
        return cache[(a, b)]

    # best[i]: most beads covering path[:cuts[i]], with back pointer
    best: list[tuple[int, int] | None] = [None] * n
    best[0] = (0, -1)
    for b in range(1, n):
        for a in range(b - 1, -1, -1):
            if best[a] is None:
                continue
            if not _could_merge(fmap, path, cuts, a, b, J):
                continue
            if bead(a, b) is not None:
                cand = (best[a][0] + 1, a)
                if best[b] is None or cand[0] > best[b][0]:
                    best[b] = cand
    if best[-1] is None:
        bad = None
        for a in range(n - 1):
            if bead(a, a + 1) is None:
                bad = path[cuts[a]:cuts[a + 1]]
                break
        return BeadedResult(path, None, [], bad if bad is not None else path)
    chosen = []
    i = n - 1
    while i > 0:
        a = best[i][1]
        chosen.append((a, i))
        i = a
    chosen.reverse()
    beads = [bead(a, b) for a, b in chosen]
    positions = tuple(cuts[b] for _, b in chosen[:-1])
    dec = Decomposition(path, positions, {p: verdicts[p] for p in positions},
                        tuple(b.kind.value for b in beads))
    return BeadedResult(path, dec, beads)


def _could_merge(fmap, path, cuts, a, b, J) -> bool:
    """Cheap filter: a merged segment longer than J must look like a GEP or ΨEP."""
    if b == a + 1 or cuts[b] - cuts[a] <= J:
        return True
    lin = linear_edges(fmap)
    seg = path[cuts[a]:cuts[b]]
    ends = {seg[0].name, seg[-1].name}
    return bool(ends & set(lin))


__all__ = ["BeadKind", "Bead", "classify_bead", "BeadedResult", "beaded_decomposition"]
