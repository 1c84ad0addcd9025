"""k-splittings, hard splittings and the maximal hard splitting of a path.

A decomposition ``sigma = sigma1 . sigma2`` fails to be a hard k-splitting
exactly when some order of free cancellations in the unreduced word
``f^k(sigma1) f^k(sigma2)`` cancels a letter of the left half against a
letter of the right half.  Before the first such cross cancellation all
cancellations are internal, so the meeting letters are ``U[i]`` with the
strict suffix ``U[i+1:]`` freely trivial and ``V[j]`` with the strict
prefix ``V[:j]`` freely trivial.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .core import EdgePath
from .errors import CapExceeded


class VerdictKind(str, enum.Enum):
    NOT_HARD = "NotHard"
    HARD_UP_TO = "HardUpTo"
    CERTIFIED = "CertifiedHard"


class Certificate(str, enum.Enum):
    PARABOLIC_PREFIX = "C1"
    NIELSEN_JUNCTION = "C2"
    POSITIVE_CONE = "C3"


@dataclass(frozen=True)
class CancelWitness:
    """A cross cancellation in the unreduced ``k``-th image.

    ``i`` indexes the left word ``U`` and ``j`` the right word ``V``;
    ``U[i+1:]`` and ``V[:j]`` are freely trivial and ``U[i]`` is the
    reversal of ``V[j]``.
    """

    k: int
    i: int
    j: int
    left_flank: EdgePath
    right_flank: EdgePath
    letter: str

    def to_json(self) -> dict:
        return {"k": self.k, "i": self.i, "j": self.j, "letter": self.letter,
                "left_flank": self.left_flank.literal(), "right_flank": self.right_flank.literal()}


@dataclass(frozen=True)
class SplitVerdict:
    kind: VerdictKind
    k: int | None = None
    certificate: Certificate | None = None
    witness: CancelWitness | None = None

    @property
    def hard(self) -> bool:
        return self.kind is not VerdictKind.NOT_HARD

    @property
    def certified(self) -> bool:
        return self.kind is VerdictKind.CERTIFIED

    def __str__(self) -> str:
        if self.kind is VerdictKind.NOT_HARD:
            return f"NotHard(k={self.k})"
        if self.kind is VerdictKind.HARD_UP_TO:
            return f"HardUpTo({self.k})"
        return f"CertifiedHard({self.certificate.value})"

    def to_json(self) -> dict:
        return {"verdict": self.kind.value, "k": self.k,
                "certificate": None if self.certificate is None else self.certificate.value,
                "witness": None if self.witness is None else self.witness.to_json()}


def not_hard(k, witness) -> SplitVerdict:
    return SplitVerdict(VerdictKind.NOT_HARD, k, None, witness)


# -- the exact criterion --------------------------------------------------------


def cross_cancellation(u: Sequence[int], v: Sequence[int]) -> tuple[int, int] | None:
    """Return ``(i, j)`` witnessing a cross cancellation between code words, or None."""
    # letters of u whose strict suffix is freely trivial, rightmost position per letter
    left: dict[int, int] = {}
    stack: list[int] = []
    for i in range(len(u) - 1, -1, -1):
        if not stack:
            left.setdefault(u[i], i)
        c = u[i]
        if stack and stack[-1] == c ^ 1:
            stack.pop()
        else:
            stack.append(c)
    if not left:
        return None
    stack = []
    for j, c in enumerate(v):
        if not stack:
            i = left.get(c ^ 1)
            if i is not None:
                return i, j
        if stack and stack[-1] == c ^ 1:
            stack.pop()
        else:
            stack.append(c)
    return None


def all_cut_cancellations(word: Sequence[int], cuts: Sequence[int]) -> dict[int, tuple[int, int] | None]:
    """The cross-cancellation witness (absolute indices) at every cut of ``word`` at once.

    The reduced prefixes of ``word`` are nodes of a trie; a cut at ``N``
    admits a cross cancellation iff for some letter ``a`` there is ``i < N``
    with ``word[i] = a`` and prefix node after ``i + 1`` letters equal to the
    node at ``N``, and ``j >= N`` with ``word[j] = a ^ 1`` and prefix node at
    ``j`` equal to the node at ``N``.
    """
    n = len(word)
    node_seq = [0] * (n + 1)
    parent = [0]
    last = [-1]
    children: dict[tuple[int, int], int] = {}
    cur = 0
    for t, c in enumerate(word):
        if last[cur] == c ^ 1:
            cur = parent[cur]
        else:
            nxt = children.get((cur, c))
            if nxt is None:
                nxt = len(parent)
                parent.append(cur)
                last.append(c)
                children[(cur, c)] = nxt
            cur = nxt
        node_seq[t + 1] = cur
    min_end: dict[tuple[int, int], int] = {}
    max_start: dict[tuple[int, int], int] = {}
    for i, c in enumerate(word):
        min_end.setdefault((node_seq[i + 1], c), i)
        max_start[(node_seq[i], c)] = i
    letters_at: dict[int, list[int]] = {}
    for (x, c) in min_end:
        letters_at.setdefault(x, []).append(c)
    out: dict[int, tuple[int, int] | None] = {}
    for cut in cuts:
        x = node_seq[cut]
        hit = None
        for c in letters_at.get(x, ()):
            i = min_end[(x, c)]
            if i >= cut:
                continue
            j = max_start.get((x, c ^ 1))
            if j is not None and j >= cut:
                hit = (i, j)
                break
        out[cut] = hit
    return out


def _witness(fmap, path: EdgePath, pos: int, k: int, i: int, j: int) -> CancelWitness:
    u = fmap.raw_word_codes(fmap.codes(path.edges[:pos]), k)
    v = fmap.raw_word_codes(fmap.codes(path.edges[pos:]), k)
    mid = fmap.f_vertex(path.vertex_at(pos), k)
    left = fmap.decode(u[i + 1:], mid) if i + 1 < len(u) else EdgePath.empty(mid)
    right = fmap.decode(v[:j], mid) if j else EdgePath.empty(mid)
    return CancelWitness(k, i, j, left, right, str(fmap.letters[u[i]]))


def replay_cancellations(u: Sequence[int], v: Sequence[int], i: int, j: int) -> list[tuple[int, int]]:
    """A tightening order (pairs of absolute indices into ``u + v``) ending in a cross cancellation."""
    steps = []
    stack: list[int] = []
    for p in range(i + 1, len(u)):
        if stack and u[stack[-1]] == u[p] ^ 1:
            steps.append((stack.pop(), p))
        else:
            stack.append(p)
    assert not stack, "left flank is not freely trivial"
    off = len(u)
    for q in range(j):
        if stack and v[stack[-1] - off] == v[q] ^ 1:
            steps.append((stack.pop(), q + off))
        else:
            stack.append(q + off)
    assert not stack, "right flank is not freely trivial"
    steps.append((i, j + off))
    return steps


def apply_cancellations(word: Sequence[int], steps: Sequence[tuple[int, int]]) -> list[int]:
    """Perform cancellations given by absolute index pairs, checking each is legal."""
    alive = list(range(len(word)))
    for a, b in steps:
        ia = alive.index(a)
        if ia + 1 >= len(alive) or alive[ia + 1] != b:
            raise ValueError(f"letters {a} and {b} are not adjacent")
        if word[a] != word[b] ^ 1:
            raise ValueError(f"letters {a} and {b} are not inverse")
        del alive[ia:ia + 2]
    return [word[p] for p in alive]


# -- single position queries -----------------------------------------------------------


def _check_pos(path: EdgePath, pos: int) -> None:
    if not 0 < pos < len(path):
        raise ValueError(f"split position {pos} is not internal to a path of length {len(path)}")


def is_k_splitting(fmap, path: EdgePath, pos: int, k: int) -> bool:
    _check_pos(path, pos)
    left = fmap.f_sharp(path[:pos], k)
    right = fmap.f_sharp(path[pos:], k)
    whole = fmap.f_sharp(path, k)
    return len(left) + len(right) == len(whole) and left.edges + right.edges == whole.edges


def is_splitting_up_to(fmap, path: EdgePath, pos: int, kmax: int) -> bool:
    return all(is_k_splitting(fmap, path, pos, k) for k in range(1, kmax + 1))


def is_hard_k_splitting(fmap, path: EdgePath, pos: int, k: int) -> tuple[bool, CancelWitness | None]:
    _check_pos(path, pos)
    u = fmap.raw_word_codes(fmap.codes(path.edges[:pos]), k)
    v = fmap.raw_word_codes(fmap.codes(path.edges[pos:]), k)
    hit = cross_cancellation(u, v)
    if hit is None:
        return True, None
    return False, _witness(fmap, path, pos, k, *hit)


def certificate_for(fmap, path: EdgePath, pos: int) -> Certificate | None:
    """A sufficient condition for hardness at every k, or None."""
    if fmap_is_irtt(fmap):
        if _parabolic_prefix(fmap, path, pos):
            return Certificate.PARABOLIC_PREFIX
        from .nielsen_gep import is_nielsen
        from .traintrack.turns import Turn
        left, right = path[:pos], path[pos:]
        if is_nielsen(fmap, left) and is_nielsen(fmap, right):
            turn = Turn.of(~path[pos - 1], path[pos])
            if turn not in fmap.illegal_turns:
                return Certificate.NIELSEN_JUNCTION
    closure = fmap.closure_of(fmap.codes(path))
    if all(c ^ 1 not in closure for c in closure):
        return Certificate.POSITIVE_CONE
    return None


def _parabolic_prefix(fmap, path: EdgePath, pos: int) -> bool:
    filt = fmap.filtration
    for p in (path, path.reverse()):
        cut = pos if p is path else len(path) - pos
        if cut != 1:
            continue
        e = p[0]
        if e.inverted:
            continue
        s = filt[filt.of_edge(e)]
        if s.kind.value != "Parabolic" or s.suffix is None:
            continue
        w = p.edges[1:]
        if len(w) <= len(s.suffix) and s.suffix.edges[:len(w)] == w:
            return True
    return False


def fmap_is_irtt(fmap) -> bool:
    """Whether the exact improved-train-track clauses hold (cached on the map)."""
    hit = fmap.__dict__.get("_exact_irtt_ok")
    if hit is None:
        from .traintrack.irtt import verify_irtt
        hit = verify_irtt(fmap, exact_only=True).exact_ok
        fmap.__dict__["_exact_irtt_ok"] = hit
    return hit


def _verdicts_all(fmap, path: EdgePath, positions: Sequence[int], kmax: int) -> dict[int, SplitVerdict]:
    codes = fmap.codes(path)
    pending = list(positions)
    out: dict[int, SplitVerdict] = {}
    capped_at = None
    reached = kmax
    for k in range(1, kmax + 1):
        if not pending:
            break
        lens = fmap.raw_lengths(k)
        if k > 1 and sum(lens[c] for c in codes) > fmap.caps.verdict_cap:
            reached = k - 1
            break
        try:
            word = fmap.raw_word_codes(codes, k)
        except CapExceeded:
            capped_at = k
            break
        offsets = [0]
        for c in codes:
            offsets.append(offsets[-1] + lens[c])
        res = all_cut_cancellations(word, [offsets[p] for p in pending])
        still = []
        for p in pending:
            hit = res[offsets[p]]
            if hit is None:
                still.append(p)
            else:
                i, j = hit
                out[p] = not_hard(k, _witness(fmap, path, p, k, i, j - offsets[p]))
        pending = still
    for p in pending:
        cert = certificate_for(fmap, path, p)
        if cert is not None:
            out[p] = SplitVerdict(VerdictKind.CERTIFIED, None, cert)
        elif capped_at is not None:
            raise CapExceeded(f"raw image at k={capped_at} exceeds the word cap; position {p} undecided")
        else:
            out[p] = SplitVerdict(VerdictKind.HARD_UP_TO, reached)
    return out


def hard_split_verdict(fmap, path: EdgePath, pos: int, kmax: int | None = None) -> SplitVerdict:
    _check_pos(path, pos)
    kmax = fmap.caps.kmax if kmax is None else kmax
    return _verdicts_all(fmap, path, [pos], kmax)[pos]


# -- decompositions ----------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """A path with marked hard split positions and optional per-factor annotations."""

    path: EdgePath
    positions: tuple[int, ...]
    verdicts: dict = field(default_factory=dict, compare=False)
    annotations: tuple = ()

    @property
    def factors(self) -> list[EdgePath]:
        cuts = (0,) + self.positions + (len(self.path),)
        return [self.path[a:b] for a, b in zip(cuts, cuts[1:])]

    @property
    def certified(self) -> bool:
        return all(self.verdicts[p].certified for p in self.positions)

    def render(self) -> str:
        return " ⊙ ".join(f.literal() for f in self.factors)

    def __str__(self) -> str:
        return self.render()


def all_verdicts(fmap, path: EdgePath, kmax: int | None = None) -> dict[int, SplitVerdict]:
    kmax = fmap.caps.kmax if kmax is None else kmax
    return _verdicts_all(fmap, path, list(range(1, len(path))), kmax)


def maximal_hard_splitting(fmap, path: EdgePath, kmax: int | None = None) -> Decomposition:
    verdicts = all_verdicts(fmap, path, kmax)
    positions = tuple(p for p in sorted(verdicts) if verdicts[p].hard)
    return Decomposition(path, positions, verdicts)


def is_displayed(fmap, path: EdgePath, lo: int, hi: int, kmax: int | None = None) -> bool:
    if not 0 <= lo < hi <= len(path):
        raise ValueError(f"[{lo}, {hi}) is not a nonempty sub edge-path range")
    for p in (lo, hi):
        if 0 < p < len(path) and not hard_split_verdict(fmap, path, p, kmax).hard:
            return False
    return True


def verdict_table(dec: Decomposition) -> list[dict]:
    out = []
    for p in sorted(dec.verdicts):
        v = dec.verdicts[p]
        row = {"pos": p}
        row.update(v.to_json())
        out.append(row)
    return out

