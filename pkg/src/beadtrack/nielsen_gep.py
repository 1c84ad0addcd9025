"""Nielsen paths, exceptional paths, growing exceptional paths (GEPs) and ΨEPs.

Throughout, a linear edge ``E`` satisfies ``f(E) = E . tau^a`` where ``tau``
is a primitive closed Nielsen path stored in a canonical orientation and
``a`` is a nonzero signed exponent.  Paths ``E_x tau^s ~E_y`` over a shared
``tau`` map to ``E_x tau^(s + a_x - a_y) ~E_y``, which decides everything
about exceptional paths and GEPs.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator

from .config import Caps
from .core import (EdgePath, OrientedEdge, canonical_orientation, path_key, power,
                   primitive_root, reduce_word)
from .errors import CapExceeded, EmptyPath, MissingInventory, NotIterated
from .traintrack.filtration import StratumKind
from .traintrack.turns import turns_taken


def is_nielsen(fmap, path: EdgePath) -> bool:
    """``f_#(path) = path`` for a nontrivial path."""
    if not path:
        return False
    img = fmap.f_sharp(path)
    return img.edges == path.edges and img.start == path.start


def settles_to_nielsen(fmap, path: EdgePath, horizon: int) -> int | None:
    """Least ``k <= horizon`` with ``f_#^k(path)`` Nielsen, or None."""
    cur = path
    for k in range(horizon + 1):
        if is_nielsen(fmap, cur):
            return k
        cur = fmap.f_sharp(cur)
        if not cur:
            return None
    return None


def _cached(fmap, key, build):
    store = fmap.__dict__.setdefault("_nielsen_cache", {})
    if key not in store:
        store[key] = build()
    return store[key]


# -- linear edges -------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearEdge:
    edge: OrientedEdge
    stratum: int
    tau: EdgePath
    exponent: int

    def oriented_tau(self) -> EdgePath:
        """The orientation of ``tau`` in which this edge's exponent is positive."""
        return self.tau if self.exponent > 0 else self.tau.reverse()

    @property
    def m(self) -> int:
        return abs(self.exponent)


def linear_edges(fmap) -> dict[str, LinearEdge]:
    """Parabolic edges whose suffix is a nontrivial closed Nielsen path."""

    def build():
        out = {}
        filt = fmap.filtration
        for s in filt.parabolic():
            if len(s.edges) != 1 or s.suffix is None or not s.suffix:
                continue
            u = s.suffix
            if not u.is_closed() or not is_nielsen(fmap, u):
                continue
            root, m = primitive_root(u)
            tau = canonical_orientation(root)
            e = fmap.graph.edge(s.edge)
            out[s.edge] = LinearEdge(e, s.index, tau, m if root.edges == tau.edges else -m)
        return out

    return _cached(fmap, "linear", build)


def _same_tau(a: LinearEdge, b: LinearEdge) -> bool:
    return a.tau.edges == b.tau.edges and a.tau.start == b.tau.start


# -- records ------------------------------------------------------------------------------


class NielsenKind(str, enum.Enum):
    FIXED_EDGE = "FixedEdge"
    PARABOLIC_EXCEPTIONAL = "ParabolicExceptional"
    EXPONENTIAL = "ExponentialPr"
    COMPOSITE = "Composite"


@dataclass(frozen=True)
class NielsenPath:
    path: EdgePath
    kind: NielsenKind
    weight: int
    indivisible: bool
    pieces: tuple = ()
    parse: dict | None = None

    def to_json(self) -> dict:
        out = {"path": self.path.literal(), "kind": self.kind.value, "weight": self.weight,
               "indivisible": self.indivisible}
        if self.pieces:
            out["pieces"] = [p.literal() for p in self.pieces]
        if self.parse:
            out["parse"] = self.parse
        return out


@dataclass(frozen=True)
class ExceptionalFamily:
    """Nielsen paths ``E_l tau^s ~E_r`` for every admissible integer ``s``."""

    left: LinearEdge
    right: LinearEdge

    @property
    def tau(self) -> EdgePath:
        return self.left.tau

    def member(self, s: int) -> EdgePath | None:
        if s == 0 and self.left.edge == self.right.edge:
            return None
        t = power(self.tau, s) if s else EdgePath.empty(self.tau.start)
        edges = (self.left.edge,) + t.edges + (~self.right.edge,)
        p = EdgePath(edges, self.left.edge.origin)
        return p if p.is_tight() else None

    def members(self, max_len: int) -> Iterator[tuple[int, EdgePath]]:
        s = 0
        while len(power(self.tau, s)) + 2 <= max_len:
            for t in ((0,) if s == 0 else (s, -s)):
                p = self.member(t)
                if p is not None:
                    yield t, p
            s += 1

    def to_json(self) -> dict:
        return {"left": self.left.edge.name, "right": self.right.edge.name,
                "tau": self.tau.literal(), "exponent": self.left.exponent, "k_range": "unbounded"}


# -- inventory ------------------------------------------------------------------------------


@dataclass
class NielsenInventory:
    map_name: str
    max_len: int
    search_len: int
    indivisible: list[NielsenPath]
    families: list[ExceptionalFamily]
    truncated: bool = False
    _keys: set = field(default_factory=set, repr=False)

    def __post_init__(self):
        self._keys = {(n.path.start, path_key(n.path)) for n in self.indivisible}

    def indivisible_paths(self) -> list[EdgePath]:
        return [n.path for n in self.indivisible]

    def is_indivisible_member(self, path: EdgePath) -> bool:
        c = canonical_orientation(path)
        return (c.start, path_key(c)) in self._keys

    def of_weight(self, r: int) -> list[NielsenPath]:
        return [n for n in self.indivisible if n.weight == r]

    def paths(self, max_len: int | None = None) -> Iterator[EdgePath]:
        """Every Nielsen path up to ``max_len``, as tight concatenations of indivisibles."""
        max_len = self.max_len if max_len is None else min(max_len, self.max_len)
        pieces = []
        for n in self.indivisible:
            pieces.append(n.path)
            rev = n.path.reverse()
            if rev.edges != n.path.edges:
                pieces.append(rev)
        pieces.sort(key=lambda p: (len(p), path_key(p)))
        by_start: dict[str, list[EdgePath]] = {}
        for p in pieces:
            by_start.setdefault(p.start, []).append(p)

        def extend(prefix: EdgePath):
            yield prefix
            for p in by_start.get(prefix.end, ()):
                if len(prefix) + len(p) > max_len:
                    continue
                if prefix.edges[-1] == ~p.edges[0]:
                    continue
                yield from extend(EdgePath(prefix.edges + p.edges, prefix.start))

        for p in pieces:
            if len(p) <= max_len:
                yield from extend(p)

    def to_json(self) -> dict:
        return {"map": self.map_name, "max_len": self.max_len, "search_len": self.search_len,
                "truncated": self.truncated,
                "indivisible": [n.to_json() for n in self.indivisible],
                "families": [f.to_json() for f in self.families]}


def split_into_indivisibles(fmap, path: EdgePath) -> list[EdgePath] | None:
    """Greedy shortest-Nielsen-prefix factorization; None when ``path`` is not Nielsen."""
    if not is_nielsen(fmap, path):
        return None
    out = []
    rest = path
    while rest:
        for cut in range(1, len(rest) + 1):
            head = rest[:cut]
            if is_nielsen(fmap, head):
                out.append(head)
                rest = rest[cut:]
                break
        else:
            return None
    return out


def _is_indivisible(fmap, path: EdgePath) -> bool:
    return not any(is_nielsen(fmap, path[:cut]) for cut in range(1, len(path)))


def _exponential_search(fmap, r: int, max_len: int, budget: int):
    """Nielsen paths in ``G_r`` that start and end in ``H_r`` with at most one illegal ``H_r`` turn."""
    filt = fmap.filtration
    strat = filt.stratum_of
    illegal = fmap.illegal_turns
    from .traintrack.turns import Turn
    allowed = [e for e in fmap.letters if strat[e.name] <= r]
    out_at: dict[str, list[OrientedEdge]] = {}
    for e in allowed:
        out_at.setdefault(e.origin, []).append(e)
    found = []
    visited = 0
    truncated = False
    stack = [((e,), 0) for e in reversed(allowed) if strat[e.name] == r]
    while stack:
        edges, nill = stack.pop()
        visited += 1
        if visited > budget:
            truncated = True
            break
        last = edges[-1]
        if len(edges) >= 2 and strat[last.name] == r:
            p = EdgePath(edges, edges[0].origin)
            if is_nielsen(fmap, p):
                found.append(p)
        if len(edges) >= max_len:
            continue
        for e in reversed(out_at.get(last.terminus, ())):
            if e == ~last:
                continue
            t = Turn.of(~last, e)
            bad = strat[e.name] == r and strat[last.name] == r and t in illegal
            if bad and nill:
                continue
            stack.append((edges + (e,), nill + bad))
    return found, truncated


def enumerate_nielsen(fmap, max_len: int | None = None, caps: Caps | None = None) -> NielsenInventory:
    caps = caps or fmap.caps
    max_len = caps.nielsen_max_len if max_len is None else max_len
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    search_len = min(max_len, caps.exp_search_len)
    return _cached(fmap, ("inventory", max_len, search_len, caps.max_paths),
                   lambda: _build_inventory(fmap, max_len, search_len, caps))


def _build_inventory(fmap, max_len: int, search_len: int, caps: Caps) -> NielsenInventory:
    filt = fmap.filtration
    records: dict[tuple, NielsenPath] = {}

    def add(p: EdgePath, kind: NielsenKind, parse=None):
        c = canonical_orientation(p)
        key = (c.start, path_key(c))
        if key not in records:
            records[key] = NielsenPath(c, kind, filt.weight(c), True, (c,), parse)

    for e in fmap.edges:
        if fmap.image[e].edges == (e,):
            add(EdgePath((e,), e.origin), NielsenKind.FIXED_EDGE)

    lin = linear_edges(fmap)
    names = list(lin)
    families = []
    for x, left in enumerate(names):
        for right in names[x:]:
            a, b = lin[left], lin[right]
            if not _same_tau(a, b) or a.exponent != b.exponent:
                continue
            fam = ExceptionalFamily(a, b)
            families.append(fam)
            for s, p in fam.members(max_len):
                add(p, NielsenKind.PARABOLIC_EXCEPTIONAL,
                    {"left": left, "right": right, "tau": a.tau.literal(), "s": s})

    truncated = False
    for s in filt.exponential():
        found, cut = _exponential_search(fmap, s.index, search_len, caps.max_paths)
        truncated |= cut
        for p in found:
            if _is_indivisible(fmap, p):
                add(p, NielsenKind.EXPONENTIAL, {"stratum": s.index})

    indiv = sorted(records.values(), key=lambda n: (len(n.path), path_key(n.path)))
    return NielsenInventory(fmap.name, max_len, search_len, indiv, families, truncated)


def nielsen_record(fmap, path: EdgePath, inventory: NielsenInventory | None = None) -> NielsenPath | None:
    """Classify a Nielsen path, or None if ``path`` is not Nielsen."""
    pieces = split_into_indivisibles(fmap, path)
    if pieces is None:
        return None
    w = fmap.filtration.weight(path)
    if len(pieces) > 1:
        return NielsenPath(path, NielsenKind.COMPOSITE, w, False, tuple(pieces))
    if len(path) == 1:
        return NielsenPath(path, NielsenKind.FIXED_EDGE, w, True, (path,))
    kind = NielsenKind.EXPONENTIAL
    if fmap.filtration[w].kind is StratumKind.PARABOLIC:
        kind = NielsenKind.PARABOLIC_EXCEPTIONAL
    return NielsenPath(path, kind, w, True, (path,))


# -- GEPs -----------------------------------------------------------------------------------------


@dataclass(frozen=True)
class GepData:
    """Normalized parse ``E_i ~tau^k ~E_j`` with ``f(E_i) = E_i tau^m_i``, ``f(E_j) = E_j tau^m_j``.

    ``reversed`` records that the recognized path is the reverse of the normal form.
    """

    left: OrientedEdge
    m_i: int
    right: OrientedEdge
    m_j: int
    tau: EdgePath
    k: int
    reversed: bool = False

    def normal_form(self) -> EdgePath:
        mid = power(self.tau.reverse(), self.k)
        return EdgePath((self.left,) + mid.edges + (~self.right,), self.left.origin)

    def oriented(self) -> EdgePath:
        p = self.normal_form()
        return p.reverse() if self.reversed else p

    def successor(self) -> "GepData":
        return GepData(self.left, self.m_i, self.right, self.m_j, self.tau,
                       self.k + self.m_j - self.m_i, self.reversed)

    def to_json(self) -> dict:
        return {"E_i": self.left.name, "m_i": self.m_i, "E_j": self.right.name, "m_j": self.m_j,
                "tau": self.tau.literal(), "k": self.k, "reversed": self.reversed}


def _exceptional_parse(fmap, path: EdgePath):
    """``(x, y, s)`` with ``path = E_x tau^s ~E_y`` over a shared tau, or None."""
    if len(path) < 2:
        return None
    first, last = path[0], path[-1]
    if first.inverted or not last.inverted:
        return None
    lin = linear_edges(fmap)
    x, y = lin.get(first.name), lin.get(last.name)
    if x is None or y is None or not _same_tau(x, y):
        return None
    mid = path.edges[1:-1]
    tau = x.tau
    if not mid:
        return (x, y, 0) if x.edge != y.edge else None
    if path.vertex_at(1) != tau.start:
        return None
    for s in range(1, len(mid) + 1):
        t = power(tau, s)
        if len(t) > len(mid):
            break
        if t.edges == mid:
            return x, y, s
        if t.reverse().edges == mid:
            return x, y, -s
    return None


def is_gep(fmap, path: EdgePath) -> GepData | None:
    parse = _exceptional_parse(fmap, path)
    if parse is None:
        return None
    x, y, s = parse
    a, b = x.exponent, y.exponent
    if s == 0 or a == b or (a > 0) != (b > 0) or s * (a - b) <= 0:
        return None
    sign = 1 if a > 0 else -1
    tau = x.tau if sign > 0 else x.tau.reverse()
    s_pos = sign * s
    if s_pos < 0:
        # path = E_x ~tau^k ~E_y with m_y > m_x
        return GepData(x.edge, abs(a), y.edge, abs(b), tau, -s_pos, False)
    # reverse(path) = E_y ~tau^k ~E_x with m_x > m_y
    return GepData(y.edge, abs(b), x.edge, abs(a), tau, s_pos, True)


def exceptional_exponent(fmap, path: EdgePath) -> int | None:
    parse = _exceptional_parse(fmap, path)
    return None if parse is None else parse[2]


# -- ΨEPs ----------------------------------------------------------------------------------------


@dataclass(frozen=True)
class PepData:
    """``E_i ~tau^full ~nu gamma`` where ``tau = iota . sigma . nu`` splits into Nielsen pieces.

    ``gamma`` is a proper initial sub edge-path of ``~sigma``; the form is
    ``stable`` when ``gamma`` is a single edge and ``transient`` otherwise.
    """

    parent: GepData
    reversed: bool
    full: int
    iota: EdgePath
    sigma: EdgePath
    nu: EdgePath
    gamma: EdgePath
    tail: EdgePath

    @property
    def form(self) -> str:
        return "stable" if len(self.gamma) == 1 else "transient"

    @property
    def edge(self) -> OrientedEdge:
        return self.parent.left

    def normal_form(self) -> EdgePath:
        mid = power(self.parent.tau.reverse(), self.full)
        return EdgePath((self.edge,) + mid.edges + self.tail.edges, self.edge.origin)

    def oriented(self) -> EdgePath:
        p = self.normal_form()
        return p.reverse() if self.reversed else p

    def to_json(self) -> dict:
        return {"parent": self.parent.to_json(), "reversed": self.reversed, "full": self.full,
                "iota": self.iota.literal(), "sigma": self.sigma.literal(), "nu": self.nu.literal(),
                "gamma": self.gamma.literal(), "form": self.form}


def _require_iterated(fmap, assume_iterated: bool) -> None:
    if not (assume_iterated or fmap.k1_certified):
        raise NotIterated("ΨEP recognition needs the iterate from find_power_k1 "
                          "(or an explicit assume_iterated=True)")


def is_pep(fmap, path: EdgePath, assume_iterated: bool = False) -> PepData | None:
    """Recognize a proper initial sub edge-path (length >= 2) of a GEP's normal form, or its reverse."""
    _require_iterated(fmap, assume_iterated)
    if len(path) < 2:
        return None
    lin = linear_edges(fmap)
    for p, rev in ((path, False), (path.reverse(), True)):
        first = p[0]
        if first.inverted or first.name not in lin:
            continue
        x = lin[first.name]
        partners = [y for y in lin.values()
                    if _same_tau(x, y) and (y.exponent > 0) == (x.exponent > 0) and y.m > x.m]
        if not partners:
            continue
        tau = x.oriented_tau()
        bar = tau.reverse()
        rest = p[1:]
        if rest.start != bar.start:
            continue
        n = 1
        while len(power(bar, n)) < len(rest):
            n += 1
        if power(bar, n).edges[:len(rest)] != rest.edges:
            continue
        partner = min(partners, key=lambda y: (y.m, y.edge.name))
        parent = GepData(x.edge, x.m, partner.edge, partner.m, tau, n, False)
        full = 0
        while True:
            nxt = power(bar, full + 1)
            if len(nxt) <= len(rest) and rest.edges[:len(nxt)] == nxt.edges:
                full += 1
            else:
                break
        head = power(bar, full) if full else EdgePath.empty(bar.start)
        tail = rest[len(head):]
        iota, sigma, nu, gamma = _tau_pieces(fmap, tau, tail)
        return PepData(parent, rev, full, iota, sigma, nu, gamma, tail)
    return None


def _tau_pieces(fmap, tau: EdgePath, tail: EdgePath):
    """Split ``tau = iota . sigma . nu`` so that ``tail = ~nu gamma`` with gamma a proper prefix of ``~sigma``."""
    pieces = split_into_indivisibles(fmap, tau) or [tau]
    rev_pieces = [q.reverse() for q in reversed(pieces)]
    used = 0
    idx = 0
    while idx < len(rev_pieces) and used + len(rev_pieces[idx]) <= len(tail):
        used += len(rev_pieces[idx])
        idx += 1
    if idx == len(rev_pieces):
        idx -= 1
        used -= len(rev_pieces[idx])
    q = len(pieces) - 1 - idx
    sigma = pieces[q]
    iota = _join(pieces[:q], tau.start)
    nu = _join(pieces[q + 1:], sigma.end)
    gamma = tail[used:]
    return iota, sigma, nu, gamma


def _join(parts, base) -> EdgePath:
    edges = tuple(e for p in parts for e in p.edges)
    return EdgePath(edges, parts[0].start if parts else base)


@dataclass(frozen=True)
class PepStep:
    form: str
    predicted: EdgePath
    direct: EdgePath
    successor: PepData | None
    rest: EdgePath | None

    @property
    def agrees(self) -> bool:
        return self.predicted.edges == self.direct.edges

    def to_json(self) -> dict:
        return {"form": self.form, "predicted": self.predicted.literal(),
                "direct": self.direct.literal(), "agrees": self.agrees,
                "successor": None if self.successor is None else self.successor.to_json(),
                "rest": None if self.rest is None else self.rest.literal()}


def pep_step(fmap, pep: PepData, nibble: int = 0, kmax: int | None = None) -> PepStep:
    """Immediate future of a ΨEP with ``nibble`` edges trimmed on the ``gamma`` side.

    The prediction uses only the parse: ``f(E_i ~tau^full t) = E_i tau^m_i ~tau^full f(t)``;
    it is compared against a direct ``f_#`` recomputation.
    """
    from .splitting import hard_split_verdict

    tau = pep.parent.tau
    shift = pep.full - pep.parent.m_i
    mid = power(tau.reverse(), shift) if shift else EdgePath.empty(tau.start)
    tail_img = fmap.f_sharp(pep.tail) if pep.tail else EdgePath.empty(fmap.f_vertex(pep.tail.start))
    word = reduce_word((pep.edge,) + mid.edges + tail_img.edges)
    predicted = EdgePath(word, pep.edge.origin)
    direct = fmap.f_sharp(pep.normal_form())
    if nibble:
        if nibble >= len(direct):
            raise EmptyPath("nibbling removed the whole future")
        predicted = predicted[:len(predicted) - nibble]
        direct = direct[:len(direct) - nibble]
    result = direct
    orient = (lambda q: q.reverse()) if pep.reversed else (lambda q: q)
    for cut in range(len(result), 1, -1):
        head = result[:cut]
        cand = is_pep(fmap, head, assume_iterated=True)
        if cand is None or cand.reversed:
            continue
        if cut < len(result) and not hard_split_verdict(fmap, result, cut, kmax).hard:
            continue
        succ = PepData(cand.parent, pep.reversed, cand.full, cand.iota, cand.sigma, cand.nu,
                       cand.gamma, cand.tail)
        return PepStep("pep", orient(predicted), orient(direct), succ, orient(result[cut:]))
    if result and result[0] == pep.edge:
        if len(result) == 1 or hard_split_verdict(fmap, result, 1, kmax).hard:
            return PepStep("death", orient(predicted), orient(direct), None, orient(result[1:]))
    return PepStep("other", orient(predicted), orient(direct), None, None)


# -- P_r ------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class PrCandidate:
    path: EdgePath
    counts: tuple[int, ...]
    nielsen_at: int | None
    in_inventory: bool

    def to_json(self) -> dict:
        return {"path": self.path.literal(), "h_counts": list(self.counts),
                "nielsen_at": self.nielsen_at, "in_inventory": self.in_inventory}


def _pr_conditions(fmap, path: EdgePath, r: int) -> bool:
    strat = fmap.filtration.stratum_of
    if not path or strat[path[0].name] != r or strat[path[-1].name] != r:
        return False
    illegal = fmap.illegal_turns
    n = 0
    for _, t in turns_taken(path):
        if strat[t.a.name] == r and strat[t.b.name] == r and t in illegal:
            n += 1
    return n == 1


def compute_Pr(fmap, r: int, caps: Caps | None = None) -> list[PrCandidate]:
    """Bounded search for ``P_r``: one illegal ``H_r`` turn persisting with bounded ``H_r`` count."""
    caps = caps or fmap.caps
    filt = fmap.filtration
    if filt[r].kind is not StratumKind.EXPONENTIAL:
        return []
    strat = filt.stratum_of
    allowed = [e for e in fmap.letters if strat[e.name] <= r]
    out_at: dict[str, list[OrientedEdge]] = {}
    for e in allowed:
        out_at.setdefault(e.origin, []).append(e)
    inventory = enumerate_nielsen(fmap, caps=caps)
    horizon = caps.horizon
    results = []
    visited = 0
    stack = [(e,) for e in reversed(allowed) if strat[e.name] == r]
    while stack:
        edges = stack.pop()
        visited += 1
        if visited > caps.max_paths:
            raise CapExceeded(f"P_{r} search visited more than {caps.max_paths} paths")
        p = EdgePath(edges, edges[0].origin)
        if len(p) >= 2 and _pr_conditions(fmap, p, r):
            cand = _pr_trajectory(fmap, p, r, horizon)
            if cand is not None:
                at = settles_to_nielsen(fmap, p, horizon)
                member = at is not None and inventory.is_indivisible_member(fmap.f_sharp(p, at))
                results.append(PrCandidate(p, cand, at, member))
        if len(edges) < caps.exp_search_len:
            for e in reversed(out_at.get(edges[-1].terminus, ())):
                if e != ~edges[-1]:
                    stack.append(edges + (e,))
    return results


def _pr_trajectory(fmap, path: EdgePath, r: int, horizon: int) -> tuple[int, ...] | None:
    strat = fmap.filtration.stratum_of

    def h_count(q):
        return sum(1 for e in q if strat[e.name] == r)

    # the H_r count over the second half of the horizon may not exceed the first half's maximum
    counts = [h_count(path)]
    half = (horizon + 1) // 2
    cur = path
    for t in range(1, horizon + 1):
        cur = fmap.f_sharp(cur)
        if not _pr_conditions(fmap, cur, r):
            return None
        counts.append(h_count(cur))
        if t >= half and counts[-1] > max(counts[:half]):
            return None
    return tuple(counts)


def require_complete(inventory: NielsenInventory) -> None:
    if inventory.truncated:
        raise MissingInventory("the Nielsen search hit its path budget; the inventory may be incomplete")
