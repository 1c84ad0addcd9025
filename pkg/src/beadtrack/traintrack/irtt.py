"""Verification of relative and improved train track properties, seeds, and the k1 iterate."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx

from ..config import Caps
from ..core import EdgePath
from ..errors import CapExceeded, MissingInventory
from .filtration import StratumKind
from .folding import fold
from .turns import derivative, illegal_turns_in, turns_taken


@dataclass(frozen=True)
class Clause:
    name: str
    passed: bool
    level: str  # "exact", "structural" or "bounded"
    subject: str = ""
    witness: str | None = None

    def to_json(self) -> dict:
        return {"clause": self.name, "passed": self.passed, "level": self.level,
                "subject": self.subject, "witness": self.witness}

    def __str__(self) -> str:
        mark = "pass" if self.passed else "FAIL"
        extra = f" [{self.subject}]" if self.subject else ""
        wit = f" witness: {self.witness}" if self.witness else ""
        return f"{mark:4} {self.name} ({self.level}){extra}{wit}"


@dataclass
class IrttReport:
    map_name: str
    clauses: list[Clause] = field(default_factory=list)

    def add(self, *args, **kw) -> None:
        self.clauses.append(Clause(*args, **kw))

    @property
    def exact_ok(self) -> bool:
        return all(c.passed for c in self.clauses if c.level in ("exact", "structural"))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.clauses)

    def failures(self) -> list[Clause]:
        return [c for c in self.clauses if not c.passed]

    def to_json(self) -> dict:
        return {"map": self.map_name, "passed": self.ok, "exact_passed": self.exact_ok,
                "clauses": [c.to_json() for c in self.clauses]}

    def render(self) -> str:
        lines = [f"IRTT report for {self.map_name}"]
        lines += ["  " + str(c) for c in self.clauses]
        lines.append("verdict: " + ("pass" if self.ok else "FAIL"))
        return "\n".join(lines)


def _components(fmap, edge_names: frozenset) -> list[tuple[set, set]]:
    """Connected components of the subgraph spanned by ``edge_names``: (edges, vertices)."""
    g = nx.MultiGraph()
    for n in edge_names:
        e = fmap.graph.edge(n)
        g.add_edge(e.origin, e.terminus, key=n)
    out = []
    for verts in nx.connected_components(g):
        edges = {k for u, v, k in g.subgraph(verts).edges(keys=True)}
        out.append((edges, set(verts)))
    return out


def _rank(edges: set, verts: set) -> int:
    return len(edges) - len(verts) + 1


def verify_irtt(fmap, caps: Caps | None = None, exact_only: bool = False) -> IrttReport:
    caps = caps or fmap.caps
    filt = fmap.filtration
    rep = IrttReport(fmap.name)
    vmap = fmap.vertex_map

    for v in fmap.declared_fixed:
        rep.add("declared-fixed", vmap[v] == v, "exact", v, None if vmap[v] == v else f"f({v}) = {vmap[v]}")

    bad = [v for v in fmap.graph.vertices if vmap[vmap[v]] != vmap[v]]
    rep.add("vertex-images-fixed", not bad, "exact", "",
            None if not bad else f"f(f({bad[0]})) = {vmap[vmap[bad[0]]]} but f({bad[0]}) = {vmap[bad[0]]}")

    # zero strata come out of the SCC construction as singletons; clauses apply to maximal runs
    runs: list[list[int]] = []
    for s in filt.strata:
        if s.kind is StratumKind.ZERO:
            if runs and runs[-1][-1] == s.index - 1:
                runs[-1].append(s.index)
            else:
                runs.append([s.index])
    run_top = {}
    for run in runs:
        for i in run:
            run_top[i] = run[-1]

    for s in filt.strata:
        r = s.index
        subject = f"H_{r} = {{{', '.join(s.edges)}}}"
        if s.kind is StratumKind.PARABOLIC:
            _parabolic_clauses(fmap, rep, s, subject)
        elif s.kind is StratumKind.EXPONENTIAL:
            _exponential_clauses(fmap, rep, s, subject)
    for run in runs:
        _zero_clauses(fmap, rep, run, filt)
    # nonzero strata must not be unions of contractible components of G_i
    for s in filt.strata:
        if s.kind is StratumKind.ZERO:
            continue
        below = filt.edges_below(s.index)
        comps = _components(fmap, below)
        tree_edges = set().union(*[es for es, vs in comps if _rank(es, vs) == 0] or [set()])
        bad_nz = set(s.edges) <= tree_edges
        rep.add("zero-iff-contractible", not bad_nz, "exact", f"H_{s.index}",
                None if not bad_nz else f"H_{s.index} is a union of contractible components of G_{s.index}")

    if exact_only:
        return rep
    _bounded_clauses(fmap, rep, caps)
    return rep


def _parabolic_clauses(fmap, rep: IrttReport, s, subject: str) -> None:
    filt = fmap.filtration
    vmap = fmap.vertex_map
    single = len(s.edges) == 1
    rep.add("ne-(i)", single, "exact", subject,
            None if single else f"parabolic stratum has {len(s.edges)} edges")
    if not single:
        return
    e = fmap.graph.edge(s.edge)
    img = fmap.image[e]
    if s.suffix is None:
        rep.add("ne-(ii)", False, "exact", subject,
                f"f({e}) = {img.literal()} does not begin with {e}")
    else:
        u = s.suffix
        problems = []
        if u and max(filt.stratum_of[x.name] for x in u) >= s.index:
            problems.append(f"suffix {u.literal()} is not in G_{s.index - 1}")
        if not u.is_closed():
            problems.append(f"suffix {u.literal()} is not closed")
        if vmap[u.start] != u.start:
            problems.append(f"suffix basepoint {u.start} is not fixed")
        rep.add("ne-(ii)", not problems, "exact", subject,
                "; ".join(problems) if problems else None)
    moved = [v for v in (e.origin, e.terminus) if vmap[v] != v]
    rep.add("parabolic-endpoints-fixed", not moved, "exact", subject,
            None if not moved else f"f({moved[0]}) = {vmap[moved[0]]}")


def _exponential_clauses(fmap, rep: IrttReport, s, subject: str) -> None:
    filt = fmap.filtration
    strat = filt.stratum_of
    r = s.index
    h_edges = [fmap.graph.edge(n) for n in s.edges]
    oriented = h_edges + [~e for e in h_edges]

    rep.add("eg-aperiodic", s.aperiodic, "exact", subject,
            None if s.aperiodic else "transition matrix is periodic")

    out = [e for e in oriented if strat[derivative(fmap, e).name] != r]
    rep.add("RTT-i", not out, "exact", subject,
            None if not out else f"Df({out[0]}) = {derivative(fmap, out[0])} leaves H_{r}")

    bad = []
    for e in h_edges:
        hits = illegal_turns_in(fmap, fmap.image[e], r)
        if hits:
            bad.append(f"f({e}) = {fmap.image[e].literal()} takes illegal turn {hits[0][1]}")
    rep.add("RTT-iii", not bad, "exact", subject, bad[0] if bad else None)

    ok, wit = _rtt_ii(fmap, s)
    rep.add("RTT-ii", ok, "structural", subject, wit)

    # endpoints in noncontractible components of G_{r-1} are fixed
    lower = filt.edges_below(r - 1)
    vmap = fmap.vertex_map
    moved = []
    for es, vs in _components(fmap, lower):
        if _rank(es, vs) == 0:
            continue
        for e in h_edges:
            for v in (e.origin, e.terminus):
                if v in vs and vmap[v] != v:
                    moved.append(v)
    rep.add("exponential-endpoints-fixed", not moved, "exact", subject,
            None if not moved else f"f({moved[0]}) = {vmap[moved[0]]}")


def _rtt_ii(fmap, s) -> tuple[bool, str | None]:
    """f_# is injective on paths in G_{r-1} with endpoints in H_r ∩ G_{r-1}."""
    filt = fmap.filtration
    lower = filt.edges_below(s.index - 1)
    if not lower:
        return True, None
    attach = set()
    for n in s.edges:
        e = fmap.graph.edge(n)
        attach.update((e.origin, e.terminus))
    for es, vs in _components(fmap, lower):
        marked = sorted(attach & vs)
        if not marked:
            continue
        chains = []
        for n in sorted(es):
            e = fmap.graph.edge(n)
            chains.append((e.origin, fmap.codes(fmap.image[e]), e.terminus))
        res = fold(chains)
        if res.betti != _rank(es, vs):
            return False, (f"f restricted to the component {{{', '.join(sorted(es))}}} has folded rank "
                           f"{res.betti} < {_rank(es, vs)}: some nontrivial loop tightens to a point")
        for a, b in itertools.combinations(marked, 2):
            if res.vertex_class[a] == res.vertex_class[b]:
                return False, f"a path in G_{s.index - 1} from {a} to {b} tightens to a point"
    return True, None


def _zero_clauses(fmap, rep: IrttReport, run: list[int], filt) -> None:
    top = run[-1]
    subject = f"H_{run[0]}..H_{top} (zero)"
    names = set()
    for i in run:
        names.update(filt[i].edges)
    comps = _components(fmap, filt.edges_below(top))
    tree_edges = set().union(*[es for es, vs in comps if _rank(es, vs) == 0] or [set()])
    ok = names == tree_edges
    rep.add("zero-iff-contractible", ok, "exact", subject,
            None if ok else f"zero edges {sorted(names)} vs contractible-component edges {sorted(tree_edges)}")
    nxt_ok = top < filt.omega and filt[top + 1].kind is StratumKind.EXPONENTIAL
    rep.add("z-(i)", nxt_ok, "exact", subject,
            None if nxt_ok else f"stratum {top + 1} is not exponential")
    # immersion: distinct directions of the zero edges at a vertex have distinct images
    seen: dict = {}
    problem = None
    for n in sorted(names):
        e = fmap.graph.edge(n)
        for d in (e, ~e):
            key = derivative(fmap, d)
            if key in seen and seen[key] != d:
                problem = f"{seen[key]} and {d} both start {key}"
            seen.setdefault(key, d)
        hits = [t for _, t in turns_taken(fmap.image[e]) if t.degenerate]
        if hits:
            problem = f"image of {e} folds"
    rep.add("z-(ii)", problem is None, "exact", subject, problem)


def _bounded_clauses(fmap, rep: IrttReport, caps: Caps) -> None:
    from ..nielsen_gep import enumerate_nielsen

    inventory = enumerate_nielsen(fmap, caps=caps)
    filt = fmap.filtration
    for s in filt.exponential():
        inps = inventory.of_weight(s.index)
        exp_inps = [n for n in inps if n.kind.value == "ExponentialPr"]
        problems = []
        if len(exp_inps) > 1:
            problems.append("more than one indivisible Nielsen path: " +
                            ", ".join(n.path.literal() for n in exp_inps[:3]))
        for n in exp_inps:
            a, b = n.path[0], n.path.reverse()[0]
            if a == b or filt.of_edge(a) != s.index or filt.of_edge(b) != s.index:
                problems.append(f"initial edges of {n.path.literal()} and its reverse are not distinct H_r edges")
        if inventory.truncated:
            problems.append("search budget exhausted")
        rep.add("eg-(i)", not problems, "bounded", f"H_{s.index} (paths <= {inventory.search_len})",
                problems[0] if problems else None)

    wit = _periodic_nielsen_witness(fmap, caps)
    rep.add("periodic-nielsen-period-one", wit is None, "bounded",
            f"paths <= {min(caps.nielsen_max_len, 5)}, periods <= 4", wit)


def _periodic_nielsen_witness(fmap, caps: Caps) -> str | None:
    max_len = min(caps.nielsen_max_len, 5)
    out_at: dict[str, list] = {}
    for e in fmap.letters:
        out_at.setdefault(e.origin, []).append(e)
    stack = [(e,) for e in fmap.letters]
    while stack:
        edges = stack.pop()
        p = EdgePath(edges, edges[0].origin)
        cur = p
        for k in range(1, 5):
            cur = fmap.f_sharp(cur)
            if len(cur) > 4 * max_len + 4 * fmap.L:
                break
            if cur.edges == p.edges and cur.start == p.start:
                if k > 1:
                    return f"{p.literal()} has period {k}"
                break
        if len(edges) < max_len:
            for e in out_at.get(edges[-1].terminus, ()):
                if e != ~edges[-1]:
                    stack.append(edges + (e,))
    return None


def seeds(fmap, r: int) -> list[EdgePath]:
    """Maximal subpaths of images of ``H_r`` edges that lie in ``G_{r-1}``."""
    filt = fmap.filtration
    strat = filt.stratum_of
    out = []
    seen = set()
    for n in filt[r].edges:
        img = fmap.image[fmap.graph.edge(n)]
        run: list = []
        start = None
        for idx, e in enumerate(list(img) + [None]):
            if e is not None and strat[e.name] < r:
                if not run:
                    start = idx
                run.append(e)
            else:
                if run:
                    seed = img[start:start + len(run)]
                    key = (seed.start, seed.edges)
                    if key not in seen:
                        seen.add(key)
                        out.append(seed)
                run = []
    return out


# -- the k1 iterate -------------------------------------------------------------------------


@dataclass
class PowerReport:
    k1: int | None
    instances: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"k1": self.k1, "instances": self.instances}


def _power_instances(fmap, f1, inventory, kmax: int) -> list[dict]:
    """Evaluate every clause of the iterate lemma for ``f1 = f_#^k``."""
    from ..nielsen_gep import NielsenKind
    from ..splitting import hard_split_verdict

    filt = fmap.filtration
    out = []

    def record(clause, subject, ok, detail=""):
        out.append({"clause": clause, "subject": subject, "passed": bool(ok), "detail": detail})

    for s in filt.exponential():
        r = s.index
        for n in inventory.of_weight(r):
            if n.kind is not NielsenKind.EXPONENTIAL:
                continue
            sigma = n.path
            for name in s.edges:
                e = fmap.graph.edge(name)
                img_len = len(f1.image[e])
                record("exp-1", f"|f1({name})| > |{sigma.literal()}|", img_len > len(sigma),
                       f"{img_len} vs {len(sigma)}")
            for lo in range(len(sigma)):
                for hi in range(lo + 1, len(sigma) + 1):
                    if hi - lo == len(sigma):
                        continue
                    sub = sigma[lo:hi]
                    img = f1.f_sharp(sub)
                    record("exp-2", f"f1#({sub.literal()}) is {r}-legal",
                           not illegal_turns_in(fmap, img, r), img.literal())
            for side, sub_iter in (("exp-3", (sigma[:c] for c in range(1, len(sigma)))),
                                   ("exp-4", (sigma[c:] for c in range(1, len(sigma))))):
                for sub in sub_iter:
                    anchor = sigma[0] if side == "exp-3" else sigma[-1]
                    head = fmap.image[anchor]
                    img = f1.f_sharp(sub)
                    ok = _anchored_split(fmap, img, head, side == "exp-3", kmax, hard_split_verdict)
                    record(side, f"f1#({sub.literal()}) splits at f({anchor})", ok, img.literal())

    for n in inventory.indivisible:
        if n.kind is not NielsenKind.PARABOLIC_EXCEPTIONAL or not _in_linear_image(fmap, n.path):
            continue
        parse = n.parse or {}
        sigma = n.path
        s_exp = abs(parse.get("s", 0))
        from ..nielsen_gep import linear_edges
        tau = linear_edges(fmap)[parse["left"]].tau if parse else None
        for side in ("lin-1", "lin-2"):
            subs = [sigma[:c] for c in range(1, len(sigma))] if side == "lin-1" else \
                   [sigma[c:] for c in range(1, len(sigma))]
            for sub in subs:
                img = f1.f_sharp(sub)
                ok = _eta_chain(fmap, img, tau, s_exp, side == "lin-1", kmax, hard_split_verdict)
                record(side, f"f1#({sub.literal()}) shows > {s_exp} copies of the Nielsen root",
                       ok, img.literal())
    return out


def _in_linear_image(fmap, path: EdgePath) -> bool:
    from ..nielsen_gep import linear_edges
    for name in linear_edges(fmap):
        img = fmap.image[fmap.graph.edge(name)].edges
        n = len(path)
        for i in range(len(img) - n + 1):
            if img[i:i + n] == path.edges:
                return True
    return False


def _anchored_split(fmap, img: EdgePath, head: EdgePath, at_left: bool, kmax, verdict) -> bool:
    """``img = head ⊙ rest`` (or the mirror), hardness judged for the original map."""
    n = len(head)
    if len(img) < n:
        return False
    if at_left:
        if img.edges[:n] != head.edges:
            return False
        return n == len(img) or verdict(fmap, img, n, kmax).hard
    if img.edges[len(img) - n:] != head.edges:
        return False
    return n == len(img) or verdict(fmap, img, len(img) - n, kmax).hard


def _eta_chain(fmap, img: EdgePath, tau: EdgePath | None, m: int, at_left: bool, kmax, verdict) -> bool:
    """``img = E ⊙ eta ⊙ ... ⊙ eta ⊙ xi`` with more than ``m`` visible copies (or the mirror)."""
    if tau is None:
        return False
    p = img if at_left else img.reverse()
    if not p:
        return False
    cuts = [1]
    pos = 1
    for eta in (tau, tau.reverse()):
        pos, cuts = 1, [1]
        while p.edges[pos:pos + len(eta)] == eta.edges:
            pos += len(eta)
            cuts.append(pos)
        if len(cuts) - 1 > m:
            break
    if len(cuts) - 1 <= m:
        return False
    return all(c == len(p) or verdict(fmap, p, c, kmax).hard for c in cuts)


def find_power_k1(fmap, caps: Caps | None = None) -> tuple[int, PowerReport]:
    """Least ``k1`` such that every clause of the iterate lemma holds for ``f_#^k1``."""
    from ..nielsen_gep import enumerate_nielsen
    from .graphmap import iterate_map

    caps = caps or fmap.caps
    inventory = enumerate_nielsen(fmap, caps=caps)
    if inventory.truncated:
        raise MissingInventory("Nielsen search was capped; k1 cannot be certified")
    last = None
    for k in range(1, caps.max_power + 1):
        f1 = iterate_map(fmap, k)
        inst = _power_instances(fmap, f1, inventory, caps.kmax)
        last = inst
        if all(i["passed"] for i in inst):
            return k, PowerReport(k, inst)
    raise CapExceeded(f"no k1 <= {caps.max_power} satisfies the iterate lemma; "
                      f"failing: {[i for i in (last or []) if not i['passed']][:1]}")


def k1_iterate(fmap, caps: Caps | None = None):
    """The certified iterate ``f_#^k1`` (flagged so that ΨEP recognition is allowed)."""
    from .graphmap import iterate_map
    k1, _ = find_power_k1(fmap, caps)
    return iterate_map(fmap, k1, k1_certified=True)


__all__ = ["Clause", "IrttReport", "verify_irtt", "seeds", "find_power_k1", "k1_iterate",
           "PowerReport"]
