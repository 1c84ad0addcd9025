"""Empirical checks of the beaded decomposition results at desk scale.

Every report here is "verified to depth d under caps"; none claims more.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..config import Caps
from ..core import EdgePath, canonical_orientation, path_key, sub_edge_paths
from ..errors import CapExceeded
from ..nielsen_gep import (is_gep, is_nielsen, linear_edges, split_into_indivisibles, _same_tau)
from ..splitting import maximal_hard_splitting
from ..traintrack.graphmap import iterate_map
from ..traintrack.irtt import find_power_k1
from .classify import BeadKind, beaded_decomposition
from .nibble import NibblePolicy, monochromatic_paths, nibbled_futures, sample_monochromatic


@dataclass(frozen=True)
class BeadParams:
    r: int
    J: int
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.r < 1 or self.J < 1:
            raise ValueError("r and J must be at least 1")

    def to_json(self) -> dict:
        return {"r": self.r, "J": self.J, "notes": list(self.notes)}


def working_map(fmap, r: int, caps: Caps | None = None):
    """``f_#^r`` flagged for ΨEP recognition when ``r`` is a multiple of the certified k1."""
    caps = caps or fmap.caps
    try:
        k1, _ = find_power_k1(fmap, caps)
    except CapExceeded:
        k1 = None
    certified = k1 is not None and r % k1 == 0
    return iterate_map(fmap.with_caps(caps), r, k1_certified=certified), k1


def find_bead_params(fmap, caps: Caps | None = None, depth: int | None = None,
                     samples: int | None = None, seed: int = 0) -> BeadParams:
    caps = caps or fmap.caps
    depth = caps.depth if depth is None else depth
    k1, _ = find_power_k1(fmap, caps)
    g = iterate_map(fmap.with_caps(caps), k1, k1_certified=True)
    J = 1
    count = 0
    for p in _mono(g, 1, depth, caps, samples, seed):
        res = beaded_decomposition(g, p, len(p), caps.kmax, evidence="generated")
        count += 1
        for b in res.beads:
            if b.kind in (BeadKind.ATOM, BeadKind.NIELSEN):
                J = max(J, len(b.path))
    notes = (f"r = k1 = {k1} from the iterate lemma clauses",
             f"J is the longest atom or Nielsen bead over {count} monochromatic paths "
             f"of depth <= {depth} ({'exhaustive' if samples is None else f'sampled({samples})'}); an empirical stand-in for the decomposition constant")
    return BeadParams(k1, J, notes)


@dataclass
class BdtReport:
    map_name: str
    params: BeadParams
    depth: int
    mode: str = "exhaustive"
    paths: int = 0
    bead_counts: dict = field(default_factory=lambda: {k.value: 0 for k in BeadKind})
    counterexample: dict | None = None

    @property
    def verified(self) -> bool:
        return self.counterexample is None

    def to_json(self) -> dict:
        return {"map": self.map_name, "params": self.params.to_json(), "depth": self.depth,
                "mode": self.mode, "verified": self.verified, "paths": self.paths, "bead_counts": self.bead_counts,
                "counterexample": self.counterexample}

    def render(self) -> str:
        head = (f"{self.map_name}: r={self.params.r}, J={self.params.J}, depth {self.depth}, "
                f"{self.paths} monochromatic paths ({self.mode})")
        counts = ", ".join(f"{k}={v}" for k, v in self.bead_counts.items())
        if self.verified:
            return f"{head}\nverified to depth {self.depth} under caps; beads: {counts}"
        ce = self.counterexample
        return f"{head}\nCOUNTEREXAMPLE: {ce['path']} (failing factor {ce['factor']})"


def _mono(fmap, r, depth, caps, samples, seed) -> list[EdgePath]:
    f = fmap.with_caps(caps)
    if samples is None:
        return [p for _, p in monochromatic_paths(f, r, depth, caps)]
    return sample_monochromatic(f, r, depth, samples, seed)


def verify_bdt(fmap, params: BeadParams, depth: int | None = None, caps: Caps | None = None,
               samples: int | None = None, seed: int = 0) -> BdtReport:
    """Beaded decomposition of every generated r-monochromatic path (or a seeded sample)."""
    caps = caps or fmap.caps
    depth = caps.depth if depth is None else depth
    g, _ = working_map(fmap, params.r, caps)
    rep = BdtReport(fmap.name, params, depth, mode="exhaustive" if samples is None else f"sampled({samples})")
    for p in _mono(fmap, params.r, depth, caps, samples, seed):
        rep.paths += 1
        res = beaded_decomposition(g, p, params.J, caps.kmax, evidence="generated")
        if not res.ok:
            rep.counterexample = {"path": p.literal(), "factor": res.failure.literal()}
            return rep
        for b in res.beads:
            rep.bead_counts[b.kind.value] += 1
    return rep


# -- first decomposition theorem ---------------------------------------------------------------


def gep_shapes(fmap) -> list[tuple]:
    """``(E_i, tau, E_j)`` for every pair of linear edges that can carry a GEP."""
    lin = linear_edges(fmap)
    out = []
    for x in lin.values():
        for y in lin.values():
            if _same_tau(x, y) and (x.exponent > 0) == (y.exponent > 0) and y.m > x.m:
                out.append((x.edge, x.oriented_tau(), y.edge))
    return out


def is_gep_fragment(fmap, path: EdgePath, shapes=None) -> bool:
    """``path`` or its reverse is a sub edge-path of some ``E_i ~tau^k ~E_j``, meeting a linear edge."""
    shapes = gep_shapes(fmap) if shapes is None else shapes
    for p in (path, path.reverse()):
        for left, tau, right in shapes:
            edges = p.edges
            lo, hi = 0, len(edges)
            has_end = False
            if edges and edges[0] == left:
                lo, has_end = 1, True
            if hi > lo and edges[-1] == ~right:
                hi, has_end = hi - 1, True
            if not has_end:
                continue
            mid = edges[lo:hi]
            if not mid:
                if lo == 1 and hi < len(edges):
                    continue
                return True
            bar = tau.reverse().edges
            big = bar * (len(mid) // len(bar) + 2)
            if lo == 1 and hi < len(edges):
                if len(mid) % len(bar) == 0 and big[:len(mid)] == mid:
                    return True
            elif lo == 1:
                if big[:len(mid)] == mid:
                    return True
            elif big[len(big) - len(mid):] == mid:
                return True
    return False


@dataclass
class DecompReport:
    map_name: str
    n: int
    steps: int
    mode: str = "exhaustive"
    v_hat: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)
    gep_future_factors: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)

    @property
    def monotone(self) -> bool:
        vals = [self.v_hat[m] for m in sorted(self.v_hat)]
        return all(a <= b for a, b in zip(vals, vals[1:]))

    @property
    def verified(self) -> bool:
        return self.monotone

    def to_json(self) -> dict:
        return {"map": self.map_name, "n": self.n, "steps": self.steps, "mode": self.mode,
                "verified": self.verified,
                "monotone": self.monotone, "V_hat": {str(k): v for k, v in self.v_hat.items()},
                "states": {str(k): v for k, v in self.states.items()},
                "gep_future_factors": {str(k): v for k, v in self.gep_future_factors.items()},
                "witness": {str(k): v for k, v in self.witness.items()}}

    def render(self) -> str:
        lines = [f"{self.map_name}: paths of length <= {self.n}, nibbled futures to step {self.steps} "
                 f"({self.mode})"]
        for m in sorted(self.v_hat):
            lines.append(f"  n={m}: V_hat={self.v_hat[m]} over {self.states[m]} states, "
                         f"{self.gep_future_factors[m]} GEP-future factors"
                         + (f" (longest short factor {self.witness[m]})" if self.witness.get(m) else ""))
        lines.append("monotone: " + ("yes" if self.monotone else "NO"))
        return "\n".join(lines)


def tight_paths(fmap, max_len: int):
    """Every tight path with 1..max_len edges, one per reversal class."""
    out_at: dict = {}
    for e in fmap.letters:
        out_at.setdefault(e.origin, []).append(e)
    seen = set()
    stack = [(e,) for e in reversed(fmap.letters)]
    while stack:
        edges = stack.pop()
        p = EdgePath(edges, edges[0].origin)
        c = canonical_orientation(p)
        key = (c.start, path_key(c))
        if key not in seen:
            seen.add(key)
            yield c
        if len(edges) < max_len:
            for e in reversed(out_at[edges[-1].terminus]):
                if e != ~edges[-1]:
                    stack.append(edges + (e,))


def _exhaustive_states(f, m: int, steps: int, caps: Caps) -> list[EdgePath]:
    seen = set()
    frontier = []
    for p in tight_paths(f, m):
        seen.add((p.start, path_key(p)))
        frontier.append(p)
    states = list(frontier)
    for _ in range(steps):
        nxt = []
        for p in frontier:
            for sub in sub_edge_paths(f.f_sharp(p)):
                c = canonical_orientation(sub)
                key = (c.start, path_key(c))
                if key not in seen:
                    seen.add(key)
                    if len(seen) > caps.max_paths:
                        raise CapExceeded(f"more than {caps.max_paths} nibbled futures")
                    nxt.append(c)
        states += nxt
        frontier = nxt
    return states


def _sampled_states(f, n: int, steps: int, samples: int, seed: int) -> dict[int, list[EdgePath]]:
    """Seeded random nibbling trajectories, grouped by the length of their start."""
    rng = random.Random(seed)
    by_len: dict[int, list[EdgePath]] = {}
    for p in tight_paths(f, n):
        by_len.setdefault(len(p), []).append(p)
    out: dict[int, list[EdgePath]] = {m: [] for m in range(1, n + 1)}
    for t in range(samples):
        m = 1 + t % n
        start = rng.choice(by_len[m])
        policy = NibblePolicy.seeded(rng.randrange(2 ** 31))
        for _, q, _ in nibbled_futures(f, start, steps, policy):
            out[m].append(q)
    return out


def verify_decomp_theorem(fmap, n: int, steps: int, caps: Caps | None = None,
                          samples: int | None = None, seed: int = 0) -> DecompReport:
    """Empirical ``V(n)``: the longest maximal-hard-splitting factor that is not a GEP future.

    Exhaustive over all tight paths of length <= n and all nibbled futures
    unless ``samples`` asks for seeded random trajectories instead.
    """
    caps = caps or fmap.caps
    f = fmap.with_caps(caps)
    shapes = gep_shapes(f)
    rep = DecompReport(fmap.name, n, steps, mode="exhaustive" if samples is None else f"sampled({samples})")
    factor_cache: dict = {}
    sampled = None if samples is None else _sampled_states(f, n, steps, samples, seed)
    pool: list[EdgePath] = []
    for m in range(1, n + 1):
        if sampled is None:
            states = _exhaustive_states(f, m, steps, caps)
        else:
            # nested sets: starts of length <= m
            pool += sampled[m]
            states = pool
        v_hat, gep_count, wit = 0, 0, None
        for p in states:
            key = (p.start, path_key(p))
            if key not in factor_cache:
                factor_cache[key] = maximal_hard_splitting(f, p, caps.kmax).factors
            for q in factor_cache[key]:
                if is_gep_fragment(f, q, shapes):
                    gep_count += 1
                elif len(q) > v_hat:
                    v_hat, wit = len(q), q.literal()
        rep.v_hat[m] = v_hat
        rep.states[m] = len(states)
        rep.gep_future_factors[m] = gep_count
        rep.witness[m] = wit
    return rep


# -- splitting after iteration ----------------------------------------------------------------


def _menu_kind(fmap, q: EdgePath, r: int) -> str | None:
    """Which clause of the four-clause menu a factor meets, if any."""
    w = fmap.filtration.weight(q)
    if w < r:
        return "lower"
    if w != r:
        return None
    if len(q) == 1:
        return "edge"
    if is_gep(fmap, q) is not None:
        return "gep"
    if is_nielsen(fmap, q):
        pieces = split_into_indivisibles(fmap, q)
        if pieces is not None and len(pieces) == 1:
            return "nielsen"
    return None


def split_after_iteration(fmap, path: EdgePath, caps: Caps | None = None):
    """Least ``i`` such that ``f_#^i(path)`` hard-splits into menu factors."""
    caps = caps or fmap.caps
    r = fmap.filtration.weight(path)
    cur = path
    for i in range(caps.horizon + 1):
        if i:
            cur = fmap.f_sharp(cur)
        dec = maximal_hard_splitting(fmap, cur, caps.kmax)
        kinds = [_menu_kind(fmap, q, r) for q in dec.factors]
        if all(kinds):
            return i, type(dec)(dec.path, dec.positions, dec.verdicts, tuple(kinds))
    raise CapExceeded(f"no splitting into menu factors within {caps.horizon} iterations")


# -- refinements ----------------------------------------------------------------------------


@dataclass
class SubReport:
    name: str
    passed: bool = True
    instances: int = 0
    detail: str = ""
    witness: str | None = None

    def fail(self, witness: str) -> None:
        if self.passed:
            self.passed, self.witness = False, witness

    def to_json(self) -> dict:
        return {"check": self.name, "passed": self.passed, "instances": self.instances,
                "detail": self.detail, "witness": self.witness}


@dataclass
class RefinementReport:
    map_name: str
    params: BeadParams
    subs: list[SubReport] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return all(s.passed for s in self.subs)

    def to_json(self) -> dict:
        return {"map": self.map_name, "params": self.params.to_json(), "verified": self.verified,
                "checks": [s.to_json() for s in self.subs]}

    def render(self) -> str:
        lines = [f"{self.map_name}: refinements with r={self.params.r}, J={self.params.J}"]
        for s in self.subs:
            mark = "pass" if s.passed else "FAIL"
            lines.append(f"  {mark} ({s.name}) {s.instances} instances; {s.detail}"
                         + (f"; witness: {s.witness}" if s.witness else ""))
        return "\n".join(lines)


# longest future followed by refinement checks (a) and (d)
FUTURE_LEN_CAP = 256


def _bead_at(result, pos: int):
    """The bead of a beaded decomposition covering edge position ``pos``."""
    start = 0
    for b in result.beads:
        if start <= pos < start + len(b.path):
            return b
        start += len(b.path)
    return None


def verify_refinements(fmap, params: BeadParams, caps: Caps | None = None,
                       depth: int | None = None, trajectories: int = 1000,
                       seed: int = 0, samples: int | None = None) -> RefinementReport:
    caps = caps or fmap.caps
    depth = caps.depth if depth is None else depth
    g, _ = working_map(fmap, params.r, caps)
    omega = fmap.filtration.omega
    rep = RefinementReport(fmap.name, params)
    mono = _mono(fmap, params.r, depth, caps, samples, seed)
    decomp_cache: dict = {}

    def decompose(p: EdgePath):
        key = (p.start, p.edges)
        if key not in decomp_cache:
            decomp_cache[key] = beaded_decomposition(g, p, params.J, caps.kmax, evidence="generated")
        return decomp_cache[key]

    # (a) weight-persistent edges end up displayed in a Nielsen path, GEP, ΨEP or single edge
    a = SubReport("a")
    horizon = min(caps.horizon, 4)
    d1 = 0
    truncated = 0
    for idx, p in enumerate(mono):
        last_bad = -1
        for step, q, forest in nibbled_futures(g, p, horizon, NibblePolicy.entire(),
                                               tightening_seed=seed + idx):
            if not q:
                break
            if len(q) > FUTURE_LEN_CAP:
                # exponential growth: stop following this future
                truncated += 1
                break
            a.instances += 1
            if not forest.weights_nonincreasing():
                a.fail(f"weights increase along the past of {q.literal()}")
            res = decompose(q)
            if not res.ok:
                last_bad = step
                continue
            for pos in range(len(q)):
                past = forest.past(step, pos)
                if any(nd.weight != past[-1].weight for nd in past):
                    continue
                b = _bead_at(res, pos)
                if b.kind is BeadKind.ATOM and len(b.path) > 1:
                    last_bad = step
                    break
        if last_bad == horizon:
            a.fail(f"future of {p.literal()} still has a persistent edge in a long atom at step {horizon}")
        d1 = max(d1, last_bad + 1)
    a.detail = (f"empirical D1 = {d1} over horizon {horizon} (randomized tightening replay"
                + (f"; {truncated} futures stopped beyond {FUTURE_LEN_CAP} edges)" if truncated else ")"))
    rep.subs.append(a)

    # (b) displayed ΨEPs longer than J number fewer than 2 omega per path
    b = SubReport("b")
    worst = 0
    for p in mono:
        res = decompose(p)
        b.instances += 1
        if not res.ok:
            b.fail(f"{p.literal()} is not beaded")
            continue
        long_peps = sum(1 for x in res.beads if x.kind is BeadKind.PEP and len(x.path) > params.J)
        worst = max(worst, long_peps)
        if long_peps >= 2 * omega:
            b.fail(f"{p.literal()} displays {long_peps} long ΨEPs")
    b.detail = f"max long ΨEPs per path = {worst} < 2*omega = {2 * omega}"
    rep.subs.append(b)

    # (c) atoms reach the displayed-edge dichotomy within omega applications of the D1 iterate
    c = SubReport("c")
    step_k = max(d1, 1)
    atoms = {}
    for p in mono:
        res = decompose(p)
        for x in res.beads:
            if x.kind is BeadKind.ATOM:
                atoms[(x.path.start, x.path.edges)] = x.path
    worst_t = 0
    for atom in atoms.values():
        c.instances += 1
        cur = atom
        reached = None
        for t in range(omega + 1):
            if t:
                cur = g.f_sharp(cur, step_k)
            if not cur:
                reached = t
                break
            res = decompose(cur)
            if not res.ok:
                continue
            kinds = {x.kind for x in res.beads}
            if kinds <= {BeadKind.NIELSEN, BeadKind.GEP} or \
                    any(len(x.path) == 1 and x.kind is BeadKind.ATOM for x in res.beads):
                reached = t
                break
        if reached is None:
            c.fail(f"atom {atom.literal()} does not reach the dichotomy within {omega} steps")
        else:
            worst_t = max(worst_t, reached)
    c.detail = f"max applications needed = {worst_t} <= omega = {omega}"
    rep.subs.append(c)

    # (d) beadedness survives random nibbling
    d = SubReport("d")
    rng = random.Random(seed)
    stopped = 0
    for t in range(trajectories):
        p = mono[rng.randrange(len(mono))]
        policy = NibblePolicy.seeded(rng.randrange(2 ** 31))
        for step, q, _ in nibbled_futures(g, p, rng.randint(1, 3), policy):
            if not q:
                break
            if len(q) > FUTURE_LEN_CAP:
                stopped += 1
                break
            d.instances += 1
            res = decompose(q)
            if not res.ok:
                d.fail(f"nibbled future {q.literal()} of {p.literal()} (step {step}) is not beaded")
                break
        if not d.passed:
            break
    d.detail = f"{trajectories} seeded trajectories" + (
        f" ({stopped} stopped beyond {FUTURE_LEN_CAP} edges)" if stopped else "")
    rep.subs.append(d)
    return rep


__all__ = ["BeadParams", "find_bead_params", "verify_bdt", "BdtReport", "gep_shapes",
           "is_gep_fragment", "verify_decomp_theorem", "DecompReport", "tight_paths",
           "split_after_iteration", "verify_refinements", "RefinementReport", "SubReport",
           "working_map"]
