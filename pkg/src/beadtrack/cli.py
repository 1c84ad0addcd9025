"""Command-line front end.

Exit codes: 0 success or verified, 1 property violated, 2 input error,
3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import DEFAULT_CAPS, Caps
from .errors import BeadtrackError, CapExceeded, InputError, InvalidMap, NotIterated
from .traintrack.graphmap import bundled_names, iterate_map, load_bundled, load_ttm

OK, VIOLATED, INPUT_ERROR, CAP_EXCEEDED = 0, 1, 2, 3


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def load_map(source: str, caps: Caps):
    """A .ttm file on disk, else a bundled map by name (with or without the suffix)."""
    p = Path(source)
    if p.is_file():
        return load_ttm(p, caps)
    name = p.name[:-4] if p.name.endswith(".ttm") else p.name
    if name in bundled_names():
        return load_bundled(name, caps)
    raise InputError(f"no such map file or bundled map: {source} (bundled: {', '.join(bundled_names())})")


class Output:
    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.lines: list[str] = []
        self.payload: dict = {}

    def text(self, line: str = "") -> None:
        self.lines.append(line)

    def emit(self) -> None:
        if self.as_json:
            sys.stdout.write(json.dumps(self.payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
        else:
            sys.stdout.write("\n".join(self.lines) + ("\n" if self.lines else ""))


def _need_path(args, fmap):
    if args.path is None:
        raise InputError("this subcommand needs --path")
    return fmap.parse(args.path, args.at)


# -- subcommands ------------------------------------------------------------------------------


def cmd_analyze(fmap, args, out: Output) -> int:
    from .traintrack.turns import all_turns, is_legal_turn
    filt = fmap.filtration
    strata = [s.to_json() for s in filt.strata]
    turns = []
    for t in all_turns(fmap):
        legal, orbit = is_legal_turn(fmap, t)
        turns.append({"turn": str(t), "legal": legal, "orbit": [str(x) for x in orbit]})
    out.payload = {"map": fmap.name, "L": fmap.L, "omega": filt.omega, "strata": strata,
                   "turns": turns}
    out.text(fmap.describe())
    out.text(f"L = {fmap.L}, omega = {filt.omega}")
    for s in filt.strata:
        extra = f" suffix {s.suffix.literal()}" if s.suffix is not None else ""
        out.text(f"H_{s.index} {{{', '.join(s.edges)}}} {s.kind.value} M={s.matrix} "
                 f"lambda in [{float(s.lambda_lo):.6f}, {float(s.lambda_hi):.6f}] "
                 f"aperiodic={s.aperiodic}{extra}")
    out.text("illegal turns: " + (", ".join(x["turn"] for x in turns if not x["legal"]) or "none"))
    return OK


def cmd_verify_irtt(fmap, args, out: Output) -> int:
    from .traintrack.irtt import verify_irtt
    rep = verify_irtt(fmap, exact_only=args.exact_only)
    out.payload = rep.to_json()
    out.text(rep.render())
    return OK if rep.ok else VIOLATED


def cmd_tighten(fmap, args, out: Output) -> int:
    from .core import tighten
    p = _need_path(args, fmap)
    t = tighten(p)
    out.payload = {"input": p.literal(), "tight": t.literal(), "vertex": t.start}
    out.text(str(t))
    return OK


def cmd_image(fmap, args, out: Output) -> int:
    p = _need_path(args, fmap)
    k = args.k
    raw = fmap.raw_power(p, k)
    sharp = fmap.f_sharp(p, k)
    out.payload = {"input": p.literal(), "k": k, "raw": raw.literal(), "tight": sharp.literal()}
    out.text(f"f^{k} raw: {raw}")
    out.text(f"f_#^{k}:   {sharp}")
    return OK


def cmd_split(fmap, args, out: Output) -> int:
    from .splitting import all_verdicts, maximal_hard_splitting
    p = _need_path(args, fmap)
    dec = maximal_hard_splitting(fmap, p, args.kmax)
    verdicts = all_verdicts(fmap, p, args.kmax)
    rows = [dict(pos=q, **verdicts[q].to_json()) for q in sorted(verdicts)]
    out.payload = {"path": p.literal(), "factors": [f.literal() for f in dec.factors],
                   "verdicts": rows}
    out.text("factors: " + " ⊙ ".join(f"[{f.literal()}]" for f in dec.factors))
    for q in sorted(verdicts):
        v = verdicts[q]
        wit = f" witness k={v.witness.k} i={v.witness.i} j={v.witness.j}" if v.witness else ""
        out.text(f"  pos {q}: {v}{wit}")
    return OK


def cmd_nielsen(fmap, args, out: Output) -> int:
    from .nielsen_gep import enumerate_nielsen
    inv = enumerate_nielsen(fmap, max_len=args.max_len)
    out.payload = inv.to_json()
    out.text(f"indivisible Nielsen paths of {fmap.name} (length <= {inv.max_len}, up to reversal):")
    for n in inv.indivisible:
        out.text(f"  {n.path.literal()}  [{n.kind.value}, weight {n.weight}]")
    if inv.truncated:
        out.text("search truncated by max_paths")
    return OK


def cmd_geps(fmap, args, out: Output) -> int:
    from .beads.verify import gep_shapes
    from .nielsen_gep import is_gep
    if args.path is not None:
        p = fmap.parse(args.path, args.at)
        g = is_gep(fmap, p)
        if g is None:
            out.payload = {"path": p.literal(), "gep": None}
            out.text(f"{p.literal()} is not a GEP")
            return OK
        chain = []
        cur = g
        for _ in range(args.steps + 1):
            chain.append(cur.oriented().literal())
            cur = cur.successor()
        out.payload = {"path": p.literal(), "gep": g.to_json(), "futures": chain}
        out.text(f"GEP {g.normal_form().literal()} (m_i={g.m_i}, m_j={g.m_j}, k={g.k})")
        for i, c in enumerate(chain):
            out.text(f"  f_#^{i}: {c}")
        return OK
    shapes = gep_shapes(fmap)
    out.payload = {"shapes": [{"E_i": a.name, "tau": t.literal(), "E_j": b.name} for a, t, b in shapes]}
    out.text("GEP shapes E_i ~tau^k ~E_j:" if shapes else "no GEPs")
    for a, t, b in shapes:
        out.text(f"  E_i={a} tau={t.literal()} E_j={b}")
    return OK


def _k1_map(fmap, args):
    from .traintrack.irtt import find_power_k1
    if args.assume_iterated:
        return iterate_map(fmap, 1, k1_certified=True), None
    k1, _ = find_power_k1(fmap)
    return iterate_map(fmap, k1, k1_certified=True), k1


def cmd_peps(fmap, args, out: Output) -> int:
    from .nielsen_gep import is_pep, pep_step
    p = _need_path(args, fmap)
    g, k1 = _k1_map(fmap, args)
    pep = is_pep(g, p)
    if pep is None:
        out.payload = {"path": p.literal(), "k1": k1, "pep": None}
        out.text(f"{p.literal()} is not a ΨEP for {g.name}")
        return OK
    steps = []
    cur = pep
    ok = True
    for _ in range(args.steps):
        st = pep_step(g, cur, nibble=args.nibble, kmax=args.kmax)
        steps.append(st.to_json())
        ok &= st.agrees
        if st.successor is None:
            break
        cur = st.successor
    out.payload = {"path": p.literal(), "k1": k1, "pep": pep.to_json(), "steps": steps}
    out.text(f"ΨEP {pep.normal_form().literal()} ({pep.form}) for {g.name}")
    for i, s in enumerate(steps, 1):
        out.text(f"  step {i}: {s['form']} predicted {s['predicted']} direct {s['direct']}"
                 f"{'' if s['agrees'] else '  MISMATCH'}")
    return OK if ok else VIOLATED


def cmd_mono(fmap, args, out: Output) -> int:
    from .beads.nibble import monochromatic_paths
    rows = [(d, p) for d, p in monochromatic_paths(fmap, args.r, args.depth)]
    out.payload = {"r": args.r, "depth": args.depth,
                   "paths": [{"depth": d, "path": p.literal()} for d, p in rows]}
    for d, p in rows:
        out.text(f"{d} {p.literal()}")
    return OK


def cmd_beads(fmap, args, out: Output) -> int:
    from .beads.classify import beaded_decomposition
    from .beads.verify import working_map
    p = _need_path(args, fmap)
    g, _ = working_map(fmap, args.r)
    res = beaded_decomposition(g, p, args.J, args.kmax)
    out.payload = res.to_json()
    out.text(res.render())
    return OK if res.ok else VIOLATED


def cmd_find_params(fmap, args, out: Output) -> int:
    from .beads.verify import find_bead_params
    params = find_bead_params(fmap, depth=args.depth, samples=args.samples, seed=args.seed)
    out.payload = params.to_json()
    out.text(f"r = {params.r}, J = {params.J}")
    for n in params.notes:
        out.text(f"  {n}")
    return OK


def cmd_verify_bdt(fmap, args, out: Output) -> int:
    from .beads.verify import BeadParams, verify_bdt
    rep = verify_bdt(fmap, BeadParams(args.r, args.J), args.depth, samples=args.samples, seed=args.seed)
    out.payload = rep.to_json()
    out.text(rep.render())
    return OK if rep.verified else VIOLATED


def cmd_verify_decomp(fmap, args, out: Output) -> int:
    from .beads.verify import verify_decomp_theorem
    rep = verify_decomp_theorem(fmap, args.n, args.steps, samples=args.samples, seed=args.seed)
    out.payload = rep.to_json()
    out.text(rep.render())
    return OK if rep.verified else VIOLATED


def cmd_verify_refinements(fmap, args, out: Output) -> int:
    from .beads.verify import BeadParams, verify_refinements
    rep = verify_refinements(fmap, BeadParams(args.r, args.J), depth=args.depth,
                             trajectories=args.trajectories, seed=args.seed, samples=args.samples)
    out.payload = rep.to_json()
    out.text(rep.render())
    return OK if rep.verified else VIOLATED


def cmd_trace(fmap, args, out: Output) -> int:
    from .beads.nibble import NibbleKind, NibblePolicy, nibbled_futures
    p = _need_path(args, fmap)
    kind = NibbleKind(args.policy)
    if kind is NibbleKind.EXHAUSTIVE:
        raise InputError("trace follows a single trajectory; use another policy")
    policy = NibblePolicy(kind, args.trim, seed=args.seed)
    stream = list(nibbled_futures(fmap, p, args.steps, policy, tightening_seed=args.tightening_seed))
    forest = stream[-1][2]
    paths = [q for _, q, _ in stream]
    out.payload = {"paths": [q.literal() for q in paths], "forest": forest.to_json()}
    out.text(forest.render(paths))
    return OK


def cmd_find_power(fmap, args, out: Output) -> int:
    from .traintrack.irtt import find_power_k1
    k1, rep = find_power_k1(fmap)
    out.payload = rep.to_json()
    out.text(f"k1 = {k1} ({len(rep.instances)} clause instances)")
    for i in rep.instances:
        out.text(f"  {'pass' if i['passed'] else 'FAIL'} {i['clause']}: {i['subject']}")
    return OK


COMMANDS = {
    "analyze": (cmd_analyze, "filtration, strata and turn tables"),
    "verify-irtt": (cmd_verify_irtt, "check the improved relative train track clauses"),
    "tighten": (cmd_tighten, "tighten a path"),
    "image": (cmd_image, "raw and tightened images of a path"),
    "split": (cmd_split, "maximal hard splitting with per-position verdicts"),
    "nielsen": (cmd_nielsen, "indivisible Nielsen path inventory"),
    "geps": (cmd_geps, "GEP shapes, or the future of a given GEP"),
    "peps": (cmd_peps, "recognize a ΨEP and follow its step law"),
    "mono": (cmd_mono, "generate r-monochromatic paths"),
    "beads": (cmd_beads, "beaded decomposition of a path"),
    "find-params": (cmd_find_params, "empirical bead parameters r and J"),
    "verify-bdt": (cmd_verify_bdt, "beaded decomposition of every monochromatic path"),
    "verify-decomp": (cmd_verify_decomp, "first decomposition theorem dichotomy"),
    "verify-refinements": (cmd_verify_refinements, "refinement checks (a)-(d)"),
    "trace": (cmd_trace, "family forest of a nibbling trajectory"),
    "find-power": (cmd_find_power, "least k1 for the iterate lemma"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="beadtrack", description="Train track maps and beaded decompositions.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("map", help=".ttm file or bundled map name")
        p.add_argument("--json", action="store_true", help="emit JSON")
        p.add_argument("--power", type=_positive, default=1, help="work with the iterate f_#^POWER")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--word-cap", type=_positive)
        p.add_argument("--verdict-cap", type=_positive)
        p.add_argument("--horizon", type=_positive)
        p.add_argument("--max-paths", type=_positive)
        p.add_argument("--max-power", type=_positive)
        p.add_argument("--kmax", type=_positive, default=None)
        p.add_argument("--max-len", type=_positive, default=None)
        if name in ("tighten", "image", "split", "geps", "peps", "beads", "trace"):
            p.add_argument("--path", help="edge literal such as 'E3 E2 ~E1'")
            p.add_argument("--at", help="base vertex for an empty path")
        if name == "verify-irtt":
            p.add_argument("--exact-only", action="store_true")
        if name == "image":
            p.add_argument("-k", type=_nonnegative, default=1, help="number of applications")
        if name in ("geps", "peps", "trace", "verify-decomp"):
            p.add_argument("--steps", type=_nonnegative, default=4)
        if name == "peps":
            p.add_argument("--nibble", type=_nonnegative, default=0)
            p.add_argument("--assume-iterated", action="store_true")
        if name in ("mono", "beads", "verify-bdt", "verify-refinements"):
            p.add_argument("--r", type=_positive, default=1)
        if name in ("beads", "verify-bdt", "verify-refinements"):
            p.add_argument("--J", type=_positive, default=1)
        if name in ("mono", "find-params", "verify-bdt", "verify-refinements"):
            p.add_argument("--depth", type=_nonnegative, default=DEFAULT_CAPS.depth)
        if name in ("find-params", "verify-bdt", "verify-decomp", "verify-refinements"):
            p.add_argument("--samples", type=_positive, default=None,
                           help="seeded random sample instead of exhaustive generation")
        if name == "verify-decomp":
            p.add_argument("--n", type=_positive, default=2)
        if name == "verify-refinements":
            p.add_argument("--trajectories", type=_positive, default=1000)
        if name == "trace":
            p.add_argument("--policy", default="Entire",
                           choices=[k for k in ("Entire", "LeftOnly", "RightOnly", "BothEnds", "Seeded")])
            p.add_argument("--trim", type=_nonnegative, default=1)
            p.add_argument("--tightening-seed", type=int, default=None)
    return ap


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    caps = DEFAULT_CAPS.with_(word_cap=args.word_cap, verdict_cap=args.verdict_cap,
                              horizon=args.horizon, max_paths=args.max_paths,
                              max_power=args.max_power, kmax=args.kmax,
                              nielsen_max_len=args.max_len)
    out = Output(args.json)
    handler = COMMANDS[args.command][0]
    try:
        fmap = load_map(args.map, caps)
        if args.power > 1:
            fmap = iterate_map(fmap, args.power)
        code = handler(fmap, args, out)
    except CapExceeded as e:
        return _fail(out, CAP_EXCEEDED, "CapExceeded", e)
    except NotIterated as e:
        return _fail(out, INPUT_ERROR, "NotIterated", e)
    except (InputError, InvalidMap, OSError) as e:
        return _fail(out, INPUT_ERROR, type(e).__name__, e)
    except BeadtrackError as e:
        return _fail(out, INPUT_ERROR, type(e).__name__, e)
    out.emit()
    return code


def _fail(out: Output, code: int, kind: str, err: Exception) -> int:
    if out.as_json:
        out.payload = {"error": kind, "message": str(err)}
        out.emit()
    else:
        sys.stderr.write(f"{kind}: {err}\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
