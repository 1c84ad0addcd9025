"""Search small rose maps for exponential strata carrying an indivisible Nielsen path.

Prints candidate maps in .ttm form together with the Nielsen path and k1.
"""
from __future__ import annotations

import argparse
import itertools

from beadtrack.config import Caps
from beadtrack.core import MarkedGraph, reduce_word
from beadtrack.errors import BeadtrackError
from beadtrack.nielsen_gep import NielsenKind, enumerate_nielsen
from beadtrack.traintrack.graphmap import GraphMap
from beadtrack.traintrack.irtt import find_power_k1, verify_irtt


def words(letters, n):
    for w in itertools.product(letters, repeat=n):
        if len(reduce_word(w)) == n:
            yield w


def candidates(names, max_img):
    g = MarkedGraph.rose(names)
    letters = g.oriented_edges()
    pool = [w for n in range(1, max_img + 1) for w in words(letters, n)]
    for imgs in itertools.product(pool, repeat=len(names)):
        yield g, imgs


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--edges", type=int, default=3)
    ap.add_argument("--max-img", type=int, default=3)
    ap.add_argument("--limit", type=int, default=5)
    ap.add_argument("--min-k1", type=int, default=2)
    args = ap.parse_args(argv)
    caps = Caps(nielsen_max_len=6, exp_search_len=6, max_power=6)
    names = [chr(ord("a") + i) for i in range(args.edges)]
    hits = 0
    for g, imgs in candidates(names, args.max_img):
        from beadtrack.core import EdgePath
        try:
            f = GraphMap(g, {n: EdgePath(w, "v") for n, w in zip(names, imgs)}, caps=caps)
            if not f.filtration.exponential() or not verify_irtt(f, exact_only=True).exact_ok:
                continue
            inv = enumerate_nielsen(f)
            exp = [n for n in inv.indivisible if n.kind is NielsenKind.EXPONENTIAL]
            if not exp:
                continue
            k1, _ = find_power_k1(f)
        except BeadtrackError:
            continue
        if k1 < args.min_k1:
            continue
        hits += 1
        print("# k1 =", k1, "INP:", ", ".join(n.path.literal() for n in exp))
        for n, w in zip(names, imgs):
            print(f"map {n} = {EdgePath(w, 'v').literal()}")
        print()
        if hits >= args.limit:
            break
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
