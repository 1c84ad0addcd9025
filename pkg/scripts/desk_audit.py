"""Run the main verifiers over every bundled map (or the named ones) and print a summary table."""
from __future__ import annotations

import argparse
import time

from beadtrack import load_bundled
from beadtrack.beads import find_bead_params, verify_bdt, verify_refinements
from beadtrack.beads.verify import verify_decomp_theorem
from beadtrack.errors import BeadtrackError
from beadtrack.traintrack import verify_irtt
from beadtrack.traintrack.graphmap import bundled_names

# exponential maps explode under exhaustive generation
EXHAUSTIVE = {"example", "identity_rose", "linear", "broken"}


def audit(name: str, depth: int, samples: int, seed: int) -> list[str]:
    f = load_bundled(name)
    s = None if name in EXHAUSTIVE else samples
    t = time.perf_counter()
    row = [name]
    irtt = verify_irtt(f)
    row.append("irtt " + ("ok" if irtt.ok else "exact-ok" if irtt.exact_ok else "FAIL"))
    try:
        params = find_bead_params(f, depth=depth, samples=s, seed=seed)
    except BeadtrackError as exc:
        return row + [f"params: {type(exc).__name__}"]
    row.append(f"r={params.r} J={params.J}")
    bdt = verify_bdt(f, params, depth, samples=s, seed=seed)
    row.append("bdt " + ("ok" if bdt.verified else "COUNTEREXAMPLE"))
    dec = verify_decomp_theorem(f, 3, 4, samples=s, seed=seed)
    row.append(f"V_hat {[dec.v_hat[m] for m in sorted(dec.v_hat)]}")
    ref = verify_refinements(f, params, depth=depth, trajectories=1000, seed=seed, samples=s)
    row.append("refinements " + ("ok" if ref.verified else "FAIL"))
    row.append("exhaustive" if s is None else f"sampled({s})")
    row.append(f"{time.perf_counter() - t:.1f}s")
    return row


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("maps", nargs="*", help="bundled map names (default: all)")
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--samples", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for name in args.maps or bundled_names():
        print("  ".join(audit(name, args.depth, args.samples, args.seed)), flush=True)


if __name__ == "__main__":
    main()
