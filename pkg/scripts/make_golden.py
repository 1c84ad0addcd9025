"""Regenerate the golden JSON outputs under docs/golden from the CLI."""
from __future__ import annotations

import argparse
import contextlib
import io
from pathlib import Path

from beadtrack.cli import run

ROOT = Path(__file__).resolve().parent.parent

# name -> argv; every entry is checked byte-for-byte by the test suite
GOLDEN = {
    "analyze_example": ["analyze", "example", "--json"],
    "verify_irtt_broken": ["verify-irtt", "broken", "--json"],
    "tighten_example": ["tighten", "example", "--path", "E1 ~E1", "--json"],
    "image_example": ["image", "example", "--path", "E3 E2 ~E1", "-k", "2", "--json"],
    "split_example": ["split", "example", "--path", "E3 E2 ~E1", "--kmax", "4", "--json"],
    "nielsen_example": ["nielsen", "example", "--max-len", "5", "--json"],
    "geps_linear": ["geps", "linear", "--path", "E ~a ~F", "--steps", "3", "--json"],
    "peps_linear": ["peps", "linear", "--path", "E ~a ~a ~a", "--json"],
    "beads_tower": ["beads", "linear_tower", "--path", "X E ~a ~F", "--json"],
    "trace_example": ["trace", "example", "--path", "E3", "--steps", "2", "--json"],
    "verify_bdt_example": ["verify-bdt", "example", "--r", "1", "--J", "1", "--depth", "3", "--json"],
    "find_power_exp_inp": ["find-power", "exp_inp", "--json"],
}


def render(argv: list[str]) -> tuple[int, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = run(argv)
    return code, buf.getvalue()


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "docs" / "golden")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, argv in GOLDEN.items():
        code, text = render(argv)
        (args.out / f"{name}.json").write_text(text)
        print(f"{name}: exit {code}")


if __name__ == "__main__":
    main()
