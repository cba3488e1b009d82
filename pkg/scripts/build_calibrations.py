"""Regenerate the built-in L-hat anchor tables shipped in ``vism/data``.

Usage: python scripts/build_calibrations.py {sho,quartic,cosine} [--jobs K]

Each anchor is located with the periodic inflection criterion at a precision
that grows with N, so the curvature of E(L) stays above round-off. Anchors that
fail, or that exceed the L-hat of a larger N, are logged and left out.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from vism.errors import VismError
from vism.numeric import PrecisionContext, to_decimal
from vism.optimize import Method, find_L_hat, write_anchors
from vism.potential import PotentialSpec

DATA = Path(__file__).resolve().parents[1] / "src" / "vism" / "data"

# (potential, anchor N values, cap on working digits)
TABLES = {
    "sho": ("x^2", list(range(1, 33)) + list(range(35, 101, 5)) + [101], None),
    "quartic": ("x^2 + 0.1*x^4", list(range(1, 21)) + list(range(25, 71, 5)) + [61], None),
    "cosine": ("x^2 + 10*cos(10*pi*x)", list(range(1, 21)) + list(range(25, 151, 5)) + [151], 80),
}


def digits_for(N: int, cap: int | None = None) -> int:
    d = max(30, int(1.6 * N) + 24)
    return min(d, cap) if cap else d


def one(args):
    potential, N, cap = args
    ctx = PrecisionContext(digits_for(N, cap))
    try:
        anchor = find_L_hat(PotentialSpec.parse(potential), Method.ENERGY_INFLECTION_PERIODIC, N, ctx=ctx)
    except VismError as exc:
        print(f"{potential}: N={N} failed: {exc}", file=sys.stderr, flush=True)
        return None
    print(f"{potential}: N={N} L_hat={to_decimal(anchor.L_hat, 12)}", file=sys.stderr, flush=True)
    return anchor


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("table", choices=sorted(TABLES))
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args(argv)
    potential, Ns, cap = TABLES[args.table]
    Ns = sorted(set(Ns))
    with ProcessPoolExecutor(args.jobs) as pool:
        found = [a for a in pool.map(one, [(potential, N, cap) for N in Ns]) if a is not None]
    # keep the large-N end intact: that is where extrapolation starts and where the
    # cosine table's resolved branch lives, below the under-resolved plateau values
    anchors = []
    for a in reversed(found):
        if anchors and a.L_hat > anchors[-1].L_hat:
            print(f"dropping N={a.N}: L_hat above N={anchors[-1].N}", file=sys.stderr)
            continue
        anchors.append(a)
    anchors.reverse()
    (DATA / f"{args.table}.csv").write_text(write_anchors(anchors, digits=20))


if __name__ == "__main__":
    main()
