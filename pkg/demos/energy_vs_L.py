"""E0(L) for the harmonic oscillator in both boundary modes.

The confinement curve has a minimum; the periodic curve crosses the exact value
and flattens at an inflection. Prints a coarse table and the detected features.

    python demos/energy_vs_L.py [N]
"""

import sys

from vism import PotentialSpec, PrecisionContext, to_decimal
from vism.optimize import scan_E_vs_L, scan_features

N = int(sys.argv[1]) if len(sys.argv) > 1 else 3
ctx = PrecisionContext(30)
pot = PotentialSpec.parse("x^2")

scans = {mode: scan_E_vs_L(pot, mode, N, 0, ("1.5", "6"), 31, ctx) for mode in ("periodic", "confinement")}
print(f"{'L':>6}  {'periodic':>22}  {'confinement':>22}")
for (L, ep), (_, ec) in zip(scans["periodic"], scans["confinement"]):
    print(f"{to_decimal(L, 4):>6}  {to_decimal(ep, 16):>22}  {to_decimal(ec, 16):>22}")
for mode, scan in scans.items():
    feats = scan_features(scan, ctx)
    Ls = feats["L"]
    minima = [to_decimal(Ls[i], 4) for i in feats["minima"]]
    bends = [f"{to_decimal(Ls[i], 4)}..{to_decimal(Ls[j], 4)}" for i, j in feats["inflections"]]
    print(f"{mode}: minima near {minima or '-'}, curvature changes sign in {bends or '-'}")
