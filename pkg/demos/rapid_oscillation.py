"""Harmonic well with a fast cosine ripple, x^2 + 10 cos(10 pi x).

While the basis cannot resolve the ripple the ground energy sits on the plain
oscillator value 1; once N is large enough it drops to the true value near 0.9492.

    python demos/rapid_oscillation.py
"""

from vism import PotentialSpec, PrecisionContext, builtin_interpolant, to_decimal
from vism.optimize import energy_at

pot = PotentialSpec.parse("x^2 + 10*cos(10*pi*x)")
ctx = PrecisionContext(40)
interp = builtin_interpolant(pot, ctx)

for N in (10, 20, 40, 60, 80, 100, 120):
    with ctx.local():
        L = interp(N)
        e = energy_at(pot, "periodic", N, L, ctx)
    print(f"N={N:>3}  L={to_decimal(L, 8):>10}  E0={to_decimal(e, 15)}")
