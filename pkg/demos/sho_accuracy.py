"""Ground-state accuracy of the harmonic oscillator at the optimised half-length.

For each N the half-length is located with the periodic inflection rule and the
energy error against E0 = 1 is printed next to the relative change from N
to N+1 at the same half-length.

    python demos/sho_accuracy.py
"""

from vism import Method, PotentialSpec, PrecisionContext, find_L_hat, to_decimal
from vism.optimize import energy_at

pot = PotentialSpec.parse("x^2")

print(f"{'N':>3}  {'L_hat':>12}  {'|E0-1|':>10}  {'N->N+1':>10}")
for N in (1, 2, 3, 5, 8, 12, 16, 20):
    ctx = PrecisionContext(max(30, 2 * N + 20))
    anchor = find_L_hat(pot, Method.ENERGY_INFLECTION_PERIODIC, N, ctx=ctx)
    with ctx.local():
        e = energy_at(pot, "periodic", N, anchor.L_hat, ctx)
        e1 = energy_at(pot, "periodic", N + 1, anchor.L_hat, ctx)
        err, est = abs(e - 1), abs(e - e1) / abs(e1)
    print(f"{N:>3}  {to_decimal(anchor.L_hat, 10):>12}  {to_decimal(err, 3):>10}  {to_decimal(est, 3):>10}")
