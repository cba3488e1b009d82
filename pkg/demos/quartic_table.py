"""Quartic oscillator x^2 + 0.1 x^4: spectral energies versus perturbation theory.

    python demos/quartic_table.py
"""

from vism import PotentialSpec, PrecisionContext, quartic_perturbation_energy, solve_states, to_decimal
from vism.basis import BasisSpec

ctx = PrecisionContext(40)
pot = PotentialSpec.parse("x^2 + 0.1*x^4")
states = solve_states(pot, BasisSpec("periodic", 24, ctx.real("6.2")), ctx, count=5)

print(f"{'n':>2}  {'spectral':>26}  {'order 0':>8}  {'order 1':>8}")
for s in states:
    p0 = float(quartic_perturbation_energy(s.n, 0, "0.1"))
    p1 = float(quartic_perturbation_energy(s.n, 1, "0.1"))
    print(f"{s.n:>2}  {to_decimal(s.energy, 24):>26}  {p0:>8.4f}  {p1:>8.4f}")
