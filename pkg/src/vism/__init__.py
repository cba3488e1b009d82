"""Arbitrary-precision Fourier-Galerkin solver for the 1-D Schroedinger equation.

Typical use::

    from vism import BasisSpec, PotentialSpec, PrecisionContext, assemble, solve

    ctx = PrecisionContext(40)
    h = assemble(BasisSpec("periodic", 30, "9.8368"), PotentialSpec.parse("x^2"), ctx)
    print(solve(h, ctx).eigenvalues[0])
"""

from .basis import BasisIndex, BasisSpec, Mode, Trig, eval_basis, gram_check, kinetic_eigenvalue
from .eigen import Spectrum, eigh, eigh_blockwise, lowest_eigenvalues, lowest_energies, solve
from .errors import *  # noqa: F401,F403
from .hamiltonian import HamiltonianMatrix, assemble, parity_blocks
from .numeric import HPReal, PrecisionContext, gauss_quadrature, to_decimal
from .optimize import (LHatAnchor, LHatInterpolant, Method, build_interpolant, builtin_interpolant,
                       find_L_hat, scan_E_vs_L)
from .potential import PotentialSpec, assemble_coupling
from .reference import (PerturbationReference, SHOReference, SurrogateReference,
                        quartic_perturbation_energy, sho_energy, sho_psi)
from .solution import (BoundState, ErrorReport, delta_E_exact, delta_E_hat, delta_psi_exact, eval_psi,
                       solve_states)

__version__ = "0.1.0"
