"""Exact, perturbative and high-N surrogate reference solutions.

Units are the dimensionless oscillator units where ``-psi'' + x^2 psi = E psi``
has ``E_n = 2n + 1``.  With ``x = (a + a^dagger) / sqrt(2)`` the perturbation
``eps * x^4`` shifts level ``n`` at first order by ``eps * <n|x^4|n>``; that
matrix element is obtained here by enumerating ladder-operator paths rather
than from a transcribed formula.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .basis import BasisSpec, Mode
from .errors import OutOfDomain, ReferenceUnavailable, UnsupportedOrder
from .numeric import HPReal, PrecisionContext, RealLike
from .potential import PotentialSpec, exact


def sho_energy(n: int) -> int:
    if n < 0:
        raise ValueError("n must be non-negative")
    return 2 * n + 1


def sho_psi(n: int, x: RealLike, ctx: PrecisionContext) -> HPReal:
    """Normalised oscillator eigenfunction, by the stable normalised recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x = ctx.real(x)
    with ctx.local():
        prev = mpfr(0)
        cur = gmpy2.exp(-x * x / 2) / gmpy2.root(gmpy2.const_pi(), 4)
        for k in range(n):
            prev, cur = cur, gmpy2.sqrt(mpfr(2) / (k + 1)) * x * cur - gmpy2.sqrt(mpfr(k) / (k + 1)) * prev
        return cur


def ladder_matrix_element(n: int, power: int) -> int:
    """``<n|(a + a^dagger)^power|n>`` by brute-force path enumeration.

    Every closed path of raising/lowering steps traverses each rung an even
    number of times, so the product of its square-root factors is an integer.
    """
    if power % 2:
        return 0
    total = 0
    for steps in itertools.product((1, -1), repeat=power):
        if sum(steps) != 0:
            continue
        level, weight = n, 1
        for s in steps:
            nxt = level + s
            if nxt < 0:
                break
            weight *= max(level, nxt)
            level = nxt
        else:
            root = math.isqrt(weight)
            assert root * root == weight
            total += root
    return total


def x_power_expectation(n: int, power: int) -> Fraction:
    """``<n|x^power|n>`` with ``x = (a + a^dagger)/sqrt(2)``."""
    return Fraction(ladder_matrix_element(n, power), 2 ** (power // 2)) if power % 2 == 0 else Fraction(0)


def quartic_perturbation_energy(n: int, order: int, eps) -> Fraction:
    """Energy of ``x^2 + eps x^4`` at perturbative ``order`` 0 or 1, exactly."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if order not in (0, 1):
        raise UnsupportedOrder(f"order {order} not available (0 or 1 only)")
    e = Fraction(sho_energy(n))
    if order == 1:
        e += exact(eps) * x_power_expectation(n, 4)
    return e


@dataclass(frozen=True)
class SHOReference:
    """Exact oscillator solutions."""

    name: str = "exact"

    def energy(self, n: int, ctx: PrecisionContext) -> HPReal:
        return ctx.real(sho_energy(n))

    def psi(self, n: int, x: RealLike, ctx: PrecisionContext) -> HPReal:
        return sho_psi(n, x, ctx)


@dataclass(frozen=True)
class PerturbationReference:
    """Zeroth or first order energies of ``x^2 + epsilon_prime x^4``."""

    epsilon_prime: Fraction
    order: int = 1

    def __post_init__(self):
        object.__setattr__(self, "epsilon_prime", exact(self.epsilon_prime))
        if self.order not in (0, 1):
            raise UnsupportedOrder(f"order {self.order} not available (0 or 1 only)")

    @property
    def name(self) -> str:
        return f"perturbation{self.order}"

    def energy(self, n: int, ctx: PrecisionContext) -> HPReal:
        return ctx.real(quartic_perturbation_energy(n, self.order, self.epsilon_prime))

    def psi(self, n, x, ctx):
        raise ReferenceUnavailable("perturbative reference provides energies only")


class SurrogateReference:
    """A single large-N solve standing in for an unknown exact solution.

    Wavefunctions are taken as zero outside the surrogate's own domain.
    """

    name = "surrogate"

    def __init__(self, pot: PotentialSpec, N: int, L: RealLike, ctx: PrecisionContext,
                 count: int = 1, mode: Mode | str = Mode.PERIODIC):
        from .solution import solve_states

        self.pot, self.ctx = pot, ctx
        self.spec = BasisSpec(mode, N, L)
        self.states = solve_states(pot, self.spec, ctx, count)

    def energy(self, n: int, ctx: PrecisionContext | None = None) -> HPReal:
        return self.states[n].energy

    def psi(self, n: int, x: RealLike, ctx: PrecisionContext | None = None) -> HPReal:
        from .solution import eval_psi

        try:
            return eval_psi(self.states[n], x)
        except OutOfDomain:
            return self.ctx.real(0)


def quartic_coupling(pot: PotentialSpec) -> Fraction | None:
    """``eps`` if ``pot`` is exactly ``x^2 + eps x^4``, else None."""
    if pot.cosine_terms or pot.shift:
        return None
    terms = dict(pot.monomial_terms)
    if set(terms) - {2, 4} or terms.get(2) != 1:
        return None
    return terms.get(4, Fraction(0))


def reference_for(pot: PotentialSpec, name: str):
    """Named reference for a potential: ``exact``, ``perturbation0`` or ``perturbation1``."""
    eps = quartic_coupling(pot)
    if name == "exact":
        if eps == 0:
            return SHOReference()
        raise ReferenceUnavailable(f"no exact solution known for '{pot}'")
    if name in ("perturbation0", "perturbation1"):
        if eps is None:
            raise ReferenceUnavailable(f"perturbative reference needs x^2 + eps*x^4, got '{pot}'")
        return PerturbationReference(eps, int(name[-1]))
    raise ReferenceUnavailable(f"unknown reference {name!r}")
