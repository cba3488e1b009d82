"""Bound states, wavefunction reconstruction and error metrics."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .basis import BasisSpec, Mode, eval_basis
from .eigen import Spectrum, lowest_energies, solve
from .errors import DivisionByZero, OutOfDomain, ZeroReference
from .hamiltonian import assemble
from .numeric import HPReal, PrecisionContext, RealLike, to_decimal
from .potential import PotentialSpec

DEFAULT_GRID = 1001


@dataclass(frozen=True)
class BoundState:
    n: int
    energy: HPReal
    coefficients: np.ndarray
    spec: BasisSpec
    ctx: PrecisionContext
    parity: str | None = None

    def flipped(self) -> "BoundState":
        with self.ctx.local():
            return BoundState(self.n, self.energy, -self.coefficients, self.spec,
                              self.ctx, self.parity)


@dataclass(frozen=True)
class ErrorReport:
    delta_E: HPReal | None = None
    delta_psi: HPReal | None = None
    delta_E_hat: HPReal | None = None
    M: int = DEFAULT_GRID


def bound_states(spectrum: Spectrum, spec: BasisSpec | None = None, count: int | None = None) -> list[BoundState]:
    spec = spec or spectrum.source
    count = len(spectrum) if count is None else min(count, len(spectrum))
    return [
        BoundState(n, spectrum.eigenvalues[n], spectrum.vector(n), spec, spectrum.ctx,
                   spectrum.parity[n] if spectrum.parity else None)
        for n in range(count)
    ]


def solve_states(pot: PotentialSpec, spec: BasisSpec, ctx: PrecisionContext,
                 count: int | None = None, blockwise: bool = True) -> list[BoundState]:
    """Assemble and diagonalise once, returning the lowest ``count`` states."""
    h = assemble(spec, pot, ctx, split=blockwise)
    return bound_states(solve(h, ctx, blockwise=blockwise), spec, count)


def physical_domain(spec: BasisSpec, ctx: PrecisionContext) -> tuple[HPReal, HPReal]:
    """Both modes cover ``[-L, L]`` in physical coordinates."""
    L = spec.half_length(ctx)
    with ctx.local():
        return -L, L


def eval_psi(state: BoundState, x: RealLike) -> HPReal:
    """Wavefunction at physical position ``x``."""
    ctx, spec = state.ctx, state.spec
    x = ctx.real(x)
    lo, hi = physical_domain(spec, ctx)
    if x < lo or x > hi:
        raise OutOfDomain(f"x={to_decimal(x, 12)} outside [{to_decimal(lo, 12)}, {to_decimal(hi, 12)}]")
    with ctx.local():
        xb = x + spec.offset(ctx)
        terms = [a * eval_basis(spec, idx, xb, ctx)
                 for a, idx in zip(state.coefficients, spec.indices) if a != 0]
        return gmpy2.fsum(terms) if terms else mpfr(0)


def delta_E_exact(state: BoundState, exact_E: RealLike) -> HPReal:
    ctx = state.ctx
    exact_E = ctx.real(exact_E)
    if exact_E == 0:
        raise DivisionByZero("exact energy is zero; relative error undefined")
    with ctx.local():
        return abs(exact_E - state.energy) / abs(exact_E)


def grid(spec: BasisSpec, ctx: PrecisionContext, M: int = DEFAULT_GRID) -> list[HPReal]:
    if M < 2:
        raise ValueError("grid needs at least two points")
    lo, hi = physical_domain(spec, ctx)
    with ctx.local():
        step = (hi - lo) / (M - 1)
        # endpoints exact: accumulated rounding must not step outside the domain
        return [lo] + [lo + i * step for i in range(1, M - 1)] + [hi]


def delta_psi_exact(state: BoundState, exact_psi: Callable[[HPReal], RealLike],
                    M: int = DEFAULT_GRID) -> HPReal:
    """Root of the grid-summed squared difference over the grid-summed reference.

    The global sign of ``state`` is chosen to minimise the metric.
    """
    ctx = state.ctx
    xs = grid(state.spec, ctx, M)
    ref = [ctx.real(exact_psi(x)) for x in xs]
    approx = [eval_psi(state, x) for x in xs]
    with ctx.local():
        denom = gmpy2.fsum([r * r for r in ref])
        if denom == 0:
            raise ZeroReference("reference wavefunction vanishes on the grid")
        plus = gmpy2.fsum([(r - a) ** 2 for r, a in zip(ref, approx)])
        minus = gmpy2.fsum([(r + a) ** 2 for r, a in zip(ref, approx)])
        return gmpy2.sqrt(min(plus, minus) / denom)


def lowest_energy_at(pot: PotentialSpec, mode: Mode | str, N: int, L: RealLike,
                     ctx: PrecisionContext, state_index: int = 0) -> HPReal:
    h = assemble(BasisSpec(mode, N, L), pot, ctx)
    return lowest_energies(h, state_index + 1, ctx)[state_index]


def relative_change(e_n: HPReal, e_next: HPReal, ctx: PrecisionContext) -> HPReal:
    with ctx.local():
        if e_next == 0:
            return abs(e_n - e_next)
        return abs(e_n - e_next) / abs(e_next)


def delta_E_hat(pot: PotentialSpec, mode: Mode | str, N: int, state_index: int,
                interpolant, ctx: PrecisionContext) -> HPReal:
    """Relative change of one eigenvalue between ``N`` and ``N + 1`` on the L-hat curve."""
    e_n = lowest_energy_at(pot, mode, N, interpolant(N), ctx, state_index)
    e_next = lowest_energy_at(pot, mode, N + 1, interpolant(N + 1), ctx, state_index)
    return relative_change(e_n, e_next, ctx)


def delta_E_hat_states(pot: PotentialSpec, mode: Mode | str, N: int, count: int,
                       interpolant, ctx: PrecisionContext,
                       energies: list | None = None) -> list[HPReal]:
    """Estimator for the lowest ``count`` states; ``energies`` reuses an existing N solve."""
    if energies is None:
        h = assemble(BasisSpec(mode, N, interpolant(N)), pot, ctx)
        energies = lowest_energies(h, count, ctx)
    h = assemble(BasisSpec(mode, N + 1, interpolant(N + 1)), pot, ctx)
    nxt = lowest_energies(h, count, ctx)
    return [relative_change(a, b, ctx) for a, b in zip(energies, nxt)]


def sample_psi(state: BoundState, M: int = DEFAULT_GRID) -> list[tuple[HPReal, HPReal]]:
    return [(x, eval_psi(state, x)) for x in grid(state.spec, state.ctx, M)]


def psi_csv(state: BoundState, M: int = DEFAULT_GRID, stream=None, digits: int | None = None):
    """``x,psi`` rows as decimal strings; returns the text when no stream is given."""
    out = stream if stream is not None else io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x", "psi"])
    d = digits or state.ctx.digits
    for x, v in sample_psi(state, M):
        w.writerow([to_decimal(x, d), to_decimal(v, d)])
    return out.getvalue() if stream is None else None
