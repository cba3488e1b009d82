"""Fourier basis families and their index bookkeeping.

Periodic mode lives on ``[-L, L]`` and holds the cosines ``m = 0..N`` followed
by the sines ``m = 1..N``; cosines carry the ``1/sqrt(L R_m)`` normalisation
with ``R_0 = 2``.  Confinement mode lives on ``[0, 2L]`` and holds the sines
``sin(m pi x / 2L) / sqrt(L)`` for ``m = 1..2N+1``.  Both modes therefore give
``2N + 1`` functions, and in periodic mode the flat ordering puts the even
(cosine) block first so parity blocks are contiguous slices.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .errors import IndexOutOfRange
from .numeric import HPReal, PrecisionContext, RealLike, gauss_quadrature


class Mode(str, enum.Enum):
    PERIODIC = "periodic"
    CONFINEMENT = "confinement"


class Trig(enum.IntEnum):
    SINE = 1
    COSINE = 2


@dataclass(frozen=True)
class BasisIndex:
    m: int
    i: Trig
    flat: int

    @property
    def parity(self) -> str:
        """Periodic-mode parity: cosines even, sines odd."""
        return "even" if self.i is Trig.COSINE else "odd"


def _positive(value) -> bool:
    if isinstance(value, HPReal):
        return value > 0
    if isinstance(value, str) and "/" not in value:
        return Fraction(value.strip()) > 0
    return Fraction(value) > 0 if not isinstance(value, float) else value > 0


@dataclass(frozen=True)
class BasisSpec:
    mode: Mode
    N: int
    L: RealLike

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if not _positive(self.L):
            raise ValueError(f"L must be positive, got {self.L!r}")

    @property
    def dim(self) -> int:
        return 2 * self.N + 1

    @cached_property
    def indices(self) -> tuple[BasisIndex, ...]:
        if self.mode is Mode.PERIODIC:
            cos = [BasisIndex(m, Trig.COSINE, m) for m in range(self.N + 1)]
            sin = [BasisIndex(m, Trig.SINE, self.N + m) for m in range(1, self.N + 1)]
            return tuple(cos + sin)
        return tuple(BasisIndex(m, Trig.SINE, m - 1) for m in range(1, self.dim + 1))

    @property
    def even_slice(self) -> slice:
        return slice(0, self.N + 1)

    @property
    def odd_slice(self) -> slice:
        return slice(self.N + 1, self.dim)

    def index(self, idx: BasisIndex | int) -> BasisIndex:
        """Validate ``idx`` (or look up a flat ordinal) against this spec."""
        if isinstance(idx, BasisIndex):
            if 0 <= idx.flat < self.dim and self.indices[idx.flat] == idx:
                return idx
            raise IndexOutOfRange(f"{idx} is not part of {self.mode.value} basis with N={self.N}")
        if isinstance(idx, int) and 0 <= idx < self.dim:
            return self.indices[idx]
        raise IndexOutOfRange(f"flat index {idx!r} outside 0..{self.dim - 1}")

    def find(self, m: int, i: Trig | int = Trig.SINE) -> BasisIndex:
        for idx in self.indices:
            if idx.m == m and idx.i == i:
                return idx
        raise IndexOutOfRange(f"(m={m}, i={Trig(i).name}) not in basis")

    def parity(self, idx: BasisIndex | int) -> str:
        """Parity about the centre of the domain, valid in both modes."""
        idx = self.index(idx)
        if self.mode is Mode.CONFINEMENT:
            return "even" if idx.m % 2 else "odd"
        return idx.parity

    def half_length(self, ctx: PrecisionContext) -> HPReal:
        return ctx.real(self.L)

    def domain(self, ctx: PrecisionContext) -> tuple[HPReal, HPReal]:
        L = self.half_length(ctx)
        with ctx.local():
            if self.mode is Mode.PERIODIC:
                return -L, L
            return mpfr(0), 2 * L

    def offset(self, ctx: PrecisionContext) -> HPReal:
        """Basis coordinate minus physical coordinate (L in confinement mode)."""
        if self.mode is Mode.PERIODIC:
            return ctx.real(0)
        return self.half_length(ctx)

    def base_wavenumber(self, ctx: PrecisionContext) -> HPReal:
        L = self.half_length(ctx)
        with ctx.local():
            k = gmpy2.const_pi() / L
            return k if self.mode is Mode.PERIODIC else k / 2

    def norm(self, idx: BasisIndex, ctx: PrecisionContext) -> HPReal:
        L = self.half_length(ctx)
        with ctx.local():
            if self.mode is Mode.PERIODIC and idx.m == 0:
                return 1 / gmpy2.sqrt(2 * L)
            return 1 / gmpy2.sqrt(L)


def eval_basis(spec: BasisSpec, idx: BasisIndex | int, x: RealLike, ctx: PrecisionContext) -> HPReal:
    """Normalised basis function at ``x`` (basis coordinates)."""
    idx = spec.index(idx)
    x = ctx.real(x)
    k = spec.base_wavenumber(ctx)
    n = spec.norm(idx, ctx)
    with ctx.local():
        arg = idx.m * k * x
        if idx.i is Trig.COSINE:
            return n * gmpy2.cos(arg)
        return n * gmpy2.sin(arg)


def kinetic_eigenvalue(spec: BasisSpec, idx: BasisIndex | int, ctx: PrecisionContext) -> HPReal:
    """Eigenvalue of ``-d^2/dx^2`` on this basis function."""
    idx = spec.index(idx)
    k = spec.base_wavenumber(ctx)
    with ctx.local():
        return (idx.m * k) ** 2


def gram_matrix(spec: BasisSpec, ctx: PrecisionContext, tol: RealLike | None = None):
    lo, hi = spec.domain(ctx)
    tol = ctx.tiny(ctx.digits + ctx.guard_digits // 2) if tol is None else tol
    G = np.empty((spec.dim, spec.dim), dtype=object)
    for a in spec.indices:
        for b in spec.indices[a.flat:]:
            G[a.flat, b.flat] = G[b.flat, a.flat] = gauss_quadrature(
                lambda x: eval_basis(spec, a, x, ctx) * eval_basis(spec, b, x, ctx),
                lo, hi, ctx, tol,
            )
    return G


def gram_check(spec: BasisSpec, ctx: PrecisionContext, tol: RealLike | None = None) -> HPReal:
    """Largest deviation of the numerically integrated Gram matrix from identity."""
    G = gram_matrix(spec, ctx, tol)
    with ctx.local():
        worst = mpfr(0)
        for a in range(spec.dim):
            for b in range(spec.dim):
                worst = max(worst, abs(G[a, b] - (1 if a == b else 0)))
    return worst
