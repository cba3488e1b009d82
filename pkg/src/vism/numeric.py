"""Arbitrary-precision arithmetic contract.

Values are :class:`gmpy2.mpfr` numbers.  A :class:`PrecisionContext` fixes the
number of decimal digits a caller wants and the guard digits carried on top;
every routine in the package runs its arithmetic inside ``ctx.local()`` so
results do not depend on whatever gmpy2 context happens to be active.

Decimal strings are the interchange format at API boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

import gmpy2
from gmpy2 import mpfr

from .errors import NonConvergence

HPReal = type(mpfr(0))
RealLike = Union[HPReal, int, str, Fraction, float]

LOG2_10 = math.log2(10)
MAX_QUADRATURE_DOUBLINGS = 20


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in decimal significant digits.

    ``digits`` is what results are guaranteed to; ``guard_digits`` are carried
    internally to absorb round-off in long reductions (Jacobi sweeps, sums).
    """

    digits: int = 30
    guard_digits: int = 10

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 16:
            raise ValueError(f"digits must be an integer >= 16, got {self.digits!r}")
        if int(self.guard_digits) != self.guard_digits or self.guard_digits < 0:
            raise ValueError("guard_digits must be a non-negative integer")

    @property
    def bits(self) -> int:
        return int(math.ceil((self.digits + self.guard_digits) * LOG2_10)) + 4

    def local(self):
        """A fresh gmpy2 context at this precision, for use in ``with``."""
        return gmpy2.context(precision=self.bits)

    def real(self, value: RealLike) -> HPReal:
        """Convert ``value`` to an mpfr rounded to this context."""
        with self.local():
            if isinstance(value, Fraction):
                return mpfr(gmpy2.mpq(value.numerator, value.denominator))
            if isinstance(value, str):
                value = value.strip()
                if "/" in value:
                    return mpfr(gmpy2.mpq(value))
            return mpfr(value)

    def tiny(self, exponent: RealLike) -> HPReal:
        """``10**(-exponent)`` at working precision."""
        with self.local():
            return mpfr(10) ** (-mpfr(exponent))

    @property
    def eps(self) -> HPReal:
        return self.tiny(self.digits)

    def to_str(self, x: RealLike, digits: int | None = None) -> str:
        return to_decimal(self.real(x), digits or self.digits)

    def with_digits(self, digits: int) -> "PrecisionContext":
        return PrecisionContext(digits, self.guard_digits)


def to_decimal(x: HPReal, digits: int) -> str:
    """Decimal string of ``x`` with ``digits`` significant digits.

    Positional notation for moderate exponents, otherwise ``d.ddd e±X``;
    trailing fractional zeros are dropped.
    """
    if not gmpy2.is_finite(x):
        return str(x)
    if x == 0:
        return "0"
    mant, exp, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    if -8 <= exp <= 40:
        if exp <= 0:
            s = "0." + "0" * (-exp) + mant
        elif exp < len(mant):
            s = mant[:exp] + "." + mant[exp:]
        else:
            s = mant + "0" * (exp - len(mant))
        if "." in s:
            s = s.rstrip("0").rstrip(".")
        return sign + s
    frac = mant[1:].rstrip("0")
    body = mant[0] + ("." + frac if frac else "")
    return f"{sign}{body}e{exp - 1:+d}"


def hp_pi(ctx: PrecisionContext) -> HPReal:
    with ctx.local():
        return gmpy2.const_pi()


def hermite(n: int, x: RealLike, ctx: PrecisionContext | None = None) -> HPReal:
    """Physicists' Hermite polynomial by three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if ctx is None:
        prec = x.precision if isinstance(x, HPReal) else gmpy2.get_context().precision
        local = gmpy2.context(precision=prec)
    else:
        local = ctx.local()
        x = ctx.real(x)
    with local:
        x = mpfr(x)
        h_prev, h = mpfr(1), 2 * x
        if n == 0:
            return h_prev
        for k in range(1, n):
            h_prev, h = h, 2 * x * h - 2 * k * h_prev
        return h


@lru_cache(maxsize=64)
def _legendre_rule(n: int, bits: int):
    """Gauss-Legendre nodes and weights on [-1, 1] via Newton iteration."""
    with gmpy2.context(precision=bits + 16):
        pi = gmpy2.const_pi()
        stop = mpfr(2) ** (-(bits + 4))
        nodes, weights = [], []
        for i in range(1, n // 2 + 1):
            x = gmpy2.cos(pi * (4 * i - 1) / (4 * n + 2))
            for _ in range(200):
                p0, p1 = mpfr(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < stop:
                    break
            else:
                raise NonConvergence(f"Legendre root {i} of degree {n} did not converge")
            p0, p1 = mpfr(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes += [x, -x]
            weights += [w, w]
        if n % 2:
            p0, p1 = mpfr(1), mpfr(0)
            for k in range(2, n + 1):
                p0, p1 = p1, (-(k - 1) * p0) / k
            # P'_n(0) = n * P_{n-1}(0)
            dp = n * p0
            nodes.append(mpfr(0))
            weights.append(2 / (dp * dp))
    with gmpy2.context(precision=bits):
        return tuple(mpfr(v) for v in nodes), tuple(mpfr(w) for w in weights)


def default_order(ctx: PrecisionContext) -> int:
    return max(16, (ctx.digits + ctx.guard_digits) // 2)


def gauss_legendre(n: int, ctx: PrecisionContext):
    """``n``-point Gauss-Legendre rule on [-1, 1] at working precision."""
    if n < 1:
        raise ValueError("rule needs at least one node")
    return _legendre_rule(n, ctx.bits)


def _composite(f, a, b, panels, nodes, weights):
    h = (b - a) / panels
    half = h / 2
    total = []
    for p in range(panels):
        mid = a + h * p + half
        total.extend(w * f(mid + half * x) for x, w in zip(nodes, weights))
    return gmpy2.fsum(total) * half


def gauss_quadrature(
    f: Callable[[HPReal], RealLike],
    a: RealLike,
    b: RealLike,
    ctx: PrecisionContext,
    tol: RealLike | None = None,
    *,
    order: int | None = None,
    max_doublings: int = MAX_QUADRATURE_DOUBLINGS,
) -> HPReal:
    """Integrate ``f`` over ``[a, b]`` by composite Gauss-Legendre.

    The panel count doubles until two successive estimates differ by less
    than ``tol`` (default ``10**-digits``).  Raises :class:`NonConvergence`
    after ``max_doublings`` doublings.
    """
    nodes, weights = gauss_legendre(order or default_order(ctx), ctx)
    with ctx.local():
        a, b = ctx.real(a), ctx.real(b)
        tol = ctx.eps if tol is None else ctx.real(tol)
        if tol <= 0:
            raise ValueError("tol must be positive")
        if a == b:
            return mpfr(0)
        previous = _composite(f, a, b, 1, nodes, weights)
        for level in range(1, max_doublings + 1):
            current = _composite(f, a, b, 2**level, nodes, weights)
            if abs(current - previous) < tol:
                return current
            previous = current
    raise NonConvergence(
        f"quadrature on [{a}, {b}] not converged after {max_doublings} doublings"
    )
