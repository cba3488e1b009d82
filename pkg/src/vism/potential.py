"""Potential descriptions and the coupling integrals ``C_ab = <g_a| f |g_b>``.

A potential is a finite sum of monomials ``c * x**k`` and cosine terms
``alpha * cos(beta * pi * x)``, optionally shifted to ``f(x - shift)``.

Closed forms
------------
Every entry is reduced to integrals of the form ``int y**k trig(w y) dy`` over
the centred domain, where ``y`` is the physical coordinate:

* the product of two basis functions becomes two cosines or two sines of the
  sum and difference wavenumbers (product-to-sum);
* in confinement mode the basis coordinate is ``y + L``; the phase this adds,
  ``j * pi / 2``, is applied exactly by angle addition, so parity zeros survive;
* a cosine term is folded in by one more product-to-sum step.

The moments are evaluated by integration-by-parts recurrences, or by their
Taylor series when ``w * R < 2`` (``R`` the domain radius) where the recurrence
would cancel.  Wavenumbers below ``10**(-digits/2)`` are treated as resonant and
replaced by zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .basis import BasisIndex, BasisSpec, Mode, Trig, eval_basis
from .errors import NonConvergence, PotentialSyntaxError, UnsupportedExponent
from .numeric import HPReal, PrecisionContext, RealLike, gauss_quadrature

MAX_CLOSED_FORM_EXPONENT = 4

COS, SIN = Trig.COSINE, Trig.SINE


def exact(value) -> Fraction:
    """Exact rational from a decimal string, int, Fraction, float or mpfr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(repr(value))
    q = gmpy2.mpq(value)
    return Fraction(int(q.numerator), int(q.denominator))


def format_coefficient(c: Fraction) -> str:
    d = c.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{c.numerator}/{c.denominator}"
    if c.denominator == 1:
        return str(c.numerator)
    scale = 0
    while (c * 10**scale).denominator != 1:
        scale += 1
    digits = str(abs((c * 10**scale).numerator)).rjust(scale + 1, "0")
    sign = "-" if c < 0 else ""
    return f"{sign}{digits[:-scale]}.{digits[-scale:]}"


_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_COS_RE = re.compile(rf"^(?:({_NUM})\*)?cos\((?:({_NUM})\*)?pi\*x\)$")
_MONO_RE = re.compile(rf"^(?:({_NUM})\*)?x(?:(?:\^|\*\*)(\d+))?$")
_CONST_RE = re.compile(rf"^({_NUM})$")


def _split_terms(text: str) -> list[str]:
    terms, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start:
            prev = text[i - 1]
            if prev in "eE" and i >= 2 and (text[i - 2].isdigit() or text[i - 2] == "."):
                continue
            if prev in "*/^(":
                continue
            terms.append(text[start:i])
            start = i
    terms.append(text[start:])
    return terms


@dataclass(frozen=True)
class PotentialSpec:
    """``f(x) = sum c x^k + sum alpha cos(beta pi x)``, evaluated at ``x - shift``."""

    monomial_terms: tuple = ()
    cosine_terms: tuple = ()
    shift: Fraction = field(default=Fraction(0))

    def __post_init__(self):
        mono: dict[int, Fraction] = {}
        for k, c in self.monomial_terms:
            if int(k) != k or k < 0:
                raise ValueError(f"monomial exponent must be a non-negative integer, got {k!r}")
            mono[int(k)] = mono.get(int(k), Fraction(0)) + exact(c)
        cos: dict[Fraction, Fraction] = {}
        for alpha, beta in self.cosine_terms:
            beta = exact(beta)
            if beta == 0:
                raise ValueError("cosine frequency factor must be non-zero")
            if beta < 0:
                beta = -beta
            cos[beta] = cos.get(beta, Fraction(0)) + exact(alpha)
        object.__setattr__(self, "monomial_terms",
                           tuple((k, c) for k, c in sorted(mono.items()) if c != 0))
        object.__setattr__(self, "cosine_terms",
                           tuple((a, b) for b, a in sorted(cos.items()) if a != 0))
        object.__setattr__(self, "shift", exact(self.shift))

    @classmethod
    def parse(cls, text: str) -> "PotentialSpec":
        """Parse the canonical text form, e.g. ``x^2 + 10*cos(10*pi*x)``."""
        src = "".join(text.split())
        if not src:
            raise PotentialSyntaxError("empty potential")
        mono, cos = [], []
        for raw in _split_terms(src):
            sign = 1
            term = raw
            while term and term[0] in "+-":
                sign = -sign if term[0] == "-" else sign
                term = term[1:]
            if m := _COS_RE.match(term):
                alpha = Fraction(m.group(1) or 1) * sign
                cos.append((alpha, Fraction(m.group(2) or 1)))
            elif m := _MONO_RE.match(term):
                mono.append((int(m.group(2) or 1), Fraction(m.group(1) or 1) * sign))
            elif m := _CONST_RE.match(term):
                mono.append((0, Fraction(m.group(1)) * sign))
            else:
                raise PotentialSyntaxError(f"cannot parse term {raw!r} in {text!r}")
        return cls(tuple(mono), tuple(cos))

    def __str__(self) -> str:
        parts = []
        for k, c in self.monomial_terms:
            x = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if not x:
                parts.append((c < 0, format_coefficient(abs(c))))
            elif abs(c) == 1:
                parts.append((c < 0, x))
            else:
                parts.append((c < 0, f"{format_coefficient(abs(c))}*{x}"))
        for a, b in self.cosine_terms:
            arg = "pi*x" if b == 1 else f"{format_coefficient(b)}*pi*x"
            body = f"cos({arg})" if abs(a) == 1 else f"{format_coefficient(abs(a))}*cos({arg})"
            parts.append((a < 0, body))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def is_even(self) -> bool:
        return self.shift == 0 and all(k % 2 == 0 for k, _ in self.monomial_terms)

    def is_zero(self) -> bool:
        return not self.monomial_terms and not self.cosine_terms

    def value(self, x: RealLike, ctx: PrecisionContext) -> HPReal:
        with ctx.local():
            y = ctx.real(x) - ctx.real(self.shift)
            total = [ctx.real(c) * y**k for k, c in self.monomial_terms]
            pi = gmpy2.const_pi()
            total += [ctx.real(a) * gmpy2.cos(ctx.real(b) * pi * y) for a, b in self.cosine_terms]
            return gmpy2.fsum(total) if total else mpfr(0)

    def scaled(self, factor) -> "PotentialSpec":
        f = exact(factor)
        return PotentialSpec(
            tuple((k, c * f) for k, c in self.monomial_terms),
            tuple((a * f, b) for a, b in self.cosine_terms),
            self.shift,
        )

    def __add__(self, other: "PotentialSpec") -> "PotentialSpec":
        if self.shift != other.shift:
            raise ValueError("cannot add potentials with different shifts")
        return PotentialSpec(self.monomial_terms + other.monomial_terms,
                             self.cosine_terms + other.cosine_terms, self.shift)

    def split_closed_form(self) -> tuple["PotentialSpec", "PotentialSpec"]:
        """(terms with closed-form kernels, terms needing quadrature)."""
        closed = tuple((k, c) for k, c in self.monomial_terms if k <= MAX_CLOSED_FORM_EXPONENT)
        rest = tuple((k, c) for k, c in self.monomial_terms if k > MAX_CLOSED_FORM_EXPONENT)
        return (PotentialSpec(closed, self.cosine_terms, self.shift),
                PotentialSpec(rest, (), self.shift))


# ---------------------------------------------------------------------------
# closed-form kernels


def _basis_product(a: BasisIndex, b: BasisIndex):
    """``g_a g_b`` up to the factor ``norm_a norm_b / 2`` as (sign, kind, j) terms."""
    d, s = a.m - b.m, a.m + b.m
    if a.i is COS and b.i is COS:
        raw = [(1, COS, d), (1, COS, s)]
    elif a.i is SIN and b.i is SIN:
        raw = [(1, COS, d), (-1, COS, s)]
    elif a.i is SIN:
        raw = [(1, SIN, s), (1, SIN, d)]
    else:
        raw = [(1, SIN, s), (-1, SIN, d)]
    out = []
    for sign, kind, j in raw:
        if j < 0:
            j = -j
            if kind is SIN:
                sign = -sign
        if kind is SIN and j == 0:
            continue
        out.append((sign, kind, j))
    return out


_QUARTER_TURN = ((1, 0), (0, 1), (-1, 0), (0, -1))


class _Kernel:
    """Moment cache and phase bookkeeping for one (basis, shift, precision)."""

    def __init__(self, spec: BasisSpec, shift: Fraction, ctx: PrecisionContext):
        self.spec, self.ctx = spec, ctx
        with ctx.local():
            self.kappa = spec.base_wavenumber(ctx)
            self.pi = gmpy2.const_pi()
            self.shift = ctx.real(shift)
            lo, hi = spec.domain(ctx)
            offset = spec.offset(ctx)
            self.A, self.B = lo - offset - self.shift, hi - offset - self.shift
            self.symmetric = self.A == -self.B
            self.R = max(abs(self.A), abs(self.B))
            self.threshold = ctx.tiny(ctx.digits / 2)
            self.stop = mpfr(2) ** (-ctx.bits - 8)
        self._moments: dict = {}
        self._phases: dict = {}

    def phase(self, j: int):
        """cos/sin of the phase ``j*kappa*(offset + shift)`` picked up on recentring."""
        if j in self._phases:
            return self._phases[j]
        if self.spec.mode is Mode.CONFINEMENT:
            c, s = _QUARTER_TURN[j % 4]
        else:
            c, s = 1, 0
        if self.shift != 0:
            t = j * self.kappa * self.shift
            ct, st = gmpy2.cos(t), gmpy2.sin(t)
            c, s = c * ct - s * st, s * ct + c * st
        self._phases[j] = (c, s)
        return c, s

    def moment(self, k: int, kind: Trig, omega: HPReal) -> HPReal:
        """``int_A^B y^k trig(omega y) dy`` for ``omega >= 0``."""
        if omega < self.threshold:
            omega = mpfr(0)
        if self.symmetric:
            integrand_odd = (k % 2 == 1) if kind is COS else (k % 2 == 0)
            if integrand_odd:
                return mpfr(0)
            return 2 * self._raw(k, kind, omega, mpfr(0), self.B)
        return self._raw(k, kind, omega, self.A, self.B)

    def _raw(self, k, kind, omega, A, B):
        if omega == 0:
            if kind is SIN:
                return mpfr(0)
            return (B ** (k + 1) - A ** (k + 1)) / (k + 1)
        if omega * self.R < 2:
            return self._series(k, kind, omega, A, B)
        sa, ca = gmpy2.sin(omega * A), gmpy2.cos(omega * A)
        sb, cb = gmpy2.sin(omega * B), gmpy2.cos(omega * B)
        c_int = (sb - sa) / omega
        s_int = (ca - cb) / omega
        for n in range(1, k + 1):
            c_new = (B**n * sb - A**n * sa) / omega - n * s_int / omega
            s_new = -(B**n * cb - A**n * ca) / omega + n * c_int / omega
            c_int, s_int = c_new, s_new
        return c_int if kind is COS else s_int

    def _series(self, k, kind, omega, A, B):
        # cos(wy) = sum (-1)^j (wy)^(2j)/(2j)!, sin likewise with odd powers
        p = 0 if kind is COS else 1
        coef = mpfr(1) if p == 0 else omega
        total = []
        j = 0
        while True:
            power = k + 2 * j + p + 1
            term = coef * (B**power - A**power) / power
            total.append(term)
            if j > 0 and abs(coef) * self.R ** (2 * j + p) < self.stop:
                break
            j += 1
            coef = -coef * omega * omega / ((2 * j + p - 1) * (2 * j + p))
        return gmpy2.fsum(total)

    def cached(self, key, compute):
        value = self._moments.get(key)
        if value is None:
            value = self._moments[key] = compute()
        return value

    def entry(self, a: BasisIndex, b: BasisIndex, monomials, cosines) -> HPReal:
        """``<g_a| f |g_b>`` for closed-form terms, without the norm prefactor."""
        parts = []
        for sign, kind, j in _basis_product(a, b):
            c, s = self.phase(j)
            # trig(j kappa (y + S)) re-expressed in trig(j kappa y)
            if kind is COS:
                pieces = ((sign * c, COS), (-sign * s, SIN))
            else:
                pieces = ((sign * s, COS), (sign * c, SIN))
            for weight, kd in pieces:
                if weight == 0:
                    continue
                if kd is SIN and j == 0:
                    continue
                for k, coeff in monomials:
                    m = self.cached((k, kd, j, 0, None),
                                    lambda: self.moment(k, kd, j * self.kappa))
                    parts.append(weight * coeff * m)
                for alpha, beta, gamma_key in cosines:
                    parts.append(weight * alpha * self._cos_fold(kd, j, beta, gamma_key) / 2)
        return gmpy2.fsum(parts) if parts else mpfr(0)

    def _cos_fold(self, kind, j, beta, key):
        """``int trig(j kappa y) cos(beta pi y)`` times two."""
        def diff():
            w = j * self.kappa - beta * self.pi
            if kind is COS:
                return self.moment(0, COS, abs(w))
            m = self.moment(0, SIN, abs(w))
            return m if w >= 0 else -m

        def total():
            return self.moment(0, kind, j * self.kappa + beta * self.pi)

        return (self.cached((0, kind, j, -1, key), diff)
                + self.cached((0, kind, j, 1, key), total))


def _closed_form_matrix(spec: BasisSpec, monomials, cosines, shift, ctx: PrecisionContext,
                        skip_parity: bool):
    kern = _Kernel(spec, shift, ctx)
    dim = spec.dim
    C = np.empty((dim, dim), dtype=object)
    with ctx.local():
        mono = [(k, ctx.real(c)) for k, c in monomials]
        cos = [(ctx.real(a), ctx.real(b), b) for a, b in cosines]
        norms = [spec.norm(idx, ctx) for idx in spec.indices]
        zero = mpfr(0)
        for a in spec.indices:
            for b in spec.indices[a.flat:]:
                if skip_parity and spec.parity(a) != spec.parity(b):
                    value = zero
                else:
                    value = norms[a.flat] * norms[b.flat] * kern.entry(a, b, mono, cos) / 2
                C[a.flat, b.flat] = C[b.flat, a.flat] = value
    return C


def coupling_monomial(spec: BasisSpec, k: int, ctx: PrecisionContext) -> np.ndarray:
    """Closed-form matrix of ``int g_a x^k g_b`` (shifted by ``L`` in confinement mode)."""
    if int(k) != k or not 0 <= k <= MAX_CLOSED_FORM_EXPONENT:
        raise UnsupportedExponent(
            f"no closed form for x^{k}; use coupling_quadrature")
    return _closed_form_matrix(spec, [(int(k), 1)], [], Fraction(0), ctx,
                               skip_parity=k % 2 == 0)


def coupling_cosine(spec: BasisSpec, alpha: RealLike, beta: RealLike,
                    ctx: PrecisionContext) -> np.ndarray:
    """Closed-form matrix of ``int g_a alpha cos(beta pi x) g_b``."""
    if exact(beta) <= 0:
        raise ValueError("beta must be positive")
    return _closed_form_matrix(spec, [], [(exact(alpha), exact(beta))], Fraction(0), ctx,
                               skip_parity=True)


def coupling_quadrature(spec: BasisSpec, pot: PotentialSpec, ctx: PrecisionContext,
                        tol: RealLike | None = None) -> np.ndarray:
    """Every entry by adaptive Gauss-Legendre quadrature."""
    dim = spec.dim
    C = np.empty((dim, dim), dtype=object)
    if pot.is_zero():
        C.fill(ctx.real(0))
        return C
    lo, hi = spec.domain(ctx)
    offset = spec.offset(ctx)
    tol = ctx.tiny(ctx.digits + ctx.guard_digits // 2) if tol is None else tol
    for a in spec.indices:
        for b in spec.indices[a.flat:]:
            def integrand(x, a=a, b=b):
                return (eval_basis(spec, a, x, ctx) * pot.value(x - offset, ctx)
                        * eval_basis(spec, b, x, ctx))
            try:
                value = gauss_quadrature(integrand, lo, hi, ctx, tol)
            except NonConvergence as exc:
                raise NonConvergence(f"{exc} at entry ({a.flat}, {b.flat})",
                                     entry=(a, b)) from exc
            C[a.flat, b.flat] = C[b.flat, a.flat] = value
    return C


def assemble_coupling(spec: BasisSpec, pot: PotentialSpec, ctx: PrecisionContext) -> np.ndarray:
    """Coupling matrix of the full potential: closed forms where available."""
    closed, rest = pot.split_closed_form()
    C = _closed_form_matrix(spec, closed.monomial_terms, closed.cosine_terms, pot.shift, ctx,
                            skip_parity=pot.is_even())
    if not rest.is_zero():
        Q = coupling_quadrature(spec, rest, ctx)
        with ctx.local():
            C = C + Q
    return C
