from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from vism.errors import NonConvergence
from vism.numeric import (PrecisionContext, gauss_legendre, gauss_quadrature, hermite, hp_pi,
                          to_decimal)


def test_bits_grow_with_digits():
    assert PrecisionContext(50).bits > PrecisionContext(30).bits >= 133


@pytest.mark.parametrize("digits", [0, 15, 20.5])
def test_rejects_low_or_fractional_digits(digits):
    with pytest.raises(ValueError):
        PrecisionContext(digits)


def test_real_parses_exact_forms(ctx):
    assert ctx.real("1/3") == ctx.real(Fraction(1, 3))
    with ctx.local():
        assert abs(ctx.real("1/3") * 3 - 1) < ctx.tiny(ctx.digits + 5)
    assert ctx.real("0.1") != mpfr(0.1)  # decimal string, not the binary double


def test_to_decimal_forms(ctx):
    assert to_decimal(ctx.real(0), 10) == "0"
    assert to_decimal(ctx.real("2.5"), 10) == "2.5"
    assert to_decimal(ctx.real(-1234), 10) == "-1234"
    assert to_decimal(ctx.real("1e-20"), 5) == "1e-20"
    assert to_decimal(ctx.real("0.00012"), 5) == "0.00012"
    assert to_decimal(hp_pi(ctx), 30) == "3.14159265358979323846264338328"


def test_hermite_matches_closed_form(ctx):
    x = ctx.real("0.7")
    with ctx.local():
        expected = 8 * x**3 - 12 * x
        assert abs(hermite(3, x, ctx) - expected) < ctx.eps


@pytest.mark.parametrize("n", [3, 8, 17])
def test_gauss_legendre_exact_for_polynomials(ctx, n):
    nodes, weights = gauss_legendre(n, ctx)
    with ctx.local():
        for k in range(2 * n):
            got = gmpy2.fsum([w * x**k for x, w in zip(nodes, weights)])
            exact = mpfr(2) / (k + 1) if k % 2 == 0 else mpfr(0)
            assert abs(got - exact) < ctx.tiny(ctx.digits + 5)


def test_quadrature_sine(ctx):
    with ctx.local():
        val = gauss_quadrature(gmpy2.sin, 0, hp_pi(ctx), ctx)
        assert abs(val - 2) < ctx.eps


def test_quadrature_non_convergence(ctx):
    with pytest.raises(NonConvergence):
        gauss_quadrature(lambda x: gmpy2.sqrt(abs(x)), -1, 1, ctx, "1e-40", max_doublings=2)
