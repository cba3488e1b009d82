from fractions import Fraction

import gmpy2
import numpy as np
import pytest
from gmpy2 import mpfr

from vism.basis import BasisSpec, eval_basis
from vism.errors import DivisionByZero, OutOfDomain, ZeroReference
from vism.numeric import PrecisionContext, gauss_quadrature
from vism.optimize import builtin_interpolant
from vism.potential import PotentialSpec
from vism.reference import sho_psi
from vism.solution import (BoundState, delta_E_exact, delta_E_hat, delta_psi_exact, eval_psi, grid,
                           physical_domain, psi_csv, solve_states)

SHO = PotentialSpec.parse("x^2")


@pytest.fixture
def sho_states(ctx):
    return solve_states(SHO, BasisSpec("periodic", 7, "4.98"), ctx, 4)


def test_unit_vector_state(ctx):
    spec = BasisSpec("periodic", 2, 2)
    coeffs = np.array([mpfr(0)] * spec.dim, dtype=object)
    coeffs[3] = mpfr(1)
    state = BoundState(0, mpfr(1), coeffs, spec, ctx)
    assert abs(eval_psi(state, "0.4") - eval_basis(spec, 3, "0.4", ctx)) < ctx.eps


def test_confinement_uses_physical_coordinates(ctx):
    spec = BasisSpec("confinement", 1, 1)
    coeffs = np.array([mpfr(1), mpfr(0), mpfr(0)], dtype=object)
    state = BoundState(0, mpfr(1), coeffs, spec, ctx)
    assert abs(eval_psi(state, 0) - eval_basis(spec, 0, 1, ctx)) < ctx.eps
    assert abs(eval_psi(state, -1)) < ctx.eps


def test_odd_state_vanishes_at_origin(sho_states):
    assert sho_states[1].parity == "odd"
    assert eval_psi(sho_states[1], 0) == 0


def test_out_of_domain(sho_states):
    with pytest.raises(OutOfDomain):
        eval_psi(sho_states[0], 6)


def test_normalisation(sho_states, ctx):
    L = ctx.real("4.98")
    with ctx.local():
        norm = gauss_quadrature(lambda x: eval_psi(sho_states[0], x) ** 2, -L, L, ctx, "1e-25")
    assert abs(norm - 1) < ctx.tiny(ctx.digits // 2)


def test_delta_E_exact(sho_states, ctx):
    s = sho_states[0]
    assert delta_E_exact(s, s.energy) == 0
    assert delta_E_exact(s, 1) < 1e-10
    with pytest.raises(DivisionByZero):
        delta_E_exact(s, 0)


def test_delta_psi_phase_and_identity(sho_states):
    s = sho_states[0]
    assert delta_psi_exact(s, lambda x: eval_psi(s, x), 101) == 0
    assert delta_psi_exact(s.flipped(), lambda x: eval_psi(s, x), 101) == 0
    d = delta_psi_exact(s, lambda x: sho_psi(0, x, s.ctx), 101)
    assert 0 < d < 1e-4
    assert delta_psi_exact(s.flipped(), lambda x: sho_psi(0, x, s.ctx), 101) == d
    with pytest.raises(ZeroReference):
        delta_psi_exact(s, lambda x: 0, 11)


def test_free_particle_box_estimator(ctx):
    zero = PotentialSpec.parse("0")
    d = delta_E_hat(zero, "confinement", 3, 0, lambda n: ctx.real(1), ctx)
    assert d < ctx.eps


def test_psi_csv(sho_states):
    text = psi_csv(sho_states[0], M=5, digits=8)
    lines = text.strip().splitlines()
    assert lines[0] == "x,psi" and len(lines) == 6
    assert lines[1].startswith("-4.98,")


def test_quartic_estimator_decreases():
    ctx = PrecisionContext(60)
    pot = PotentialSpec.parse("x^2 + 0.1*x^4")
    interp = builtin_interpolant(pot, ctx)
    d30 = delta_E_hat(pot, "periodic", 30, 0, interp, ctx)
    d40 = delta_E_hat(pot, "periodic", 40, 0, interp, ctx)
    assert 0 < d40 < d30


def test_grid_endpoints_stay_in_domain():
    ctx = PrecisionContext(20)
    spec = BasisSpec("periodic", 1, Fraction(35, 6))
    xs = grid(spec, ctx, 21)
    lo, hi = physical_domain(spec, ctx)
    assert xs[0] == lo and xs[-1] == hi
