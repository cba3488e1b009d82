import pytest
from gmpy2 import mpfr

from vism.basis import BasisIndex, BasisSpec, Mode, Trig, eval_basis, gram_check, kinetic_eigenvalue
from vism.errors import IndexOutOfRange
from vism.numeric import hp_pi


@pytest.mark.parametrize("mode", list(Mode))
@pytest.mark.parametrize("N", [1, 4])
def test_dimension_and_flat_order(mode, N):
    spec = BasisSpec(mode, N, "3")
    assert spec.dim == 2 * N + 1
    assert [i.flat for i in spec.indices] == list(range(spec.dim))


def test_periodic_layout_puts_cosines_first():
    spec = BasisSpec("periodic", 3, 2)
    assert [(i.m, i.i) for i in spec.indices[:4]] == [(m, Trig.COSINE) for m in range(4)]
    assert [(i.m, i.i) for i in spec.indices[4:]] == [(m, Trig.SINE) for m in range(1, 4)]
    assert spec.indices[spec.even_slice][-1].m == 3


def test_confinement_layout():
    spec = BasisSpec("confinement", 2, 1)
    assert [(i.m, i.i) for i in spec.indices] == [(m, Trig.SINE) for m in range(1, 6)]
    assert spec.parity(0) == "even" and spec.parity(1) == "odd"


def test_bad_inputs():
    with pytest.raises(ValueError):
        BasisSpec("periodic", 0, 1)
    with pytest.raises(ValueError):
        BasisSpec("periodic", 2, "-1")
    spec = BasisSpec("periodic", 2, 1)
    with pytest.raises(IndexOutOfRange):
        spec.index(5)
    with pytest.raises(IndexOutOfRange):
        spec.find(3, Trig.SINE)
    with pytest.raises(IndexOutOfRange):
        spec.index(BasisIndex(0, Trig.SINE, 0))


def test_constant_mode_value(ctx):
    spec = BasisSpec("periodic", 2, 2)
    with ctx.local():
        assert abs(eval_basis(spec, 0, "0.3", ctx) - 1 / mpfr(4) ** mpfr("0.5")) < ctx.eps


def test_confinement_vanishes_at_walls(ctx):
    spec = BasisSpec("confinement", 3, "1.5")
    for idx in spec.indices:
        assert abs(eval_basis(spec, idx, 0, ctx)) < ctx.eps
        assert abs(eval_basis(spec, idx, 3, ctx)) < ctx.eps


def test_kinetic_eigenvalues(ctx):
    spec = BasisSpec("confinement", 2, 1)
    with ctx.local():
        for idx in spec.indices:
            expected = (idx.m * hp_pi(ctx) / 2) ** 2
            assert abs(kinetic_eigenvalue(spec, idx, ctx) - expected) < ctx.eps * expected


@pytest.mark.parametrize("mode", list(Mode))
def test_gram_identity(ctx, mode):
    spec = BasisSpec(mode, 3, "2.3")
    assert gram_check(spec, ctx) < ctx.eps
