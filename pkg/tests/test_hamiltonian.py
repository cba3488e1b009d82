import io
from fractions import Fraction

import gmpy2
import pytest

from vism.basis import BasisSpec
from vism.errors import NotBlockDiagonal
from vism.hamiltonian import assemble, dump_csv, load_csv, parity_blocks
from vism.potential import PotentialSpec


def test_symmetric_and_blocked(ctx):
    h = assemble(BasisSpec("periodic", 4, 3), PotentialSpec.parse("x^2"), ctx)
    assert all(h.D[i, j] == h.D[j, i] for i in range(h.dim) for j in range(h.dim))
    even, odd = h.blocks
    assert even.matrix.shape == (5, 5) and odd.matrix.shape == (4, 4)
    assert even.flat == (0, 1, 2, 3, 4)


def test_no_blocks_for_odd_or_confinement(ctx):
    assert assemble(BasisSpec("periodic", 2, 2), PotentialSpec.parse("x^2 + x"), ctx).blocks is None
    assert assemble(BasisSpec("confinement", 2, 2), PotentialSpec.parse("x^2"), ctx).blocks is None
    shifted = PotentialSpec(((2, 1),), (), Fraction(1, 3))
    assert assemble(BasisSpec("periodic", 2, 2), shifted, ctx).blocks is None


def test_forced_split_detects_coupling(ctx):
    h = assemble(BasisSpec("periodic", 2, 2), PotentialSpec.parse("x^2 + x"), ctx, split=False)
    with pytest.raises(NotBlockDiagonal):
        parity_blocks(h)
    conf = assemble(BasisSpec("confinement", 2, 2), PotentialSpec.parse("x^2"), ctx)
    with pytest.raises(ValueError):
        parity_blocks(conf)


def test_diagonal_contains_kinetic(ctx):
    h = assemble(BasisSpec("confinement", 1, 1), PotentialSpec.parse("0"), ctx)
    with ctx.local():
        assert abs(h.D[2, 2] - (3 * gmpy2.const_pi() / 2) ** 2) < ctx.eps * 100


def test_csv_round_trip(ctx):
    h = assemble(BasisSpec("periodic", 2, "2.5"), PotentialSpec.parse("x^2"), ctx)
    text = dump_csv(h.D, ctx)
    back = load_csv(io.StringIO(text), ctx)
    with ctx.local():
        assert max(abs(a - b) for a, b in zip(back.flat, h.D.flat)) < ctx.tiny(ctx.digits - 1) * 100
