"""Property-based checks of the structural invariants."""

from fractions import Fraction

import numpy as np
from gmpy2 import mpfr
from hypothesis import given, settings, strategies as st

from vism.basis import BasisSpec, gram_check
from vism.eigen import eigh, solve
from vism.hamiltonian import assemble
from vism.numeric import PrecisionContext
from vism.potential import PotentialSpec
from vism.solution import delta_psi_exact, eval_psi, solve_states

CTX = PrecisionContext(20)
FAST = settings(max_examples=12, deadline=None)

half_lengths = st.fractions(min_value=Fraction(1, 2), max_value=Fraction(6), max_denominator=20)
modes = st.sampled_from(["periodic", "confinement"])
even_potentials = st.builds(
    lambda c2, c4, a, b: PotentialSpec(((2, c2), (4, c4)), ((a, b),)),
    st.integers(0, 4), st.fractions(0, 1, max_denominator=10),
    st.integers(-3, 3), st.fractions(Fraction(1, 2), 5, max_denominator=4),
)
any_potentials = st.builds(
    lambda pot, c1: pot + PotentialSpec(((1, c1),)),
    even_potentials, st.fractions(-1, 1, max_denominator=5),
)


def close(a, b, tol):
    with CTX.local():
        return abs(a - b) <= tol * max(abs(b), 1)


@FAST
@given(modes, st.integers(1, 3), half_lengths)
def test_gram_orthonormal(mode, N, L):
    assert gram_check(BasisSpec(mode, N, L), CTX) < CTX.eps


@FAST
@given(modes, st.integers(1, 4), half_lengths, any_potentials)
def test_hamiltonian_symmetric(mode, N, L, pot):
    D = assemble(BasisSpec(mode, N, L), pot, CTX).D
    assert all(D[i, j] == D[j, i] for i in range(D.shape[0]) for j in range(i))


@FAST
@given(st.integers(1, 4), half_lengths, even_potentials)
def test_block_spectrum_is_union(N, L, pot):
    h = assemble(BasisSpec("periodic", N, L), pot, CTX)
    merged = solve(h, CTX, vectors=False).eigenvalues
    full = eigh(h.D, CTX, vectors=False).eigenvalues
    assert all(close(a, b, CTX.tiny(CTX.digits - 3)) for a, b in zip(merged, full))


@FAST
@given(st.integers(2, 6), st.lists(st.integers(-50, 50), min_size=36, max_size=36))
def test_jacobi_reconstruction_trace_residual(n, entries):
    M = np.empty((n, n), dtype=object)
    it = iter(entries)
    with CTX.local():
        for i in range(n):
            for j in range(i, n):
                M[i, j] = M[j, i] = mpfr(next(it)) / 7
    s = eigh(M, CTX)
    tol = CTX.tiny(CTX.digits - CTX.guard_digits)
    with CTX.local():
        R = sum(e * np.multiply.outer(s.vector(k), s.vector(k)) for k, e in enumerate(s.eigenvalues))
        scale = max(max(abs(v) for v in M.flat), 1)
        assert all(abs(a - b) <= tol * scale for a, b in zip(R.flat, M.flat))
        assert abs(sum(s.eigenvalues) - sum(M[i, i] for i in range(n))) <= tol * scale * n
        for k, e in enumerate(s.eigenvalues):
            v = s.vector(k)
            assert max(abs(x) for x in M.dot(v) - e * v) <= tol * scale * n


@FAST
@given(modes, st.integers(1, 4), half_lengths, any_potentials)
def test_ritz_values_decrease_with_N(mode, N, L, pot):
    small = solve(assemble(BasisSpec(mode, N, L), pot, CTX), CTX, vectors=False).eigenvalues
    large = solve(assemble(BasisSpec(mode, N + 1, L), pot, CTX), CTX, vectors=False).eigenvalues
    slack = CTX.tiny(CTX.digits - 2)
    with CTX.local():
        assert all(b <= a + slack * max(abs(a), 1) for a, b in zip(small, large))


@settings(max_examples=6, deadline=None)
@given(modes, st.integers(1, 3), half_lengths, even_potentials)
def test_delta_psi_phase_invariance(mode, N, L, pot):
    a, b = solve_states(pot, BasisSpec(mode, N, L), CTX, 2)
    def ref(x):
        return eval_psi(a, x)
    assert delta_psi_exact(b, ref, 21) == delta_psi_exact(b.flipped(), ref, 21)


@settings(max_examples=5, deadline=None)
@given(modes, st.integers(1, 3), half_lengths, any_potentials)
def test_solves_are_deterministic(mode, N, L, pot):
    spec = BasisSpec(mode, N, L)
    first = solve(assemble(spec, pot, CTX), CTX)
    second = solve(assemble(spec, pot, CTX), CTX)
    assert first.eigenvalues == second.eigenvalues
    assert (first.eigenvectors == second.eigenvectors).all()
