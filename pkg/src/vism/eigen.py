"""Dense symmetric eigensolvers at arbitrary precision.

:func:`eigh` is cyclic Jacobi: slow per flop but unconditionally stable and
exact in its rotation order, which makes results bit-reproducible.
:func:`lowest_eigenvalues` is a cheaper eigenvalue-only path (Householder
tridiagonalisation plus Sturm bisection) used inside the domain optimisers,
where hundreds of solves only need one or two eigenvalues each.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .errors import NoConvergence, NotSymmetric
from .numeric import HPReal, PrecisionContext

MAX_SWEEPS = 50


@dataclass
class Spectrum:
    """Ascending eigenvalues with unit, sign-normalised eigenvector columns."""

    eigenvalues: list
    eigenvectors: np.ndarray | None
    ctx: PrecisionContext
    parity: list | None = None
    source: object = None
    sweeps: int = field(default=0, compare=False)

    def __len__(self):
        return len(self.eigenvalues)

    def vector(self, n: int) -> np.ndarray:
        if self.eigenvectors is None:
            raise ValueError("spectrum was computed without eigenvectors")
        return self.eigenvectors[:, n]


def as_object_matrix(M, ctx: PrecisionContext) -> np.ndarray:
    M = np.asarray(M, dtype=object)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    out = np.empty(M.shape, dtype=object)
    for idx, v in np.ndenumerate(M):
        out[idx] = ctx.real(v)
    return out


def frobenius(M) -> HPReal:
    return gmpy2.sqrt(gmpy2.fsum([v * v for v in M.flat]))


def _check_symmetric(A, ctx):
    scale = frobenius(A)
    worst = max((abs(A[i, j] - A[j, i]) for i in range(A.shape[0]) for j in range(i)),
                default=mpfr(0))
    if worst > ctx.tiny(ctx.digits - 10) * max(scale, mpfr(1)):
        raise NotSymmetric(f"matrix asymmetric by {float(worst):.3e}")
    return scale


def sign_normalize(V: np.ndarray) -> np.ndarray:
    """Flip columns so their largest-magnitude entry (first on ties) is positive."""
    for col in range(V.shape[1]):
        v = V[:, col]
        big = max(range(len(v)), key=lambda i: (abs(v[i]), -i))
        if v[big] < 0:
            V[:, col] = -v
    return V


def _sorted_spectrum(values, V, ctx, sweeps=0):
    order = sorted(range(len(values)), key=lambda i: (values[i], i))
    values = [values[i] for i in order]
    if V is not None:
        V = sign_normalize(V[:, order])
    return Spectrum(values, V, ctx, sweeps=sweeps)


def eigh(M, ctx: PrecisionContext, vectors: bool = True) -> Spectrum:
    """Full eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations."""
    with ctx.local():
        A = as_object_matrix(M, ctx)
        n = A.shape[0]
        scale = _check_symmetric(A, ctx)
        for i in range(n):
            for j in range(i):
                A[i, j] = A[j, i] = (A[i, j] + A[j, i]) / 2
        V = None
        if vectors:
            V = np.empty((n, n), dtype=object)
            V.fill(mpfr(0))
            for i in range(n):
                V[i, i] = mpfr(1)
        target = ctx.tiny(ctx.digits + ctx.guard_digits / 2) * scale
        negligible = ctx.tiny(ctx.digits + ctx.guard_digits) * scale / max(n, 1)
        zero = mpfr(0)
        sweeps = 0
        while True:
            off = gmpy2.sqrt(2 * gmpy2.fsum([A[p, q] ** 2 for p in range(n) for q in range(p + 1, n)]))
            if off <= target or n < 2:
                break
            if sweeps == MAX_SWEEPS:
                raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps "
                                    f"(off-diagonal norm {float(off):.3e})")
            sweeps += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    if abs(apq) <= negligible:
                        A[p, q] = A[q, p] = zero
                        continue
                    app, aqq = A[p, p], A[q, q]
                    theta = (aqq - app) / (2 * apq)
                    t = 1 / (abs(theta) + gmpy2.sqrt(theta * theta + 1))
                    if theta < 0:
                        t = -t
                    c = 1 / gmpy2.sqrt(t * t + 1)
                    s = t * c
                    col_p = A[:, p].copy()
                    col_q = A[:, q]
                    A[:, p] = c * col_p - s * col_q
                    A[:, q] = s * col_p + c * col_q
                    row_p = A[p, :].copy()
                    row_q = A[q, :]
                    A[p, :] = c * row_p - s * row_q
                    A[q, :] = s * row_p + c * row_q
                    A[p, p] = app - t * apq
                    A[q, q] = aqq + t * apq
                    A[p, q] = A[q, p] = zero
                    if V is not None:
                        vp = V[:, p].copy()
                        vq = V[:, q]
                        V[:, p] = c * vp - s * vq
                        V[:, q] = s * vp + c * vq
        values = [A[i, i] for i in range(n)]
        return _sorted_spectrum(values, V, ctx, sweeps)


def eigvalsh(M, ctx: PrecisionContext) -> list:
    return eigh(M, ctx, vectors=False).eigenvalues


def tridiagonalize(M, ctx: PrecisionContext):
    """Householder reduction; returns (diagonal, off-diagonal) lists."""
    with ctx.local():
        A = as_object_matrix(M, ctx)
        n = A.shape[0]
        zero = mpfr(0)
        off = []
        for k in range(n - 2):
            x = A[k + 1:, k].copy()
            tail = gmpy2.fsum([v * v for v in x[1:]])
            if tail == 0:
                off.append(x[0])
                continue
            sigma = tail + x[0] * x[0]
            alpha = -gmpy2.sqrt(sigma) if x[0] >= 0 else gmpy2.sqrt(sigma)
            v = x
            v[0] = x[0] - alpha
            beta = 2 / (tail + v[0] * v[0])
            sub = A[k + 1:, k + 1:]
            p = beta * sub.dot(v)
            K = beta * v.dot(p) / 2
            w = p - K * v
            A[k + 1:, k + 1:] = sub - np.multiply.outer(v, w) - np.multiply.outer(w, v)
            A[k + 1:, k] = zero
            A[k, k + 1:] = zero
            off.append(alpha)
        if n >= 2:
            off.append(A[n - 1, n - 2])
        return [A[i, i] for i in range(n)], off


def _sturm_count(d, e2, lam, floor):
    count = 0
    q = d[0] - lam
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        if q == 0:
            q = floor
        q = d[i] - lam - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


def lowest_eigenvalues(M, ctx: PrecisionContext, count: int = 1) -> list:
    """The ``count`` smallest eigenvalues, ascending, by Sturm bisection."""
    d, e = tridiagonalize(M, ctx)
    n = len(d)
    count = min(count, n)
    with ctx.local():
        e2 = [v * v for v in e]
        radius = [abs(e[i - 1]) if i > 0 else mpfr(0) for i in range(n)]
        for i in range(n - 1):
            radius[i] += abs(e[i])
        lo0 = min(d[i] - radius[i] for i in range(n))
        hi0 = max(d[i] + radius[i] for i in range(n))
        scale = max(abs(lo0), abs(hi0), mpfr(1))
        tol = ctx.tiny(ctx.digits + ctx.guard_digits / 2) * scale
        floor = ctx.tiny(ctx.digits + ctx.guard_digits) * scale / 1000
        out = []
        lo = lo0
        for k in range(count):
            a, b = lo, hi0
            while b - a > tol:
                mid = (a + b) / 2
                if _sturm_count(d, e2, mid, floor) > k:
                    b = mid
                else:
                    a = mid
            value = (a + b) / 2
            out.append(value)
            lo = a
        return out


def eigh_blockwise(h, ctx: PrecisionContext | None = None, vectors: bool = True) -> Spectrum:
    """Solve each parity block separately and merge into one labelled spectrum."""
    ctx = ctx or h.ctx
    if not h.blocks:
        raise ValueError("Hamiltonian carries no parity blocks")
    n = h.dim
    rows = []
    sweeps = 0
    for block in h.blocks:
        part = eigh(block.matrix, ctx, vectors=vectors)
        sweeps = max(sweeps, part.sweeps)
        for k, value in enumerate(part.eigenvalues):
            col = None
            if vectors:
                col = np.empty(n, dtype=object)
                col.fill(mpfr(0))
                col[list(block.flat)] = part.eigenvectors[:, k]
            rows.append((value, 0 if block.parity == "even" else 1, block.parity, col))
    rows.sort(key=lambda r: (r[0], r[1]))
    V = None
    if vectors:
        V = np.empty((n, n), dtype=object)
        for j, r in enumerate(rows):
            V[:, j] = r[3]
    return Spectrum([r[0] for r in rows], V, ctx, parity=[r[2] for r in rows],
                    source=h.spec, sweeps=sweeps)


def solve(h, ctx: PrecisionContext | None = None, vectors: bool = True,
          blockwise: bool = True) -> Spectrum:
    """Spectrum of an assembled Hamiltonian, blockwise when it carries blocks."""
    ctx = ctx or h.ctx
    if blockwise and h.blocks:
        return eigh_blockwise(h, ctx, vectors)
    spec = eigh(h.D, ctx, vectors)
    spec.source = h.spec
    return spec


def lowest_energies(h, count: int = 1, ctx: PrecisionContext | None = None) -> list:
    """Smallest ``count`` eigenvalues of ``h`` without eigenvectors."""
    ctx = ctx or h.ctx
    if not h.blocks:
        return lowest_eigenvalues(h.D, ctx, count)
    merged = []
    for block in h.blocks:
        merged += lowest_eigenvalues(block.matrix, ctx, count)
    return sorted(merged)[:count]
