"""The Galerkin matrix ``D = K + C`` and its parity blocks."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, Mode, kinetic_eigenvalue
from .errors import NotBlockDiagonal
from .numeric import PrecisionContext, to_decimal
from .potential import PotentialSpec, assemble_coupling


@dataclass(frozen=True)
class Block:
    parity: str
    matrix: np.ndarray
    flat: tuple  # flat index in the full basis of each block row


@dataclass(frozen=True)
class HamiltonianMatrix:
    spec: BasisSpec
    pot: PotentialSpec
    D: np.ndarray
    ctx: PrecisionContext
    blocks: tuple | None = None

    @property
    def dim(self) -> int:
        return self.D.shape[0]


def blocking_legal(spec: BasisSpec, pot: PotentialSpec) -> bool:
    return spec.mode is Mode.PERIODIC and pot.is_even()


def assemble(spec: BasisSpec, pot: PotentialSpec, ctx: PrecisionContext,
             split: bool = True) -> HamiltonianMatrix:
    """Build ``D_ab = k_a delta_ab + C_ab``; parity blocks attached when legal."""
    C = assemble_coupling(spec, pot, ctx)
    with ctx.local():
        D = C.copy()
        for idx in spec.indices:
            D[idx.flat, idx.flat] = C[idx.flat, idx.flat] + kinetic_eigenvalue(spec, idx, ctx)
    h = HamiltonianMatrix(spec, pot, D, ctx)
    if split and blocking_legal(spec, pot):
        h = HamiltonianMatrix(spec, pot, D, ctx, parity_blocks(h))
    return h


def parity_blocks(h: HamiltonianMatrix) -> tuple[Block, Block]:
    """Cosine-cosine and sine-sine sub-matrices of a periodic-mode ``D``."""
    spec, ctx = h.spec, h.ctx
    if spec.mode is not Mode.PERIODIC:
        raise ValueError("parity blocks are defined for periodic mode only")
    even, odd = spec.even_slice, spec.odd_slice
    cross = h.D[even, odd]
    limit = ctx.tiny(ctx.digits - 10)
    for v in cross.flat:
        if abs(v) > limit:
            raise NotBlockDiagonal(f"cross-parity entry {float(v):.3e} exceeds {float(limit):.1e}")
    return (
        Block("even", h.D[even, even].copy(), tuple(range(spec.dim))[even]),
        Block("odd", h.D[odd, odd].copy(), tuple(range(spec.dim))[odd]),
    )


def dump_csv(M: np.ndarray, ctx: PrecisionContext, stream=None, digits: int | None = None) -> str | None:
    """Row-major decimal-string CSV of a matrix; returns the text if no stream."""
    out = stream if stream is not None else io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for row in M:
        writer.writerow([to_decimal(ctx.real(v), digits or ctx.digits) for v in row])
    if stream is None:
        return out.getvalue()
    return None


def load_csv(stream, ctx: PrecisionContext) -> np.ndarray:
    rows = [[ctx.real(v) for v in row] for row in csv.reader(stream) if row]
    M = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        M[i, :] = row
    return M
