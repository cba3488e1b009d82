"""Choosing the domain half-length: L-hat(N) and its interpolant.

For fixed truncation ``N`` the ground-state energy as a function of ``L`` has
a minimum in confinement mode and an inflection point in periodic mode; the
error-based criteria instead minimise the distance to a reference solution.
Anchors found at a handful of ``N`` are joined by a monotone cubic and
extended beyond the last anchor by a power law.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable

import gmpy2
from gmpy2 import mpfr

from .basis import BasisSpec, Mode
from .eigen import lowest_energies
from .errors import (BracketInvalid, InsufficientAnchors, NonMonotoneAnchors, OutOfDomain,
                     ReferenceRequired)
from .hamiltonian import assemble
from .numeric import HPReal, PrecisionContext, RealLike, to_decimal
from .potential import PotentialSpec
from .solution import delta_psi_exact, relative_change, solve_states

DEFAULT_TOL_L = "1e-8"
COARSE_SAMPLES = 24
MAX_BRACKET_EXPANSIONS = 3
ZOOM_LEVELS = 2
ZOOM_SAMPLES = 25
GOLDEN = (math.sqrt(5) - 1) / 2


class Method(str, enum.Enum):
    ENERGY_MIN_CONFINEMENT = "EnergyMinConfinement"
    ENERGY_INFLECTION_PERIODIC = "EnergyInflectionPeriodic"
    ENERGY_ERROR_MIN = "EnergyErrorMin"
    WAVEFUNCTION_ERROR_MIN = "WavefunctionErrorMin"
    # experimental: minimise the N vs N+1 change at equal L; needs no reference
    ESTIMATOR_MIN = "EstimatorMin"

    @property
    def needs_reference(self) -> bool:
        return self in (Method.ENERGY_ERROR_MIN, Method.WAVEFUNCTION_ERROR_MIN)

    @property
    def default_mode(self) -> Mode:
        return Mode.CONFINEMENT if self is Method.ENERGY_MIN_CONFINEMENT else Mode.PERIODIC


STANDARD_METHODS = (Method.ENERGY_MIN_CONFINEMENT, Method.ENERGY_INFLECTION_PERIODIC,
                 Method.ENERGY_ERROR_MIN, Method.WAVEFUNCTION_ERROR_MIN)


@dataclass(frozen=True)
class LHatAnchor:
    N: int
    L_hat: HPReal
    method: Method
    state_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not self.L_hat > 0:
            raise ValueError("L_hat must be positive")


def energy_at(pot: PotentialSpec, mode, N: int, L: RealLike, ctx: PrecisionContext,
              state_index: int = 0) -> HPReal:
    h = assemble(BasisSpec(mode, N, L), pot, ctx)
    return lowest_energies(h, state_index + 1, ctx)[state_index]


def _linspace(lo: HPReal, hi: HPReal, samples: int, ctx: PrecisionContext) -> list[HPReal]:
    with ctx.local():
        step = (hi - lo) / (samples - 1)
        return [lo + i * step for i in range(samples)]


def scan_E_vs_L(pot: PotentialSpec, mode, N: int, state_index: int, L_range,
                samples: int, ctx: PrecisionContext) -> list[tuple[HPReal, HPReal]]:
    """``(L, E_state)`` on a uniform grid of ``samples`` points over ``L_range``."""
    if samples < 5:
        raise ValueError("an L scan needs at least 5 samples")
    lo, hi = (ctx.real(v) for v in L_range)
    if not 0 < lo < hi:
        raise ValueError("L range must satisfy 0 < L_min < L_max")
    return [(L, energy_at(pot, mode, N, L, ctx, state_index))
            for L in _linspace(lo, hi, samples, ctx)]


def _noise(values, ctx):
    with ctx.local():
        return ctx.tiny(ctx.digits - 2) * max(max(abs(v) for v in values), mpfr(1))


def scan_features(scan: list[tuple[HPReal, HPReal]], ctx: PrecisionContext) -> dict:
    """Interior minima and inflections of a sampled curve, by sample index.

    Second differences below the working-precision noise floor count as zero
    and cannot start or end a sign change. ``upturns[k]`` is true when the
    k-th inflection goes from concave to convex.
    """
    Ls = [p[0] for p in scan]
    Es = [p[1] for p in scan]
    noise = _noise(Es, ctx)
    with ctx.local():
        d2 = [Es[i + 1] - 2 * Es[i] + Es[i - 1] for i in range(1, len(Es) - 1)]
    minima = [i for i in range(1, len(Es) - 1)
              if Es[i] < Es[i - 1] and Es[i] <= Es[i + 1]]
    inflections, upturns = [], []
    last = None
    for k, v in enumerate(d2):
        if abs(v) <= noise:
            continue
        sign = v > 0
        if last is not None and last[1] != sign:
            inflections.append((last[0] + 1, k + 1))  # sample indices bracketing the change
            upturns.append(sign)
        last = (k, sign)
    return {"L": Ls, "E": Es, "minima": minima, "inflections": inflections, "upturns": upturns}


def _golden(f: Callable[[HPReal], HPReal], a: HPReal, b: HPReal, tol: HPReal,
            ctx: PrecisionContext) -> HPReal:
    with ctx.local():
        g = mpfr(GOLDEN)
        c, d = b - g * (b - a), a + g * (b - a)
        fc, fd = f(c), f(d)
        while b - a > tol:
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - g * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + g * (b - a)
                fd = f(d)
        return (a + b) / 2


def _bisect_sign(f: Callable[[HPReal], HPReal], a: HPReal, b: HPReal, tol: HPReal,
                 ctx: PrecisionContext) -> HPReal:
    fa, fb = f(a), f(b)
    if (fa > 0) == (fb > 0):
        raise BracketInvalid("second derivative does not change sign on the bracket")
    with ctx.local():
        while b - a > tol:
            m = (a + b) / 2
            fm = f(m)
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b, fb = m, fm
        return (a + b) / 2


def default_bracket(state_index: int, scale: RealLike = 1) -> tuple[float, float]:
    s = math.sqrt(2 * state_index + 2) * float(scale)
    return 0.5 * s, 10 * s


def _objective(pot, method: Method, mode, N, state_index, ctx, reference, M):
    if method in (Method.ENERGY_MIN_CONFINEMENT, Method.ENERGY_INFLECTION_PERIODIC):
        return lambda L: energy_at(pot, mode, N, L, ctx, state_index)
    if method is Method.ENERGY_ERROR_MIN:
        exact = reference.energy(state_index, ctx)
        return lambda L: relative_change(energy_at(pot, mode, N, L, ctx, state_index), exact, ctx)
    if method is Method.WAVEFUNCTION_ERROR_MIN:
        def wave(L):
            state = solve_states(pot, BasisSpec(mode, N, L), ctx, state_index + 1)[state_index]
            return delta_psi_exact(state, lambda x: reference.psi(state_index, x, ctx), M)
        return wave
    return lambda L: relative_change(energy_at(pot, mode, N, L, ctx, state_index),
                                     energy_at(pot, mode, N + 1, L, ctx, state_index), ctx)


def find_L_hat(pot: PotentialSpec, method: Method | str, N: int, state_index: int = 0,
               bracket=None, ctx: PrecisionContext | None = None, tol_L: RealLike = DEFAULT_TOL_L,
               *, reference=None, mode=None, samples: int = COARSE_SAMPLES,
               M: int = 1001) -> LHatAnchor:
    """Locate the optimal half-length for truncation ``N``.

    A coarse scan of the objective over the bracket isolates the feature,
    which is then refined by golden section (minima) or by bisection on a
    central second difference with step ``sqrt(tol_L) * L`` (inflection).
    Among several inflections the flattest concave-to-convex one wins.
    An automatic bracket is widened upwards when the feature is not inside.
    """
    ctx = ctx or PrecisionContext()
    method = Method(method)
    if method.needs_reference and reference is None:
        raise ReferenceRequired(f"{method.value} needs a reference solution")
    mode = Mode(mode) if mode is not None else method.default_mode
    auto = bracket is None
    lo, hi = default_bracket(state_index) if auto else bracket
    lo, hi = ctx.real(lo), ctx.real(hi)
    tol = ctx.real(tol_L)
    objective = _objective(pot, method, mode, N, state_index, ctx, reference, M)

    for attempt in range(MAX_BRACKET_EXPANSIONS + 1 if auto else 1):
        Ls = _linspace(lo, hi, samples, ctx)
        scan = [(L, objective(L)) for L in Ls]
        feats = scan_features(scan, ctx)
        if method is Method.ENERGY_INFLECTION_PERIODIC:
            L = _refine_inflection(objective, feats, tol, ctx)
        else:
            L = _refine_minimum(objective, feats, tol, ctx)
        if L is not None:
            return LHatAnchor(N, L, method, state_index)
        with ctx.local():
            hi = hi * 2
    raise BracketInvalid(f"no {'inflection' if method is Method.ENERGY_INFLECTION_PERIODIC else 'interior minimum'} "
                         f"of the objective found for N={N} on [{to_decimal(lo, 6)}, {to_decimal(hi, 6)}]")


def _refine_minimum(objective, feats, tol, ctx):
    if not feats["minima"]:
        return None
    Ls, Es = feats["L"], feats["E"]
    i = min(feats["minima"], key=lambda k: Es[k])
    return _golden(objective, Ls[i - 1], Ls[i + 1], tol, ctx)


def _refine_inflection(energy, feats, tol, ctx, depth=0):
    if not feats["inflections"]:
        return None
    Ls, Es = feats["L"], feats["E"]
    with ctx.local():
        def slope(i, j):
            return abs((Es[j + 1] - Es[i - 1]) / (Ls[j + 1] - Ls[i - 1]))
        inner = [(ij, up) for ij, up in zip(feats["inflections"], feats["upturns"])
                 if ij[0] >= 1 and ij[1] + 1 < len(Ls)]
        if not inner:
            return None
        # E0 approaches the converged value with negative curvature and turns convex
        # where truncation in L takes over; that turn is the flattest concave-to-convex one.
        ups = [ij for ij, up in inner if up] or [ij for ij, _ in inner]
        i, j = min(ups, key=lambda ij: slope(*ij))
        lo, hi = Ls[max(i - 2, 0)], Ls[j + 1]
        if depth < ZOOM_LEVELS:
            # a coarse grid can step over the first turn; resample the neighbourhood
            local = [(L, energy(L)) for L in _linspace(lo, hi, ZOOM_SAMPLES, ctx)]
            found = _refine_inflection(energy, scan_features(local, ctx), tol, ctx, depth + 1)
            if found is not None:
                return found
        root = gmpy2.sqrt(tol)

        def curvature(L):
            h = root * L
            return (energy(L + h) - 2 * energy(L) + energy(L - h)) / (h * h)

        try:
            return _bisect_sign(curvature, Ls[i], Ls[j], tol, ctx)
        except BracketInvalid:
            return _bisect_sign(curvature, Ls[i - 1], Ls[j + 1], tol, ctx)


# ---------------------------------------------------------------------------
# interpolation


def _pchip_slopes(x: list[HPReal], y: list[HPReal]) -> list[HPReal]:
    """Fritsch-Carlson derivative estimates (shape preserving)."""
    n = len(x)
    h = [x[k + 1] - x[k] for k in range(n - 1)]
    delta = [(y[k + 1] - y[k]) / h[k] for k in range(n - 1)]
    d = [mpfr(0)] * n
    for k in range(1, n - 1):
        if delta[k - 1] * delta[k] > 0:
            w1 = 2 * h[k] + h[k - 1]
            w2 = h[k] + 2 * h[k - 1]
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k])

    def end(h0, h1, d0, d1):
        v = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1)
        if (v > 0) != (d0 > 0) or d0 == 0:
            return mpfr(0)
        if (d0 > 0) != (d1 > 0) and abs(v) > abs(3 * d0):
            return 3 * d0
        return v

    if n == 2:
        d[0] = d[1] = delta[0]
    else:
        d[0] = end(h[0], h[1], delta[0], delta[1])
        d[-1] = end(h[-1], h[-2], delta[-1], delta[-2])
    return d


class LHatInterpolant:
    """Monotone cubic through anchors, power law ``a * N**b`` beyond the last one.

    The power law is fitted in log-log space to the last three anchors and
    then rescaled so it passes exactly through the last anchor.
    """

    def __init__(self, anchors: list[LHatAnchor], ctx: PrecisionContext):
        self.anchors = list(anchors)
        self.ctx = ctx
        with ctx.local():
            self.x = [mpfr(a.N) for a in anchors]
            self.y = [ctx.real(a.L_hat) for a in anchors]
            self.d = _pchip_slopes(self.x, self.y)
            tail = list(zip(self.x, self.y))[-3:]
            lx = [gmpy2.log(p[0]) for p in tail]
            ly = [gmpy2.log(p[1]) for p in tail]
            mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
            sxx = sum((v - mx) ** 2 for v in lx)
            self.b = sum((u - mx) * (v - my) for u, v in zip(lx, ly)) / sxx
            self.a = self.y[-1] / self.x[-1] ** self.b

    @property
    def N_range(self) -> tuple[int, int]:
        return self.anchors[0].N, self.anchors[-1].N

    @property
    def method(self) -> Method:
        return self.anchors[0].method

    def __call__(self, N: RealLike) -> HPReal:
        ctx = self.ctx
        t = ctx.real(N)
        x, y, d = self.x, self.y, self.d
        if t < x[0]:
            raise OutOfDomain(f"N={N} below the first anchor N={self.anchors[0].N}")
        with ctx.local():
            if t >= x[-1]:
                return y[-1] if t == x[-1] else self.a * t ** self.b
            k = max(i for i in range(len(x) - 1) if x[i] <= t)
            if t == x[k]:
                return y[k]
            h = x[k + 1] - x[k]
            s = (t - x[k]) / h
            h00 = (1 + 2 * s) * (1 - s) ** 2
            h10 = s * (1 - s) ** 2
            h01 = s * s * (3 - 2 * s)
            h11 = s * s * (s - 1)
            return h00 * y[k] + h10 * h * d[k] + h01 * y[k + 1] + h11 * h * d[k + 1]

    def summary(self, digits: int = 12) -> dict:
        return {
            "method": self.method.value,
            "anchors": [{"N": a.N, "L_hat": to_decimal(self.ctx.real(a.L_hat), digits)}
                        for a in self.anchors],
            "power_law": {"a": to_decimal(self.a, digits), "b": to_decimal(self.b, digits)},
        }


def build_interpolant(anchors: Iterable[LHatAnchor], ctx: PrecisionContext | None = None) -> LHatInterpolant:
    anchors = list(anchors)
    if len(anchors) < 3:
        raise InsufficientAnchors(f"need at least 3 anchors, got {len(anchors)}")
    if any(b.N <= a.N for a, b in zip(anchors, anchors[1:])):
        raise NonMonotoneAnchors("anchor N values must be strictly increasing")
    if len({a.method for a in anchors}) != 1:
        raise ValueError("anchors must all come from one method")
    return LHatInterpolant(anchors, ctx or PrecisionContext())


# ---------------------------------------------------------------------------
# anchor tables

ANCHOR_HEADER = ["N", "L_hat", "method", "state_index"]


def write_anchors(anchors: Iterable[LHatAnchor], stream=None, digits: int = 20):
    out = stream if stream is not None else io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(ANCHOR_HEADER)
    for a in anchors:
        w.writerow([a.N, to_decimal(a.L_hat, digits), a.method.value, a.state_index])
    return out.getvalue() if stream is None else None


def read_anchors(stream, ctx: PrecisionContext | None = None) -> list[LHatAnchor]:
    ctx = ctx or PrecisionContext()
    reader = csv.DictReader(stream)
    if reader.fieldnames != ANCHOR_HEADER:
        raise ValueError(f"anchor table header must be {','.join(ANCHOR_HEADER)}")
    return [LHatAnchor(int(r["N"]), ctx.real(r["L_hat"]), Method(r["method"]),
                       int(r["state_index"])) for r in reader]


BUILTIN_CALIBRATIONS = {
    "x^2": "sho.csv",
    "x^2 + 0.1*x^4": "quartic.csv",
    "x^2 + 10*cos(10*pi*x)": "cosine.csv",
}


def builtin_anchors(pot: PotentialSpec, ctx: PrecisionContext | None = None) -> list[LHatAnchor] | None:
    name = BUILTIN_CALIBRATIONS.get(str(pot))
    if name is None:
        return None
    text = resources.files("vism.data").joinpath(name).read_text()
    return read_anchors(io.StringIO(text), ctx)


def builtin_interpolant(pot: PotentialSpec, ctx: PrecisionContext | None = None) -> LHatInterpolant | None:
    anchors = builtin_anchors(pot, ctx)
    return None if anchors is None else build_interpolant(anchors, ctx)
