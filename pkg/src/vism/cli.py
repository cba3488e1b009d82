"""Command-line driver: ``vism solve | scan-l | calibrate | compare``.

Results go to ``--out`` (or stdout) as JSON with decimal-string numbers or as
plot-ready CSV.  Wall time is reported on stderr so that output files are
byte-identical across runs of the same configuration; ``--timing`` also
embeds it in the document.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

from .basis import BasisSpec, Mode
from .eigen import solve as solve_spectrum
from .errors import (BracketInvalid, InsufficientAnchors, NonMonotoneAnchors, PotentialSyntaxError,
                     ReferenceRequired, ReferenceUnavailable, VismError)
from .hamiltonian import assemble
from .numeric import PrecisionContext, to_decimal
from .optimize import (Method, build_interpolant, builtin_anchors, find_L_hat, read_anchors,
                       scan_E_vs_L, scan_features, write_anchors)
from .potential import PotentialSpec
from .reference import reference_for
from .solution import (bound_states, delta_E_exact, delta_E_hat_states, delta_psi_exact, psi_csv)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    potential: str = "x^2"
    mode: str = "periodic"
    N: int = 10
    L: str = "auto"
    precision: int = 30
    states: int = 1
    format: str = "json"
    out: str | None = None
    anchors: str | None = None
    method: str = Method.ENERGY_INFLECTION_PERIODIC.value
    reference: str | None = None
    delta_hat: bool = False
    timing: bool = False
    L_range: list = field(default_factory=lambda: ["2", "8"])
    samples: int = 25
    N_list: list = field(default_factory=list)
    psi_out: str | None = None
    psi_state: int = 0
    grid: int = 1001

    def validate(self) -> "RunConfig":
        try:
            self.pot = PotentialSpec.parse(str(self.potential))
            self.mode = Mode(self.mode).value
        except (PotentialSyntaxError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if int(self.N) < 1:
            raise ConfigError("N must be a positive integer")
        if int(self.precision) < 16:
            raise ConfigError("precision must be at least 16 digits")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if int(self.states) < 1:
            raise ConfigError("states must be positive")
        try:
            Method(self.method)
        except ValueError as exc:
            raise ConfigError(f"unknown method {self.method!r}") from exc
        if str(self.L) != "auto":
            try:
                if not PrecisionContext(16).real(str(self.L)) > 0:
                    raise ConfigError("L must be positive")
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"invalid L {self.L!r}") from exc
        self.N, self.precision, self.states = int(self.N), int(self.precision), int(self.states)
        return self

    @property
    def ctx(self) -> PrecisionContext:
        return PrecisionContext(self.precision)

    def interpolant(self):
        ctx = self.ctx
        if self.anchors:
            try:
                with open(self.anchors) as fh:
                    anchors = read_anchors(fh, ctx)
            except OSError as exc:
                raise ConfigError(f"cannot read anchors: {exc}") from exc
            except ValueError as exc:
                raise ConfigError(f"bad anchor table: {exc}") from exc
        else:
            anchors = builtin_anchors(self.pot, ctx)
            if anchors is None:
                raise ConfigError(f"L=auto needs --anchors: no built-in calibration for '{self.pot}'")
        try:
            return build_interpolant(anchors, ctx)
        except (InsufficientAnchors, NonMonotoneAnchors, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def L_value(self, interp=None):
        if str(self.L) == "auto":
            return (interp or self.interpolant())(self.N)
        return self.ctx.real(str(self.L))


# ---------------------------------------------------------------------------
# output


def _emit(cfg: RunConfig, doc: dict, rows: list[dict], columns: list[str], text_out=None):
    if cfg.format == "json":
        text = json.dumps({**doc, "rows": rows}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        for k, v in doc.get("metadata", {}).items():
            buf.write(f"# {k}={json.dumps(v) if not isinstance(v, str) else v}\n")
        w = csv.DictWriter(buf, columns, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow(r)
        text = buf.getvalue()
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        (text_out or sys.stdout).write(text)


def _metadata(cfg: RunConfig, L=None, **extra) -> dict:
    meta = {"potential": str(cfg.pot), "mode": cfg.mode, "N": cfg.N, "precision": cfg.precision}
    if L is not None:
        meta["L"] = to_decimal(L, cfg.precision)
    meta.update(extra)
    return meta


def _fmt(cfg, v):
    return None if v is None else to_decimal(v, cfg.precision)


# ---------------------------------------------------------------------------
# commands


def cmd_solve(cfg: RunConfig) -> tuple[dict, list[dict]]:
    ctx = cfg.ctx
    interp = cfg.interpolant() if cfg.L == "auto" else None
    L = cfg.L_value(interp)
    spec = BasisSpec(cfg.mode, cfg.N, L)
    h = assemble(spec, cfg.pot, ctx)
    states = bound_states(solve_spectrum(h, ctx), spec, cfg.states)
    ref = reference_for(cfg.pot, cfg.reference) if cfg.reference else None
    hats = [None] * len(states)
    if cfg.delta_hat:
        nxt = interp if interp is not None else (lambda n: L)
        hats = delta_E_hat_states(cfg.pot, cfg.mode, cfg.N, len(states), nxt, ctx,
                                  energies=[s.energy for s in states])
    rows = []
    for s, hat in zip(states, hats):
        row = {"n": s.n, "energy": _fmt(cfg, s.energy), "parity": s.parity,
               "delta_E_hat": _fmt(cfg, hat)}
        if ref is not None:
            row["delta_E"] = _fmt(cfg, delta_E_exact(s, ref.energy(s.n, ctx)))
            try:
                row["delta_psi"] = _fmt(cfg, delta_psi_exact(s, lambda x, n=s.n: ref.psi(n, x, ctx), cfg.grid))
            except ReferenceUnavailable:
                row["delta_psi"] = None
        rows.append(row)
    if cfg.psi_out:
        with open(cfg.psi_out, "w") as fh:
            psi_csv(states[cfg.psi_state], cfg.grid, fh)
    return {"command": "solve", "metadata": _metadata(cfg, L, states=len(states))}, rows


SOLVE_COLUMNS = ["n", "energy", "parity", "delta_E_hat", "delta_E", "delta_psi"]


def cmd_scan_l(cfg: RunConfig) -> tuple[dict, list[dict]]:
    ctx = cfg.ctx
    if int(cfg.samples) < 5:
        raise ConfigError("scan needs at least 5 samples")
    ref = reference_for(cfg.pot, cfg.reference) if cfg.reference else None
    rows, features = [], {}
    for N in cfg.N_list or [cfg.N]:
        scan = scan_E_vs_L(cfg.pot, cfg.mode, int(N), 0, cfg.L_range, int(cfg.samples), ctx)
        feats = scan_features(scan, ctx)
        features[str(N)] = {
            "minima": [_fmt(cfg, feats["L"][i]) for i in feats["minima"]],
            "inflections": [[_fmt(cfg, feats["L"][i]), _fmt(cfg, feats["L"][j])]
                            for i, j in feats["inflections"]],
        }
        exact = ref.energy(0, ctx) if ref is not None else None
        for L, E in scan:
            row = {"N": int(N), "L": _fmt(cfg, L), "E": _fmt(cfg, E)}
            if exact is not None:
                with ctx.local():
                    row["delta_E"] = _fmt(cfg, abs(E - exact) / abs(exact))
            rows.append(row)
    meta = _metadata(cfg, samples=int(cfg.samples), L_range=[str(v) for v in cfg.L_range],
                     features=features)
    return {"command": "scan-l", "metadata": meta}, rows


SCAN_COLUMNS = ["N", "L", "E", "delta_E"]


def cmd_calibrate(cfg: RunConfig) -> tuple[dict, list[dict]]:
    ctx = cfg.ctx
    Ns = [int(n) for n in cfg.N_list]
    if not Ns:
        raise ConfigError("calibrate needs a non-empty N list")
    if Ns != sorted(set(Ns)):
        raise ConfigError("N list must be strictly ascending")
    method = Method(cfg.method)
    ref = None
    if method.needs_reference:
        if not cfg.reference:
            raise ConfigError(f"{method.value} needs --reference")
        ref = reference_for(cfg.pot, cfg.reference)
    anchors, failures = [], {}
    for N in Ns:
        try:
            anchors.append(find_L_hat(cfg.pot, method, N, ctx=ctx, reference=ref))
        except BracketInvalid as exc:
            failures[str(N)] = str(exc)
    rows = [{"N": a.N, "L_hat": _fmt(cfg, a.L_hat), "method": a.method.value,
             "state_index": a.state_index} for a in anchors]
    meta = _metadata(cfg, method=method.value, failures=failures)
    meta.pop("N")
    if len(anchors) >= 3:
        meta["interpolant"] = build_interpolant(anchors, ctx).summary(cfg.precision)["power_law"]
    doc = {"command": "calibrate", "metadata": meta}
    doc["_anchors"] = anchors
    return doc, rows


def cmd_compare(cfg: RunConfig) -> tuple[dict, list[dict]]:
    ctx = cfg.ctx
    if not cfg.reference:
        raise ConfigError("compare needs --reference (exact, perturbation0 or perturbation1)")
    ref = reference_for(cfg.pot, cfg.reference)
    interp = cfg.interpolant() if cfg.L == "auto" else None
    L = cfg.L_value(interp)
    spec = BasisSpec(cfg.mode, cfg.N, L)
    h = assemble(spec, cfg.pot, ctx)
    spectrum = solve_spectrum(h, ctx, vectors=False)
    rows = []
    with ctx.local():
        for n in range(min(cfg.states, len(spectrum))):
            e = spectrum.eigenvalues[n]
            r = ref.energy(n, ctx)
            rows.append({"n": n, "E_SM": _fmt(cfg, e), "E_ref": _fmt(cfg, r),
                         "rel_diff": _fmt(cfg, abs(r - e) / abs(e))})
    return {"command": "compare", "metadata": _metadata(cfg, L, reference=ref.name)}, rows


COMPARE_COLUMNS = ["n", "E_SM", "E_ref", "rel_diff"]


# ---------------------------------------------------------------------------
# argument handling


def _csv_list(text: str) -> list[str]:
    return [t for t in text.replace(" ", "").split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vism", description="Fourier-Galerkin Schroedinger solver with optimised domain size")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
        sp.add_argument("--potential")
        sp.add_argument("--mode", choices=[m.value for m in Mode])
        sp.add_argument("-N", type=int, dest="N")
        sp.add_argument("--L", dest="L", help="half-length, or 'auto'")
        sp.add_argument("--precision", type=int, help="significant decimal digits")
        sp.add_argument("--states", type=int)
        sp.add_argument("--format", choices=["json", "csv"])
        sp.add_argument("--anchors", help="anchor CSV for L=auto")
        sp.add_argument("--method", choices=[m.value for m in Method])
        sp.add_argument("--reference", choices=["exact", "perturbation0", "perturbation1"])
        sp.add_argument("--out")
        sp.add_argument("--timing", action="store_true", default=None, help="embed wall time in the output")
        return sp

    s = common(sub.add_parser("solve", help="eigenpairs at one (N, L)"))
    s.add_argument("--delta-hat", dest="delta_hat", action="store_true", default=None,
                   help="also report the N vs N+1 estimator per state")
    s.add_argument("--psi-out", dest="psi_out", help="write x,psi samples of one state here")
    s.add_argument("--psi-state", dest="psi_state", type=int)
    s.add_argument("--grid", type=int, help="grid points for delta_psi and --psi-out")

    s = common(sub.add_parser("scan-l", help="ground energy versus L"))
    s.add_argument("--L-range", dest="L_range", nargs=2, metavar=("LMIN", "LMAX"))
    s.add_argument("--samples", type=int)
    s.add_argument("--N-list", dest="N_list", type=_csv_list, help="comma list for a 2-D (N, L) sweep")

    s = common(sub.add_parser("calibrate", help="find L-hat anchors"))
    s.add_argument("--N-list", dest="N_list", type=_csv_list, required=False)

    common(sub.add_parser("compare", help="energies against a reference"))
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        if "lhat_anchors" in data:
            data.setdefault("anchors", data.pop("lhat_anchors"))
        if "output" in data and isinstance(data["output"], dict):
            out = data.pop("output")
            data.setdefault("out", out.get("path"))
            if "format" in out:
                data.setdefault("format", out["format"])
    names = {f.name for f in fields(RunConfig)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for name in names:
        v = getattr(args, name, None)
        if v is not None:
            data[name] = v
    return RunConfig(**data).validate()


COMMANDS = {
    "solve": (cmd_solve, SOLVE_COLUMNS),
    "scan-l": (cmd_scan_l, SCAN_COLUMNS),
    "calibrate": (cmd_calibrate, ["N", "L_hat", "method", "state_index"]),
    "compare": (cmd_compare, COMPARE_COLUMNS),
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    started = time.perf_counter()
    try:
        cfg = config_from_args(args)
        fn, columns = COMMANDS[args.command]
        doc, rows = fn(cfg)
    except (ConfigError, ReferenceUnavailable, ReferenceRequired) as exc:
        print(f"vism: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VismError as exc:
        print(f"vism: numerical failure in {type(exc).__module__}: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERIC
    elapsed = time.perf_counter() - started
    anchors = doc.pop("_anchors", None)
    if cfg.timing:
        doc["metadata"]["wall_time_s"] = round(elapsed, 3)
    if anchors is not None and cfg.format == "csv":
        text = write_anchors(anchors, digits=cfg.precision)
        summary = json.dumps(doc["metadata"], indent=2) + "\n"
        if cfg.out:
            Path(cfg.out).write_text(text)
            Path(cfg.out + ".summary.json").write_text(summary)
        else:
            sys.stdout.write(text)
            sys.stderr.write(summary)
    else:
        _emit(cfg, doc, rows, columns)
    print(f"vism {args.command}: wall time {elapsed:.3f} s", file=sys.stderr)
    if args.command == "calibrate" and doc["metadata"]["failures"]:
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
