"""Command line front end.

Subcommands print one table to stdout (CSV by default, JSON with
``--format json``).  Exit status: 0 when every verdict passes, 1 on a
failed verdict, 2 on invalid parameters, 3 when a budget or truncation
limit is hit.

CSV columns
  weight       family, state, value, log_magnitude
  correlation  points, embedding, oracle, determinant, abs_diff, tail_bound
  kernel       family, x, y, value
  scan         ladder, probe, source, target, error, verdict
  ortho        check, error, tol, passed
  sample       draw, points
  identity     suite, check, error, tol, passed
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import identities as ident
from .combinatorics import PointSet, Signature, YoungDiagram
from .dpp import WindowMatrix, corr_det, lattice_window, sample_dpp
from .errors import ParameterError, ZMeasureError
from .kernels import (GammaKernel, HypergeometricKernel, a_kernel, l_kernel, l_tail, tail_kernel)
from .limits import COUPLINGS, ScanSpec, run_scan
from .measures import (ZABParams, ZWParams, ZXiParams, correlation_oracle, plancherel_weight,
                       z_ensemble, z_weight, z_weight_frobenius, zab_ensemble, zab_weight,
                       zw_ensemble, zw_weight)
from .opkernels import AskeyLeskyBasis, ZABKernel

SCHEMA_VERSION = 1
log = logging.getLogger("zmeasures")

KERNEL_FAMILIES = ("hypergeom_first", "hypergeom_second", "gamma_first", "gamma_second", "psi",
                   "A_xi", "A_limit", "L_xi", "L_limit", "tail_first", "tail_second", "L_tail",
                   "dxi", "zw", "zab")
_COMPLEX_RE = re.compile(r"^\s*([+-]?[0-9.eE+-]*?)\s*(?:([+-])\s*([0-9.eE+-]*)\s*i)?\s*$")


def parse_complex(text: str) -> complex:
    """Parse ``RE``, ``RE+IMi``, ``RE-IMi`` or ``IMi``."""
    t = text.strip().replace(" ", "")
    if t.endswith("i") or t.endswith("j"):
        body = t[:-1]
        # split at the last sign that is not part of an exponent
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE":
                re_part, im_part = body[:k], body[k:]
                break
        else:
            re_part, im_part = "0", body
        if im_part in ("+", "-", ""):
            im_part += "1"
        try:
            return complex(float(re_part), float(im_part))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}") from exc
    try:
        return complex(float(t), 0.0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}") from exc


def format_complex(v: complex) -> str:
    v = complex(v)
    if v.imag == 0:
        return repr(v.real)
    return f"{v.real!r}{'+' if v.imag >= 0 else '-'}{abs(v.imag)!r}i"


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


# --------------------------------------------------------------------------
# output

@dataclass
class OutputRecord:
    command: str
    inputs: dict
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    verdicts: list[bool] = field(default_factory=list)

    def to_json(self) -> str:
        body = {"schema_version": SCHEMA_VERSION, "command": self.command, "inputs": self.inputs,
                "rows": [dict(zip(self.columns, r)) for r in self.rows],
                "verdicts": self.verdicts}
        return json.dumps(body, indent=2, allow_nan=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_cell(v) for v in r])
        return buf.getvalue()


def _cell(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _num(v) -> float:
    return float(np.real(v))


# --------------------------------------------------------------------------
# parameter records

def _pair(args, first: str = "z", second: str = "zp") -> tuple[complex, complex]:
    a = getattr(args, first)
    b = getattr(args, second)
    if a is None:
        raise ParameterError(f"--{first} is required")
    if b is None:
        if a.imag == 0:
            raise ParameterError(f"--{second} is required for a real --{first}")
        b = a.conjugate()
    return a, b


def _zxi(args) -> ZXiParams:
    z, zp = _pair(args)
    if args.xi is None:
        raise ParameterError("--xi is required")
    return ZXiParams(z, zp, args.xi)


def _zw(args) -> ZWParams:
    z, zp = _pair(args)
    w, wp = _pair(args, "w", "wp")
    return ZWParams(z, zp, w, wp, args.N)


def _zab(args) -> ZABParams:
    z, zp = _pair(args)
    return ZABParams(z, zp, args.a, args.b, args.N)


def _echo(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("func", "out", "verbose"):
            continue
        out[k] = format_complex(v) if isinstance(v, complex) else v
    # record the conjugate partner actually used
    for first, second in (("z", "zp"), ("w", "wp")):
        a = getattr(args, first, None)
        if a is not None and getattr(args, second, None) is None and a.imag != 0:
            out[second] = format_complex(a.conjugate())
    return out


# --------------------------------------------------------------------------
# subcommands

def cmd_weight(args) -> OutputRecord:
    rec = OutputRecord("weight", _echo(args), ["family", "state", "value", "log_magnitude"])
    entries = _ints(args.state) if args.state else []
    if args.family in ("zxi", "zxi_frobenius", "plancherel"):
        lam = YoungDiagram.of(*entries)
        if args.family == "plancherel":
            if args.theta is None:
                raise ParameterError("--theta is required")
            v = plancherel_weight(args.theta, lam)
            rec.rows.append([args.family, args.state, v, float(np.log(v)) if v > 0 else -np.inf])
            return rec
        fn = z_weight if args.family == "zxi" else z_weight_frobenius
        wv = fn(_zxi(args), lam)
    elif args.family == "zw":
        wv = zw_weight(Signature(tuple(entries)), _zw(args))
    elif args.family == "zab":
        wv = zab_weight(Signature(tuple(entries)), _zab(args))
    else:
        raise ParameterError(f"unknown family {args.family!r}")
    rec.rows.append([args.family, args.state, wv.value, wv.log_magnitude])
    return rec


def cmd_correlation(args) -> OutputRecord:
    rec = OutputRecord("correlation", _echo(args),
                       ["points", "embedding", "oracle", "determinant", "abs_diff", "tail_bound"])
    pts = _floats(args.points)
    PointSet.of(pts)
    if args.family == "zxi":
        p = _zxi(args)
        ens = z_ensemble(p, args.cutoff)
        H = HypergeometricKernel(p)
        form = "first" if args.embedding == "underline" else "second"
        M = np.array([[H.entry(form, x, y) for y in pts] for x in pts])
    else:
        if args.embedding != "underline":
            raise ParameterError("signature kernels are available for the underline embedding only")
        if args.family == "zw":
            p = _zw(args)
            ens = zw_ensemble(p, args.cutoff)
            K = AskeyLeskyBasis(p).kernel
        else:
            p = _zab(args)
            ens = zab_ensemble(p, args.cutoff)
            K = ZABKernel(p).kernel
        M = np.array([[K(x, y) for y in pts] for x in pts])
    orc = correlation_oracle(ens, pts, args.embedding, args.tol)
    det = float(np.linalg.det(M)) if len(pts) else 1.0
    diff = abs(orc.value - det)
    rec.rows.append([" ".join(repr(x) for x in pts), args.embedding, orc.value, det, diff, orc.tail_bound])
    if args.rtol is not None:
        rec.verdicts.append(bool(diff <= args.rtol * abs(det) + orc.tail_bound))
    return rec


def _kernel_fn(args):
    fam = args.family
    if fam in ("hypergeom_first", "hypergeom_second", "dxi"):
        H = HypergeometricKernel(_zxi(args))
        if fam == "dxi":
            return H.dxi
        form = fam.split("_")[1]
        return lambda x, y: H.entry(form, x, y)
    if fam in ("gamma_first", "gamma_second", "psi"):
        z, zp = (args.z, args.z) if fam == "psi" else _pair(args)
        if fam == "psi" and (args.zp is not None and args.zp != args.z):
            raise ParameterError("the psi kernel needs z = z'")
        if z is None:
            raise ParameterError("--z is required")
        G = GammaKernel(z, zp)
        form = "first" if fam == "psi" else fam.split("_")[1]
        return lambda x, y: G.entry(form, x, y)
    if fam in ("A_xi", "A_limit", "L_xi", "L_limit"):
        z, zp = _pair(args)
        xi = args.xi if fam.endswith("xi") else None
        if fam.endswith("xi") and xi is None:
            raise ParameterError("--xi is required")
        f = a_kernel if fam.startswith("A") else l_kernel
        return lambda x, y: f(x, y, z, zp, xi)
    if fam in ("tail_first", "tail_second"):
        z, zp = _pair(args)
        signs = (args.signs[0], args.signs[1])
        return lambda s, t: tail_kernel(fam.split("_")[1], s, t, z, zp, signs)
    if fam == "L_tail":
        z, zp = _pair(args)
        return lambda s, t: l_tail(s, t, z, zp, (args.signs[0], args.signs[1]))
    if fam == "zw":
        return AskeyLeskyBasis(_zw(args)).kernel
    if fam == "zab":
        return ZABKernel(_zab(args)).kernel
    raise ParameterError(f"unknown kernel family {fam!r}")


def cmd_kernel(args) -> OutputRecord:
    rec = OutputRecord("kernel", _echo(args), ["family", "x", "y", "value"])
    f = _kernel_fn(args)
    for x in _floats(args.x):
        for y in _floats(args.y):
            rec.rows.append([args.family, x, y, _num(f(x, y))])
    return rec


def _probes(text: str) -> tuple:
    out = []
    for item in text.split(";"):
        parts = item.strip().split(":")
        if len(parts) not in (2, 3):
            raise ParameterError(f"bad probe {item!r}; use x:y or s:t:signs")
        p = (float(parts[0]), float(parts[1])) + ((parts[2],) if len(parts) == 3 else ())
        out.append(p)
    return tuple(out)


def cmd_scan(args) -> OutputRecord:
    rec = OutputRecord("scan", _echo(args), ["ladder", "probe", "source", "target", "error", "verdict"])
    z, zp = _pair(args)
    extra = {}
    if args.source == "zw":
        w, wp = _pair(args, "w", "wp")
        extra = {"w": w, "wp": wp}
    elif args.source == "zab":
        extra = {"a": args.a, "b": args.b}
    spec = ScanSpec(args.source, args.coupling, _probes(args.probes), tuple(_floats(args.ladder)),
                    z, zp, args.form, args.eps, extra)
    table = run_scan(spec)
    for r in table.rows:
        rec.rows.append([r.ladder, ":".join(str(v) for v in r.probe), r.source, r.target, r.error, table.verdict])
    if table.verdict != "exploratory":
        rec.verdicts.append(table.verdict == "decreasing")
    return rec


def _checks(rec: OutputRecord, suite: str | None, checks) -> None:
    for c in checks:
        row = [c.label, c.error, c.tol, c.passed]
        rec.rows.append([suite, *row] if suite is not None else row)
        rec.verdicts.append(c.passed)


def cmd_ortho(args) -> OutputRecord:
    rec = OutputRecord("ortho", _echo(args), ["check", "error", "tol", "passed"])
    if args.family == "zw":
        _checks(rec, None, ident.askey_lesky_suite(_zw(args), args.shell_tol))
    else:
        _checks(rec, None, ident.neretin_suite(_zab(args), args.n_max, args.shell_tol))
    return rec


def cmd_sample(args) -> OutputRecord:
    rec = OutputRecord("sample", _echo(args), ["draw", "points"])
    pts = lattice_window(args.window)
    fam = args.family
    if fam.startswith("hypergeom"):
        M = HypergeometricKernel(_zxi(args)).matrix(pts, fam.split("_")[1])
    else:
        M = GammaKernel(*_pair(args)).matrix(pts, fam.split("_")[1])
    batch = sample_dpp(WindowMatrix(pts, M), args.seed, args.count)
    for i, d in enumerate(batch.draws):
        rec.rows.append([i, " ".join(repr(v) for v in d.floats())])
    return rec


def cmd_identity(args) -> OutputRecord:
    s = args.suite
    # suites run at a reference point unless parameters are given
    if args.z is None:
        args.z, args.zp = complex(0.3), complex(0.6)
    if args.xi is None and s != "projection":
        args.xi = 0.5
    rec = OutputRecord("identity", _echo(args), ["suite", "check", "error", "tol", "passed"])
    if s == "form-relation":
        checks = ident.form_relation(_zxi(args), args.window)
    elif s == "gamma-form-relation":
        checks = ident.gamma_form_relation(*_pair(args), window=args.window)
    elif s == "xi-derivative":
        checks = ident.xi_derivative(_zxi(args))
    elif s == "block-algebra":
        z, zp = _pair(args)
        checks = ident.block_algebra(args.seed, 2 * args.window, z, zp, args.xi if args.xi else 0.5)
    elif s == "resolvent":
        checks = ident.resolvent(_zxi(args), args.window)
    elif s == "fourier":
        z, zp = _pair(args)
        checks = ident.fourier_identities(z, zp) + ident.fourier_quadrature(z, zp)
    elif s == "projection":
        z, zp = _pair(args)
        kind = "hypergeometric" if args.xi is not None else "gamma"
        res, ok = ident.projection_trend(kind, z, zp, args.xi)
        for n, r in zip((40, 80, 160), res):
            rec.rows.append([s, f"interior residual, window {n}", r, float("nan"), ok])
        rec.verdicts.append(ok)
        return rec
    else:
        raise ParameterError(f"unknown suite {s!r}")
    _checks(rec, s, checks)
    return rec


# --------------------------------------------------------------------------
# parser

def _add_params(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("parameters")
    g.add_argument("--z", type=parse_complex, help="z as RE or RE+IMi")
    g.add_argument("--zp", type=parse_complex, help="z'; defaults to conj(z) for complex z")
    g.add_argument("--xi", type=float)
    g.add_argument("--w", type=parse_complex)
    g.add_argument("--wp", type=parse_complex)
    g.add_argument("--N", type=int, default=1)
    g.add_argument("--a", type=float, default=0.5)
    g.add_argument("--b", type=float, default=0.25)
    g.add_argument("--theta", type=float)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write to FILE instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zmeasures", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weight", help="weight of one state")
    _add_params(p)
    p.add_argument("--family", choices=("zxi", "zxi_frobenius", "zw", "zab", "plancherel"), required=True)
    p.add_argument("--state", default="", help="diagram rows or signature entries, comma separated")
    p.set_defaults(func=cmd_weight)

    p = sub.add_parser("correlation", help="enumeration oracle against the kernel determinant")
    _add_params(p)
    p.add_argument("--family", choices=("zxi", "zw", "zab"), required=True)
    p.add_argument("--points", required=True)
    p.add_argument("--embedding", choices=("underline", "frobenius"), default="underline")
    p.add_argument("--cutoff", type=int, default=28, help="max |lambda| (zxi) or entry bound (zw, zab)")
    p.add_argument("--tol", type=float, help="fail with exit 3 if the truncation tail exceeds this")
    p.add_argument("--rtol", type=float, help="emit a verdict with this relative tolerance")
    p.set_defaults(func=cmd_correlation)

    p = sub.add_parser("kernel", help="kernel values on a grid")
    _add_params(p)
    p.add_argument("--family", choices=KERNEL_FAMILIES, required=True)
    p.add_argument("--x", required=True, help="comma separated (s for tail kernels)")
    p.add_argument("--y", required=True, help="comma separated (t for tail kernels)")
    p.add_argument("--signs", default="++", help="sign pair for second-form tail kernels")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("scan", help="scaling-limit error table")
    _add_params(p)
    p.add_argument("--source", choices=("hypergeometric", "gamma", "zw", "zab"), required=True)
    p.add_argument("--coupling", choices=COUPLINGS, required=True)
    p.add_argument("--ladder", required=True)
    p.add_argument("--probes", required=True, help="x:y pairs separated by ';' (s:t:+- for tails)")
    p.add_argument("--form", choices=("first", "second"), default="first")
    p.add_argument("--eps", type=float)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("ortho", help="orthogonal-polynomial residuals")
    _add_params(p)
    p.add_argument("--family", choices=("zw", "zab"), required=True)
    p.add_argument("--n-max", dest="n_max", type=int, default=5)
    p.add_argument("--shell-tol", dest="shell_tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_ortho)

    p = sub.add_parser("sample", help="exact samples on a finite window")
    _add_params(p)
    p.add_argument("--family", choices=("gamma_first", "gamma_second", "hypergeom_first", "hypergeom_second"),
                   default="gamma_first")
    p.add_argument("--window", type=int, default=10, help="sites are the 2n half-integers with |x| < n")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("identity", help="exact identity suites")
    _add_params(p)
    p.add_argument("--suite", choices=ident.SUITES, required=True)
    p.add_argument("--window", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_identity)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        rec = args.func(args)
    except ZMeasureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    text = rec.to_json() if args.format == "json" else rec.to_csv()
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not all(rec.verdicts):
        log.warning("%d of %d verdicts failed", rec.verdicts.count(False), len(rec.verdicts))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
