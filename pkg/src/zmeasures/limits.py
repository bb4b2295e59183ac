"""Scaling-limit scans: xi -> 1, N -> infinity and the logarithmic tail regime.

Each scan evaluates a source kernel along a ladder of parameter values and
compares it with its limit kernel at fixed probes.  The verdict is a pure
trend test: "decreasing" iff the error strictly decreases along the ladder
at every probe.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ParameterError
from .kernels import GammaKernel, HypergeometricKernel, epsilon_sign, tail_kernel
from .measures import ZABParams, ZWParams, ZXiParams, plancherel_weight, z_weight
from .combinatorics import YoungDiagram
from .opkernels import AskeyLeskyBasis, ZABKernel

COUPLINGS = ("xi_ladder", "n_ladder", "tail_s0_ladder", "coupled_xi_s0", "coupled_n_s0")
SOURCES = ("hypergeometric", "gamma", "zw", "zab")


@dataclass(frozen=True)
class ScanSpec:
    """One scan.

    Probes are lattice pairs (x, y) for the xi and N ladders.  For the tail
    couplings a probe is (s, t) or (s, t, signs) with signs such as "+-",
    meaning x = +e^(s0+s), y = -e^(s0+t).
    """

    source: str
    coupling: str
    probes: tuple
    ladder: tuple[float, ...]
    z: complex
    zp: complex
    form: str = "first"
    eps: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.coupling not in COUPLINGS:
            raise ParameterError(f"unknown coupling {self.coupling!r}")
        if self.source not in SOURCES:
            raise ParameterError(f"unknown source kernel {self.source!r}")
        if self.form not in ("first", "second"):
            raise ParameterError("form must be 'first' or 'second'")
        if not self.ladder or not self.probes:
            raise ParameterError("need at least one ladder value and one probe")
        if self.coupling.startswith("coupled"):
            bound = 1 - abs((complex(self.z) - complex(self.zp)).real)
            if self.eps is None or not 0 < self.eps < bound:
                raise ParameterError(f"coupled scans need 0 < eps < {bound:.6g}")
        pairs = {
            "xi_ladder": ("hypergeometric",),
            "n_ladder": ("zw", "zab"),
            "tail_s0_ladder": ("gamma",),
            "coupled_xi_s0": ("hypergeometric",),
            "coupled_n_s0": ("zw",),
        }
        if self.source not in pairs[self.coupling]:
            raise ParameterError(f"coupling {self.coupling} does not apply to source {self.source}")

    @property
    def target(self) -> str:
        return "gamma" if self.coupling in ("xi_ladder", "n_ladder") else "tail"

    @property
    def exploratory(self) -> bool:
        return self.coupling == "coupled_n_s0"


@dataclass(frozen=True)
class ErrorRow:
    ladder: float
    probe: tuple
    source: float
    target: float
    error: float


@dataclass(frozen=True)
class ErrorTable:
    rows: tuple[ErrorRow, ...]
    verdict: str

    @property
    def max_error(self) -> float:
        return max(r.error for r in self.rows)

    def final_errors(self) -> list[float]:
        last = self.rows[-1].ladder
        return [r.error for r in self.rows if r.ladder == last]

    def by_probe(self) -> dict:
        out: dict = {}
        for r in self.rows:
            out.setdefault(r.probe, []).append(r.error)
        return out

    def as_records(self) -> list[dict]:
        return [{"ladder": r.ladder, "probe": list(r.probe), "source": r.source,
                 "target": r.target, "error": r.error} for r in self.rows]


def trend_verdict(errors_by_probe: dict) -> str:
    ok = all(all(b < a for a, b in zip(errs, errs[1:])) for errs in errors_by_probe.values())
    return "decreasing" if ok else "not decreasing"


def nearest_site(v: float) -> float:
    """The point of Z + 1/2 closest to v."""
    return math.floor(v) + 0.5


def _split_probe(p) -> tuple[float, float, str]:
    if len(p) == 2:
        return float(p[0]), float(p[1]), "++"
    return float(p[0]), float(p[1]), str(p[2])


def _tail_point(s0: float, s: float, sign: str) -> tuple[float, float]:
    """Lattice site near +-e^(s0+s) and its effective s coordinate."""
    x = nearest_site(math.exp(s0 + s))
    return (x if sign == "+" else -x), math.log(x) - s0


def _zw_second(K: AskeyLeskyBasis, x: float, y: float) -> float:
    """Entry of the circ transform of the zw kernel (negative rows flipped)."""
    v = K.kernel(x, y)
    if x < 0:
        v = (1.0 if x == y else 0.0) - v
    return epsilon_sign(x) * v / epsilon_sign(y)


def _source_factory(spec: ScanSpec, value: float) -> Callable[[float, float], float]:
    z, zp = spec.z, spec.zp
    if spec.source == "hypergeometric":
        xi = value if spec.coupling == "xi_ladder" else 1 - math.exp(-value / spec.eps)
        K = HypergeometricKernel(ZXiParams(z, zp, xi))
        return lambda x, y: K.entry(spec.form, x, y)
    if spec.source == "gamma":
        G = GammaKernel(z, zp)
        return lambda x, y: G.entry(spec.form, x, y)
    if spec.source == "zw":
        N = int(value) if spec.coupling == "n_ladder" else math.ceil(math.exp(value / spec.eps))
        B = AskeyLeskyBasis(ZWParams(z, zp, spec.extra["w"], spec.extra["wp"], N))
        if spec.form == "second":
            return lambda x, y: _zw_second(B, x, y)
        return B.kernel
    K8 = ZABKernel(ZABParams(z, zp, spec.extra["a"], spec.extra["b"], int(value)))
    return K8.kernel


def run_scan(spec: ScanSpec) -> ErrorTable:
    rows = []
    if spec.target == "gamma":
        target = GammaKernel(-spec.z, -spec.zp) if spec.coupling == "n_ladder" else GammaKernel(spec.z, spec.zp)
        want = {p: target.entry(spec.form, float(p[0]), float(p[1])) for p in spec.probes}
        for v in spec.ladder:
            src = _source_factory(spec, v)
            for p in spec.probes:
                s = float(src(float(p[0]), float(p[1])))
                rows.append(ErrorRow(v, tuple(p), s, want[p], abs(s - want[p])))
    else:
        # tail limits carry the sqrt(|x||y|) Jacobian; the N-coupled harness
        # compares against the tail kernel with negated parameters
        tz, tzp = (-spec.z, -spec.zp) if spec.coupling == "coupled_n_s0" else (spec.z, spec.zp)
        for v in spec.ladder:
            src = _source_factory(spec, v)
            for p in spec.probes:
                s, t, signs = _split_probe(p)
                if spec.form == "first" and signs != "++":
                    raise ParameterError("first-form tail probes live on the positive half-line")
                x, se = _tail_point(v, s, signs[0])
                y, te = _tail_point(v, t, signs[1])
                val = math.sqrt(abs(x * y)) * float(src(x, y))
                tgt = tail_kernel(spec.form, se, te, tz, tzp, (signs[0], signs[1]))
                rows.append(ErrorRow(v, tuple(p), val, tgt, abs(val - tgt)))
    table = ErrorTable(tuple(rows), "")
    verdict = "exploratory" if spec.exploratory else trend_verdict(table.by_probe())
    return ErrorTable(tuple(rows), verdict)


# --------------------------------------------------------------------------
# density and cross-window profiles

def density_constant(z: complex, zp: complex) -> float:
    """c in x K(x, x) -> c for the gamma kernel."""
    z, zp = complex(z), complex(zp)
    sz, szp = np.sin(np.pi * z), np.sin(np.pi * zp)
    if z == zp:
        return float((sz * szp).real / np.pi**2)
    return float(((z - zp) * sz * szp / (np.pi * np.sin(np.pi * (z - zp)))).real)


@dataclass(frozen=True)
class ProfileTable:
    rows: tuple[tuple[float, float, float], ...]  # (x, |x| K(x, x), |. - c|)
    constant: float
    verdict: str


def density_profile(z: complex, zp: complex, xs: Sequence[float], form: str = "first") -> ProfileTable:
    """|x| K^gamma(x, x) along a ladder of sites, against its limit constant."""
    G = GammaKernel(z, zp)
    c = density_constant(z, zp)
    rows = []
    for x in xs:
        v = abs(x) * G.entry(form, float(x), float(x))
        rows.append((float(x), float(v), abs(v - c)))
    errs = [r[2] for r in rows]
    verdict = "decreasing" if all(b < a for a, b in zip(errs, errs[1:])) else "not decreasing"
    return ProfileTable(tuple(rows), c, verdict)


@dataclass(frozen=True)
class CrossTable:
    rows: tuple[tuple[int, float], ...]  # (N, max |K(x, y)|)
    verdict: str


def cross_decay(params: ZWParams, offsets: Sequence[float], Ns: Sequence[int]) -> CrossTable:
    """max |K(x, y)| over x = offset near 0 and y = -N + offset near -N."""
    rows = []
    for N in Ns:
        B = AskeyLeskyBasis(params.with_N(N))
        m = max(abs(B.kernel(float(a), float(-N + b))) for a in offsets for b in offsets)
        rows.append((int(N), float(m)))
    vals = [r[1] for r in rows]
    verdict = "decreasing" if all(b < a for a, b in zip(vals, vals[1:])) else "not decreasing"
    return CrossTable(tuple(rows), verdict)


def reversal_gap(params: ZWParams, points: Sequence[float]) -> float:
    """max |K_{z,w}(x, y) - K_{w,z}(-N-x, -N-y)| over the given points."""
    B = AskeyLeskyBasis(params)
    R = AskeyLeskyBasis(params.swapped())
    N = params.N
    return max(abs(B.kernel(x, y) - R.kernel(-N - x, -N - y)) for x in points for y in points)


# --------------------------------------------------------------------------
# Plancherel degeneration

def plancherel_scan(theta: float, diagrams: Sequence[YoungDiagram], ts: Sequence[float]) -> ErrorTable:
    """|M_{t,t,theta/t^2}(lam) - M_theta(lam)| along a ladder of t."""
    rows = []
    for t in ts:
        p = ZXiParams(t, t, theta / t**2)
        for lam in diagrams:
            a = z_weight(p, lam).value
            b = plancherel_weight(theta, lam)
            rows.append(ErrorRow(float(t), lam.parts, a, b, abs(a - b)))
    table = ErrorTable(tuple(rows), "")
    return ErrorTable(tuple(rows), trend_verdict(table.by_probe()))
