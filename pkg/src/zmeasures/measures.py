"""Weights, parameter admissibility and the brute-force correlation oracle for
z-measures on partitions, zw-measures on signatures and z-measures on
nonnegative signatures."""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import combinatorics as cb
from .combinatorics import PointSet, Signature, YoungDiagram
from .errors import BudgetError, ParameterError
from .specfun import log_rgamma, log_gamma


class AdmissibilityClass(enum.Enum):
    PRINCIPAL = "i"
    COMPLEMENTARY = "ii"
    DEGENERATE = "iii"
    INADMISSIBLE = "inadmissible"

    @property
    def kernel_ok(self) -> bool:
        return self in (AdmissibilityClass.PRINCIPAL, AdmissibilityClass.COMPLEMENTARY)


def _is_int(v: complex) -> bool:
    return v.imag == 0 and v.real == round(v.real)


def classify(z, zp, tol: float = 1e-13) -> AdmissibilityClass:
    """Admissibility class of (z, z') by the nonnegativity criterion."""
    z, zp = complex(z), complex(zp)
    if z == 0 or zp == 0:
        raise ParameterError("z and z' must be nonzero")
    if z.imag != 0 and abs(zp - z.conjugate()) <= tol * (1 + abs(z)):
        return AdmissibilityClass.PRINCIPAL
    if z.imag == 0 and zp.imag == 0:
        a, b = z.real, zp.real
        if not _is_int(z) and not _is_int(zp) and math.floor(a) == math.floor(b):
            return AdmissibilityClass.COMPLEMENTARY
        for k, other in ((a, b), (b, a)):
            if k == round(k) and k != 0 and other * k > 0 and abs(other) > abs(k) - 1:
                return AdmissibilityClass.DEGENERATE
    return AdmissibilityClass.INADMISSIBLE


@dataclass(frozen=True)
class ZXiParams:
    z: complex
    zp: complex
    xi: float

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "zp", complex(self.zp))
        if not 0 < self.xi < 1:
            raise ParameterError("xi must lie in (0, 1)")

    @property
    def admissibility_class(self) -> AdmissibilityClass:
        return classify(self.z, self.zp)

    def require_weights(self) -> None:
        if self.admissibility_class is AdmissibilityClass.INADMISSIBLE:
            raise ParameterError(f"inadmissible parameters z={self.z}, z'={self.zp}")

    def require_kernel(self) -> None:
        if not self.admissibility_class.kernel_ok:
            raise ParameterError("kernels need (z, z') in the principal or complementary class")

    @property
    def zzp(self) -> float:
        return (self.z * self.zp).real

    def negated(self) -> "ZXiParams":
        return ZXiParams(-self.z, -self.zp, self.xi)


def _require_pair(z: complex, zp: complex, label: str) -> None:
    if not classify(z, zp).kernel_ok:
        raise ParameterError(f"({label}) must be a conjugate pair or a real pair in one unit interval")


@dataclass(frozen=True)
class ZWParams:
    z: complex
    zp: complex
    w: complex
    wp: complex
    N: int

    def __post_init__(self):
        for name in ("z", "zp", "w", "wp"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.N < 1:
            raise ParameterError("N must be positive")
        _require_pair(self.z, self.zp, "z, z'")
        _require_pair(self.w, self.wp, "w, w'")
        if self.sigma.real <= -1:
            raise ParameterError("need Re(z + z' + w + w') > -1")

    @property
    def sigma(self) -> complex:
        return self.z + self.zp + self.w + self.wp

    def swapped(self) -> "ZWParams":
        return ZWParams(self.w, self.wp, self.z, self.zp, self.N)

    def with_N(self, N: int) -> "ZWParams":
        return ZWParams(self.z, self.zp, self.w, self.wp, N)


@dataclass(frozen=True)
class ZABParams:
    z: complex
    zp: complex
    a: float
    b: float
    N: int

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "zp", complex(self.zp))
        if self.N < 1:
            raise ParameterError("N must be positive")
        if not (self.a > -1 and self.b > -1):
            raise ParameterError("need a > -1 and b > -1")
        _require_pair(self.z, self.zp, "z, z'")
        if (self.z + self.zp).real <= -1 - self.b:
            raise ParameterError("weights are not summable: need Re(z + z') > -1 - b")

    @property
    def eps(self) -> float:
        return (self.a + self.b + 1) / 2

    @property
    def moment_condition(self) -> bool:
        """Finite 4N-th moment of the weight, needed for the order-N polynomials."""
        return (self.z + self.zp).real > 1 - self.b

    def with_N(self, N: int) -> "ZABParams":
        return ZABParams(self.z, self.zp, self.a, self.b, N)


@dataclass(frozen=True)
class WeightValue:
    log_magnitude: float
    phase: complex = 1 + 0j

    @classmethod
    def from_log(cls, lg: complex) -> "WeightValue":
        if lg.real == -np.inf:
            return cls(-np.inf, 1 + 0j)
        return cls(float(lg.real), cmath.exp(1j * lg.imag))

    @property
    def value(self) -> float:
        """Real value; the phase must be +-1 up to rounding."""
        if self.log_magnitude == -np.inf:
            return 0.0
        return (self.phase * math.exp(self.log_magnitude)).real

    @property
    def complex_value(self) -> complex:
        if self.log_magnitude == -np.inf:
            return 0j
        return self.phase * math.exp(self.log_magnitude)


def _log_content_product(zc: complex, lam: YoungDiagram) -> complex:
    out = 0j
    for i, j in lam.boxes():
        v = zc + j - i
        if v == 0:
            return complex(-np.inf, 0)
        out += cmath.log(v)
    return out


def z_weight(params: ZXiParams, lam: YoungDiagram) -> WeightValue:
    """Probability of lam under the z-measure (row/content form)."""
    params.require_weights()
    lg = (params.z * params.zp) * math.log1p(-params.xi)
    lg += _log_content_product(params.z, lam) + _log_content_product(params.zp, lam)
    if lg.real == -np.inf:
        return WeightValue(-np.inf)
    lg += 2 * math.log(cb.dim_ratio(lam)) + lam.size * math.log(params.xi)
    return WeightValue.from_log(lg)


def z_weight_frobenius(params: ZXiParams, lam: YoungDiagram) -> WeightValue:
    """Same weight written through Frobenius coordinates."""
    params.require_weights()
    f = cb.frobenius(lam)
    z, zp = params.z, params.zp
    val = (1 - params.xi) ** (z * zp) * params.xi ** lam.size * (z * zp) ** f.d
    for p, q in zip(f.p, f.q):
        for k in range(p):
            val *= (z + 1 + k) * (zp + 1 + k)
        for k in range(q):
            val *= (-z + 1 + k) * (-zp + 1 + k)
    val *= cb.dim_ratio(lam) ** 2
    if val == 0:
        return WeightValue(-np.inf)
    return WeightValue(math.log(abs(val)), val / abs(val))


def mixing_weight(n: int, params: ZXiParams) -> float:
    """Negative binomial weight of the level |lambda| = n."""
    zz = params.z * params.zp
    lg = zz * math.log1p(-params.xi) + n * math.log(params.xi) - math.lgamma(n + 1)
    poch = 1 + 0j
    for k in range(n):
        poch *= zz + k
    return (poch * cmath.exp(lg)).real


def mixing_tail(n_max: int, params: ZXiParams) -> float:
    """Mass of the levels above n_max: 1 - sum_{n <= n_max} pi(n)."""
    s = math.fsum(mixing_weight(n, params) for n in range(n_max + 1))
    return max(1.0 - s, 0.0)


def plancherel_weight(theta: float, lam: YoungDiagram) -> float:
    if theta <= 0:
        raise ParameterError("theta must be positive")
    return math.exp(-theta + lam.size * math.log(theta) + 2 * math.log(cb.dim_ratio(lam)))


def dim_n(lam: Signature) -> float:
    e = lam.entries
    out = 1.0
    for i in range(len(e)):
        for j in range(i + 1, len(e)):
            out *= (e[i] - e[j] + j - i) / (j - i)
    return out


def zw_weight(lam: Signature, params: ZWParams) -> WeightValue:
    """Unnormalized zw-measure weight M'."""
    if lam.N != params.N:
        raise ParameterError("signature length differs from N")
    N = params.N
    lg = 0j
    for i, li in enumerate(lam.entries, start=1):
        for arg in (params.z - li + i, params.zp - li + i,
                    params.w + N + 1 + li - i, params.wp + N + 1 + li - i):
            r = log_rgamma(arg)
            if r.real == -np.inf:
                return WeightValue(-np.inf)
            lg += r
    lg += 2 * math.log(dim_n(lam))
    return WeightValue.from_log(lg)


def zw_const(params: ZWParams, L: int) -> tuple[float, float]:
    """Truncated normalizing constant over |entries| <= L and the fraction
    carried by the outermost shell (a tail heuristic)."""
    total = shell = 0.0
    for lam in cb.enum_signatures(params.N, L):
        v = zw_weight(lam, params).value
        total += v
        if max(abs(lam.entries[0]), abs(lam.entries[-1])) == L:
            shell += v
    return total, shell / total


def zab_weight(lam: Signature, params: ZABParams) -> WeightValue:
    """Unnormalized weight of a nonnegative signature."""
    if lam.N != params.N:
        raise ParameterError("signature length differs from N")
    if not lam.nonnegative:
        raise ParameterError("signature must be nonnegative")
    N, eps, a, b = params.N, params.eps, params.a, params.b
    z, zp = params.z, params.zp
    lg = 0j
    ls = []
    for i, li in enumerate(lam.entries, start=1):
        s = N + li - i
        ls.append(s + eps)
        lg += cmath.log(complex(s + eps)) + log_gamma(s + 2 * eps) + log_gamma(s + a + 1)
        lg -= log_gamma(s + b + 1) + log_gamma(s + 1)
        for arg in (z - li + i, zp - li + i, z + 2 * N + 2 * eps + li - i, zp + 2 * N + 2 * eps + li - i):
            r = log_rgamma(arg)
            if r.real == -np.inf:
                return WeightValue(-np.inf)
            lg += r
    for i in range(N):
        for j in range(i + 1, N):
            lg += 2 * math.log(abs(ls[i] ** 2 - ls[j] ** 2))
    return WeightValue.from_log(lg)


# --------------------------------------------------------------------------
# brute-force correlation oracle

@dataclass
class Ensemble:
    """Enumerated states with normalized weights and a truncation tail."""

    states: list
    weights: np.ndarray
    tail: float
    underline: Callable
    frobenius: Callable
    _cache: dict = field(default_factory=dict, repr=False)

    def configs(self, embedding: str, window: tuple[float, float]) -> list[frozenset]:
        key = (embedding, window)
        if key not in self._cache:
            emb = self._embed(embedding)
            self._cache[key] = [frozenset(p.twice for p in emb(s, window)) for s in self.states]
        return self._cache[key]

    def _embed(self, embedding: str):
        if embedding == "underline":
            return self.underline
        if embedding == "frobenius":
            return self.frobenius
        raise ParameterError(f"unknown embedding {embedding!r}")


@dataclass(frozen=True)
class OracleResult:
    value: float
    tail_bound: float


def z_ensemble(params: ZXiParams, cutoff: int) -> Ensemble:
    params.require_weights()
    states, w = [], []
    for n in range(cutoff + 1):
        for lam in cb.enum_partitions(n):
            states.append(lam)
            w.append(z_weight(params, lam).value)
    return Ensemble(states, np.asarray(w), mixing_tail(cutoff, params),
                    underline=lambda lam, win: cb.underline_window(lam, *win),
                    frobenius=lambda lam, win: cb.x_config(lam))


def _signature_ensemble(sigs, weight_fn) -> Ensemble:
    w = np.asarray([weight_fn(s).value for s in sigs])
    total = w.sum()
    bound = max(max(abs(s.entries[0]), abs(s.entries[-1])) for s in sigs)
    shell = sum(wi for wi, s in zip(w, sigs) if max(abs(s.entries[0]), abs(s.entries[-1])) == bound)
    return Ensemble(list(sigs), w / total, float(shell / total),
                    underline=lambda s, win: cb.signature_underline(s),
                    frobenius=lambda s, win: cb.signature_x_config(s))


def zw_ensemble(params: ZWParams, L: int) -> Ensemble:
    return _signature_ensemble(cb.enum_signatures(params.N, L), lambda s: zw_weight(s, params))


def zab_ensemble(params: ZABParams, L: int) -> Ensemble:
    return _signature_ensemble(cb.enum_signatures(params.N, L, nonneg=True),
                               lambda s: zab_weight(s, params))


def correlation_oracle(ensemble: Ensemble, points, embedding: str = "underline",
                       tol: float | None = None) -> OracleResult:
    """Probability that the embedded random configuration contains all points."""
    pts = points if isinstance(points, PointSet) else PointSet.of(points)
    if tol is not None and ensemble.tail > tol:
        raise BudgetError(f"truncation tail {ensemble.tail:.3g} exceeds tolerance {tol:.3g}")
    if len(pts) == 0:
        return OracleResult(float(ensemble.weights.sum()), ensemble.tail)
    fl = pts.floats()
    window = (min(fl) - 1.0, max(fl) + 1.0)
    need = {p.twice for p in pts}
    cfg = ensemble.configs(embedding, window)
    mask = np.fromiter((need <= c for c in cfg), dtype=bool, count=len(cfg))
    return OracleResult(float(ensemble.weights[mask].sum()), ensemble.tail)
