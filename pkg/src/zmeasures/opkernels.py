"""Christoffel-Darboux kernels built from discrete orthogonal polynomials.

Two families: the Askey-Lesky polynomials (terminating 3F2) behind the
zw-measures on signatures, and the Wilson/Neretin-type polynomials
(terminating 4F3) behind the z-measures on nonnegative signatures.

For small degree the polynomials are summed directly.  For large degree the
direct sums lose about 2^N digits to cancellation, so they are rewritten as
pairs of rapidly convergent non-terminating series and carried in log space.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import ConvergenceError, ParameterError
from .measures import ZABParams, ZWParams
from .specfun import (EPS, Scaled, _series, bailey_4f3_saalschutz, combine, digamma,
                      hyp4f3_two_term_scaled, log_gamma, log_rgamma, hyp_unit_scaled)

CANCELLATION_LIMIT = 1e4  # direct sums are trusted while sum|t| / |sum| stays below this


def _to_scaled(v: complex, dv: complex = 0j) -> Scaled:
    if v == 0:
        return Scaled(0j, 0.0, complex(dv), 0.0) if dv == 0 else Scaled(0j, math.log(abs(dv)), dv / abs(dv))
    s = math.log(abs(v))
    return Scaled(v / abs(v), s, dv / abs(v))


def _cd_entry(ax: Scaled, bx: Scaled, wx: float, ay: Scaled, by: Scaled, wy: float,
              ux: float, uy: float, log_h: float) -> float:
    """[a(x) b(y) - b(x) a(y)] / (u(x) - u(y)) * exp(wx + wy - log_h); the
    diagonal uses a'(x) b(x) - b'(x) a(x) with derivatives taken in u."""
    if ux == uy:
        s1 = ax.log_scale + bx.log_scale
        val = (ax.dmantissa * bx.mantissa - bx.dmantissa * ax.mantissa)
        return (val * math.exp(s1 + wx + wy - log_h)).real
    s1 = ax.log_scale + by.log_scale
    s2 = bx.log_scale + ay.log_scale
    top = max(s1, s2)
    num = ax.mantissa * by.mantissa * math.exp(s1 - top) - bx.mantissa * ay.mantissa * math.exp(s2 - top)
    return (num * math.exp(top + wx + wy - log_h)).real / (ux - uy)


@dataclass(frozen=True)
class TruncatedSum:
    value: complex
    last_shell: float  # absolute mass of the newest shell
    mass: float  # accumulated absolute mass
    extent: float

    def settled(self, tol: float) -> bool:
        return self.last_shell <= tol * self.mass


def shell_sum(term: Callable[[np.ndarray], np.ndarray], tol: float = 1e-3, cap: float = 1e4,
              start: int = 16, lower: float = -np.inf) -> TruncatedSum:
    """Sum term(x) over half-integers x > lower, growing the window |x| < X by
    doubling until the absolute mass of the newest shell is below tol times
    the accumulated absolute mass."""
    X = start
    xs = np.array([k + 0.5 for k in range(-X, X) if k + 0.5 > lower])
    vals = term(xs) if xs.size else np.zeros(0)
    total = complex(np.sum(vals))
    mass = float(np.sum(np.abs(vals)))
    last = mass
    while X < cap:
        Xn = int(min(2 * X, cap))
        shell = [k + 0.5 for k in range(X, Xn)] + [-k - 0.5 for k in range(X, Xn) if -k - 0.5 > lower]
        vals = term(np.array(shell)) if shell else np.zeros(0)
        total += complex(np.sum(vals))
        last = float(np.sum(np.abs(vals)))
        mass += last
        X = Xn
        if last <= tol * mass:
            break
    return TruncatedSum(total, last, mass, float(X))


# --------------------------------------------------------------------------
# Askey-Lesky polynomials

def _al_direct(m: int, b: complex, c: complex, e: complex, f: np.ndarray, deriv: bool = True):
    """(f)_m 3F2[-m, b, c; e, f; 1] as sum_k coef_k (f+k)_{m-k}.

    Returns value, d/df, and the cancellation ratio sum|t|/|sum|.
    """
    f = np.asarray(f, dtype=complex)
    coef = [1 + 0j]
    for k in range(m):
        coef.append(coef[-1] * (k - m) * (b + k) * (c + k) / ((e + k) * (k + 1)))
    # backward products P_k = prod_{j=k}^{m-1} (f + j) and their derivatives
    P = np.ones_like(f)
    dP = np.zeros_like(f)
    total = coef[m] * P
    dtotal = coef[m] * dP
    absum = np.abs(total)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for k in range(m - 1, -1, -1):
            dP = P + (f + k) * dP
            P = (f + k) * P
            total = total + coef[k] * P
            dtotal = dtotal + coef[k] * dP
            absum = absum + np.abs(coef[k] * P)
        ratio = np.where(np.abs(total) > 0, absum / np.abs(total), np.inf)
    ratio = np.where(np.isfinite(ratio), ratio, np.inf)
    return total, dtotal, ratio



def _al_bailey(m: int, b: complex, c: complex, e: complex, f: complex) -> Scaled:
    """(f)_m 3F2[-m, b, c; e, f; 1] from the two non-terminating series of the
    b <-> c symmetric transformation, with derivative in f."""
    parts = []
    for p, q in ((b, c), (c, b)):
        lg = (log_gamma(f + m) + math.lgamma(m + 1) + log_gamma(e) + log_gamma(q - p)
              - log_gamma(e - p) - log_gamma(f - p) - log_gamma(1 + p + m) - log_gamma(q))
        dlg = complex(digamma(f + m) - digamma(f - p))
        up = [p, p - e + 1, p - f + 1]
        lo = [1 + p - q, 1 + p + m]
        if (sum(lo) - sum(up)).real <= 0:
            raise ConvergenceError("transformed series diverges at this point")
        ser = _series(up, lo, 1.0, 0j, 0, dupper=[0, 0, -1], dlower=[0, 0], unit=True)
        piece = Scaled(ser.mantissa, ser.log_scale, ser.dmantissa + dlg * ser.mantissa, ser.abs_error)
        parts.append(piece.shifted(lg))
    return combine(parts)


@dataclass(frozen=True)
class _ALPoint:
    pN: Scaled
    pN1: Scaled
    log_sqrt_f: float


class AskeyLeskyBasis:
    """Monic orthogonal polynomials p_{N-1}, p_N for the zw weight f."""

    def __init__(self, params: ZWParams):
        if abs(params.sigma) < 1e-12:
            raise ParameterError("sigma = z + z' + w + w' = 0 is not supported")
        self.params = params
        self._cache: dict = {}
        self._mirror: AskeyLeskyBasis | None = None

    @property
    def N(self) -> int:
        return self.params.N

    def _args(self, which: int, x):
        p = self.params
        s = p.sigma
        if which == p.N:
            return p.N, p.z + p.wp, p.zp + p.wp, s, np.asarray(x, dtype=float) + p.wp + 0.5
        if which == p.N - 1:
            return p.N - 1, p.z + p.wp + 1, p.zp + p.wp + 1, s + 2, np.asarray(x, dtype=float) + p.wp + 1.5
        raise ParameterError("which must be N or N - 1")

    def eval(self, which: int, x):
        """p_which(x) by direct summation (complex; real for admissible data)."""
        v, _, _ = _al_direct(*self._args(which, x))
        return v

    def derivative(self, which: int, x):
        _, dv, _ = _al_direct(*self._args(which, x))
        return dv

    @property
    def log_norm(self) -> complex:
        p = self.params
        s, N = p.sigma, p.N
        return (math.lgamma(N) + log_gamma(s + 1) + log_gamma(s + 2) - log_gamma(s + N + 1)
                - log_gamma(p.z + p.w + 1) - log_gamma(p.z + p.wp + 1)
                - log_gamma(p.zp + p.w + 1) - log_gamma(p.zp + p.wp + 1))

    @property
    def norm(self) -> float:
        """h_{N-1}."""
        return cmath.exp(self.log_norm).real

    def log_weight(self, x) -> np.ndarray:
        """Complex log f(x); -inf real part where f vanishes."""
        p = self.params
        x = np.asarray(x, dtype=float)
        N = p.N
        out = np.zeros(x.shape, dtype=complex)
        for arg in (p.z - x + 0.5, p.zp - x + 0.5, p.w + x + N + 0.5, p.wp + x + N + 0.5):
            out -= special.loggamma(np.asarray(arg, dtype=complex))
        return out

    def weight(self, x) -> np.ndarray:
        return np.exp(self.log_weight(x)).real

    # point evaluation with route selection ---------------------------------

    def mirror(self) -> "AskeyLeskyBasis":
        if self._mirror is None:
            self._mirror = AskeyLeskyBasis(self.params.swapped())
        return self._mirror

    def _point(self, x: float) -> _ALPoint:
        if x in self._cache:
            return self._cache[x]
        N = self.N
        lsf = 0.5 * float(self.log_weight(x).real)
        pts = []
        for which in (N, N - 1):
            m, b, c, e, f = self._args(which, x)
            v, dv, ratio = _al_direct(m, b, c, e, f)
            if ratio <= CANCELLATION_LIMIT:
                pts.append(_to_scaled(complex(v), complex(dv)))
            else:
                pts.append(None)
        if None in pts:
            if x < -N / 2:
                mp = self.mirror()._point(-N - x)
                sN, sN1 = (-1) ** N, (-1) ** (N - 1)
                # derivatives flip sign under x -> -N - x
                pN = Scaled(sN * mp.pN.mantissa, mp.pN.log_scale, -sN * mp.pN.dmantissa)
                pN1 = Scaled(sN1 * mp.pN1.mantissa, mp.pN1.log_scale, -sN1 * mp.pN1.dmantissa)
                pts = [pN, pN1]
            else:
                p = self.params
                if p.z == p.zp:
                    raise ParameterError("large-N evaluation needs z != z'")
                pts = [_al_bailey(*self._args(which, x)) for which in (N, N - 1)]
        out = _ALPoint(pts[0], pts[1], lsf)
        self._cache[x] = out
        return out

    def kernel(self, x: float, y: float) -> float:
        px, py = self._point(float(x)), self._point(float(y))
        lh = self.log_norm.real
        return _cd_entry(px.pN, px.pN1, px.log_sqrt_f, py.pN, py.pN1, py.log_sqrt_f, x, y, lh)

    def inner(self, i: int, j: int, tol: float = 1e-3, cap: float = 1e4) -> TruncatedSum:
        """Truncated sum of p_i p_j f over Z' (i, j in {N-1, N})."""
        return shell_sum(lambda xs: self.eval(i, xs) * self.eval(j, xs) * np.exp(self.log_weight(xs)),
                         tol, cap)

    def trace(self, tol: float = 1e-3, cap: float = 1e4) -> TruncatedSum:
        return shell_sum(self.kernel_diagonal_array, tol, cap)

    def kernel_diagonal_array(self, xs) -> np.ndarray:
        """Vectorized K(x, x) by direct summation (small N)."""
        xs = np.asarray(xs, dtype=float)
        aN, daN, _ = _al_direct(*self._args(self.N, xs))
        aN1, daN1, _ = _al_direct(*self._args(self.N - 1, xs))
        fw = np.exp(self.log_weight(xs) - self.log_norm)
        return ((daN * aN1 - daN1 * aN) * fw).real


def askey_lesky_eval(which: int, x, params: ZWParams):
    return AskeyLeskyBasis(params).eval(which, x).real


def askey_lesky_norm(params: ZWParams) -> float:
    return AskeyLeskyBasis(params).norm


def zw_kernel(x: float, y: float, params: ZWParams) -> float:
    return AskeyLeskyBasis(params).kernel(x, y)


# --------------------------------------------------------------------------
# Neretin polynomials

@dataclass(frozen=True)
class NeretinBasis:
    a: tuple[complex, complex, complex, complex]
    alpha: complex

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(complex(v) for v in self.a))
        object.__setattr__(self, "alpha", complex(self.alpha))

    @property
    def sum_a(self) -> complex:
        return sum(self.a)

    def log_weight(self, t: float) -> complex:
        """log w(t); -inf real part when a Gamma in the denominator has a pole."""
        s = self.alpha + t
        if s == 0:
            return complex(-np.inf, 0)
        out = cmath.log(s)
        for aj in self.a:
            for arg in (aj + s, aj - s):
                r = log_rgamma(arg)
                if r.real == -np.inf:
                    return complex(-np.inf, 0)
                out += r
        return out

    def weight(self, t: float) -> complex:
        lw = self.log_weight(t)
        return 0j if lw.real == -np.inf else cmath.exp(lw)

    def _params(self, n: int, t: float):
        a1, a2, a3, a4 = self.a
        s = t + self.alpha
        X = n + 3 - self.sum_a
        return X, 1 - a1 - s, 1 - a1 + s, 2 - a1 - a2, 2 - a1 - a3, 2 - a1 - a4

    def q_direct(self, n: int, t: float) -> tuple[Scaled, float]:
        """Q_n((t+alpha)^2) by direct summation, with its derivative in
        (t+alpha)^2, and the cancellation ratio sum|t_k| / |sum|."""
        a1 = self.a[0]
        X, _, _, U, V, W = self._params(n, t)
        S2 = (t + self.alpha) ** 2
        k = np.arange(n + 1)
        # coefficient of term k: (-n)_k (X)_k / k! * prod_J (J + k)_{n-k}
        lc = np.zeros(n + 1, dtype=complex)
        if n:
            kk = k[:-1]
            step = np.log((kk - n).astype(complex)) + np.log(X + kk) - np.log(kk + 1.0)
            lc[1:] = np.cumsum(step)
        for J in (U, V, W):
            lc += log_gamma(J + n) - special.loggamma(J + k.astype(complex))
        # prod_{i<k} (c_i - S2), c_i = (1 - a1 + i)^2; at most one factor vanishes
        fac = (1 - a1 + k[:-1]) ** 2 - S2
        zero = np.flatnonzero(np.abs(fac) <= 1e-14 * np.abs(S2 + 1))
        lf = np.log(np.where(np.abs(fac) > 0, fac, 1.0).astype(complex))
        i0 = int(zero[0]) if zero.size else n + 1
        if zero.size:
            lf[i0] = 0j
        lp = np.concatenate(([0j], np.cumsum(lf)))
        inv = np.where(np.arange(n) == i0, 0j, 1 / np.where(np.arange(n) == i0, 1.0, fac))
        dsum = -np.concatenate(([0j], np.cumsum(inv)))
        live = k <= i0
        lv = lc + lp
        top = float(np.max(lv.real))
        e = np.exp(lv - top)
        val = np.where(live, e, 0).sum()
        # derivative: live terms get prod * (-sum 1/f); dead terms keep -prod of the others
        de = np.where(live, e * dsum, -e).sum()
        absum = float(np.abs(np.where(live, e, 0)).sum())
        ratio = absum / abs(val) if val != 0 else np.inf
        return Scaled(complex(val), top, complex(de)), ratio

    def q_transformed(self, n: int, t: float) -> Scaled:
        """Q_n via the Saalschutz transformation followed by the two-term
        non-terminating representation; log-space throughout."""
        X, Y, Z, U, V, W = self._params(n, t)
        lg0 = 0j
        for J in (U, V, W):
            lg0 += log_gamma(J + n) - log_gamma(J)
        lg1, (X2, Y2, Z2, _, U2, V2, W2) = bailey_4f3_saalschutz(X, Y, Z, n, U, V, W)
        ser = hyp4f3_two_term_scaled(X2, Y2, Z2, n, W2, U2, V2)
        return ser.shifted(lg0 + lg1)

    def q_eval(self, n: int, t: float) -> complex:
        v, ratio = self.q_direct(n, t)
        if ratio <= CANCELLATION_LIMIT:
            return v.value
        return self.q_transformed(n, t).value

    def leading(self, n: int) -> complex:
        """k_n = (n + 3 - sum a)_n."""
        X = n + 3 - self.sum_a
        out = 1 + 0j
        for j in range(n):
            out *= X + j
        return out

    def log_leading(self, n: int) -> complex:
        X = n + 3 - self.sum_a
        return log_gamma(X + n) - log_gamma(X)

    def log_norm(self, n: int) -> complex:
        """log H_n = log sum_t Q_n^2 w(t)."""
        a = self.a
        sa = self.sum_a
        pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        sines = -np.sin(2 * np.pi * self.alpha)
        for i, j in pairs:
            sines *= np.sin(np.pi * (a[i] + a[j]))
        sines /= 2 * np.pi**6 * np.sin(np.pi * sa)
        lg = cmath.log(complex(sines)) + math.lgamma(n + 1)
        for i, j in pairs:
            lg += log_gamma(2 - a[i] - a[j] + n)
        lg -= cmath.log(3 - sa + 2 * n) + log_gamma(3 - sa + n)
        return lg

    def norm(self, n: int) -> complex:
        return cmath.exp(self.log_norm(n))

    def inner(self, m: int, n: int, tol: float = 1e-3, cap: float = 1e4) -> TruncatedSum:
        """Truncated sum of Q_m Q_n w(t) over t = 0, 1, 2, ..."""
        def term(ts):
            return np.array([self.q_eval(m, t) * self.q_eval(n, t) * self.weight(t) for t in ts])
        # shell_sum runs over half-integers; shift them onto t >= 0
        r = shell_sum(lambda xs: term(xs - 0.5), tol, cap, lower=0)
        if not r.settled(tol):
            raise ConvergenceError(f"weighted sum of Q_{m} Q_{n} does not settle by t = {cap:g}")
        return r


def neretin_eval(n: int, t: float, basis: NeretinBasis) -> complex:
    return basis.q_eval(n, t)


def neretin_norm(n: int, basis: NeretinBasis) -> complex:
    return basis.norm(n)


# --------------------------------------------------------------------------
# z-measures on nonnegative signatures

@dataclass(frozen=True)
class RacahIdentification:
    t: float
    alpha: float
    a: tuple[complex, complex, complex, complex]

    @classmethod
    def of(cls, params: ZABParams, x: float) -> "RacahIdentification":
        N, eps = params.N, params.eps
        return cls(N + x - 0.5, eps,
                   (1 - eps, params.b + 1 - eps, params.z + N + eps, params.zp + N + eps))


def neretin_basis(params: ZABParams) -> NeretinBasis:
    r = RacahIdentification.of(params, 0.5)
    return NeretinBasis(r.a, r.alpha)


def zab_log_weight(x: float, params: ZABParams) -> complex:
    """log g(x); -inf real part where g vanishes (x <= -N - 1/2)."""
    N, eps, a, b = params.N, params.eps, params.a, params.b
    if N + x + 0.5 <= 0:
        return complex(-np.inf, 0)
    out = cmath.log(complex(N + eps + x - 0.5))
    out += log_gamma(N + 2 * eps + x - 0.5) + log_gamma(N + a + x + 0.5)
    out -= log_gamma(N + b + x + 0.5) + log_gamma(N + x + 0.5)
    for arg in (params.z - x + 0.5, params.zp - x + 0.5,
                params.z + 2 * N + 2 * eps + x - 0.5, params.zp + 2 * N + 2 * eps + x - 0.5):
        r = log_rgamma(arg)
        if r.real == -np.inf:
            return complex(-np.inf, 0)
        out += r
    return out


def zab_weight_constant(params: ZABParams) -> float:
    """g(x) / w(t(x)) = pi^2 / (sin pi(a+b) sin pi a)."""
    return math.pi**2 / (math.sin(math.pi * (params.a + params.b)) * math.sin(math.pi * params.a))


def zab_log_norm(params: ZABParams) -> complex:
    """log h_{N-1} = log sum_x q_{N-1}^2 g with q monic.

    Equals the weight constant times H_{N-1} / k_{N-1}^2; the sine factors are
    cancelled by hand so that the formula stays finite when a + b is an
    integer.
    """
    N, a, b, z, zp = params.N, params.a, params.b, params.z, params.zp
    n = N - 1
    basis = neretin_basis(params)
    A = basis.a
    sa = basis.sum_a
    sines = (np.sin(np.pi * z) * np.sin(np.pi * zp) * np.sin(np.pi * (z + b)) * np.sin(np.pi * (zp + b))
             * -np.sin(np.pi * (z + zp + a + b)) / np.sin(np.pi * (z + zp + b)))
    lg = cmath.log(complex(sines)) - math.log(2 * math.pi**4) + math.lgamma(n + 1)
    for i in range(4):
        for j in range(i + 1, 4):
            lg += log_gamma(2 - A[i] - A[j] + n)
    lg -= cmath.log(3 - sa + 2 * n) + log_gamma(3 - sa + n)
    return lg - 2 * basis.log_leading(n)


@dataclass(frozen=True)
class _ZABPoint:
    qN: Scaled
    qN1: Scaled
    log_sqrt_g: float
    u: float


class ZABKernel:
    """Christoffel-Darboux kernel for the nonnegative-signature measures."""

    def __init__(self, params: ZABParams, fd_step: float = 1e-2):
        if not params.moment_condition:
            raise ParameterError("moment condition z + z' > 1 - b fails")
        self.params = params
        self.basis = neretin_basis(params)
        self.log_h = zab_log_norm(params)
        self.fd_step = fd_step
        self._cache: dict = {}

    def _q(self, n: int, x: float) -> tuple[Scaled, bool]:
        """Monic q_n at xhat^2; exact derivative in xhat^2 on the direct route."""
        t = self.params.N + x - 0.5
        v, ratio = self.basis.q_direct(n, t)
        lk = self.basis.log_leading(n)
        if ratio <= CANCELLATION_LIMIT:
            return v.shifted(-lk), True
        return self.basis.q_transformed(n, t).shifted(-lk), False

    def _point(self, x: float) -> _ZABPoint:
        if x not in self._cache:
            N = self.params.N
            lg = zab_log_weight(x, self.params)
            qN, _ = self._q(N, x)
            qN1, _ = self._q(N - 1, x)
            xh = N + x + self.params.eps - 0.5
            self._cache[x] = _ZABPoint(qN, qN1, 0.5 * lg.real, xh * xh)
        return self._cache[x]

    def kernel(self, x: float, y: float) -> float:
        x, y = float(x), float(y)
        px, py = self._point(x), self._point(y)
        if px.log_sqrt_g == -np.inf or py.log_sqrt_g == -np.inf:
            return 0.0
        lh = self.log_h.real
        if x != y:
            return _cd_entry(px.qN, px.qN1, px.log_sqrt_g, py.qN, py.qN1, py.log_sqrt_g, px.u, py.u, lh)
        N = self.params.N
        dN, okN = self._q(N, x)
        dN1, okN1 = self._q(N - 1, x)
        if okN and okN1:
            return _cd_entry(dN, dN1, px.log_sqrt_g, dN, dN1, px.log_sqrt_g, px.u, px.u, lh)
        return self._fd_diagonal(x)

    def _fd_diagonal(self, x: float) -> float:
        """Sixth-order central difference of the numerator in x."""
        N = self.params.N
        p0 = self._point(x)
        h = self.fd_step
        ref = p0.qN.log_scale + p0.qN1.log_scale

        def num(xs: float) -> complex:
            a, _ = self._q(N, xs)
            b, _ = self._q(N - 1, xs)
            s1 = a.log_scale + p0.qN1.log_scale - ref
            s2 = b.log_scale + p0.qN.log_scale - ref
            return a.mantissa * p0.qN1.mantissa * math.exp(s1) - b.mantissa * p0.qN.mantissa * math.exp(s2)

        w = (1 / 60, -3 / 20, 3 / 4)
        d = sum(c * (num(x + (3 - i) * h) - num(x - (3 - i) * h)) for i, c in enumerate(w)) / h
        du = 2 * (N + x + self.params.eps - 0.5)
        return (d / du * math.exp(ref + 2 * p0.log_sqrt_g - self.log_h.real)).real


def zab_trace(params: ZABParams, tol: float = 1e-3, cap: float = 1e4) -> TruncatedSum:
    K = ZABKernel(params)
    return shell_sum(lambda xs: np.array([K.kernel(x, x) for x in xs]), tol, cap,
                     lower=-params.N - 0.5)


def zab_kernel(x: float, y: float, params: ZABParams) -> float:
    return ZABKernel(params).kernel(x, y)


def divided_difference(values: Sequence[complex], nodes: Sequence[float]) -> complex:
    """Top divided difference: the leading coefficient of the interpolant."""
    out = 0j
    for j, xj in enumerate(nodes):
        den = 1.0
        for k, xk in enumerate(nodes):
            if k != j:
                den *= xj - xk
        out += values[j] / den
    return out
