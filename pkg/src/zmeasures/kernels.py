"""Closed-form correlation kernels on the half-integer lattice.

Discrete hypergeometric kernel (first and second lattice form), gamma and
psi kernels, the A- and L-kernels, the circ transform relating the two forms,
the xi-derivative, translation-invariant tail kernels and their Fourier
symbols.

Conventions: the first form is indexed by the underline (Maya diagram)
encoding, the second form by the Frobenius-coordinate encoding.  Second-form
kernels dispatch on (sign x, sign y).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ParameterError
from .measures import ZXiParams, classify
from .specfun import Scaled, digamma, hyp2f1_reg_scaled, log_gamma, trigamma

FORMS = ("first", "second")


def _check_pair(z: complex, zp: complex) -> None:
    if not classify(z, zp).kernel_ok:
        raise ParameterError("kernels need (z, z') in the principal or complementary class")


def _sin_prod(z: complex, zp: complex) -> float:
    """sin(pi z) sin(pi z'), real and positive for admissible pairs."""
    return (np.sin(np.pi * z) * np.sin(np.pi * zp)).real


def gamma_constant(z: complex, zp: complex) -> complex:
    """sin(pi z) sin(pi z') / (pi sin(pi (z - z'))); imaginary for conjugate pairs."""
    return complex(np.sin(np.pi * z) * np.sin(np.pi * zp) / (np.pi * np.sin(np.pi * (z - zp))))


# --------------------------------------------------------------------------
# P and Q

@dataclass(frozen=True)
class PQPoint:
    """P(x), Q(x) and their x-derivatives as mantissa * exp(scale)."""

    x: float
    p: float
    dp: float
    p_scale: float
    q: float
    dq: float
    q_scale: float

    @property
    def P(self) -> float:
        return self.p * math.exp(self.p_scale) if self.p else 0.0

    @property
    def Q(self) -> float:
        return self.q * math.exp(self.q_scale) if self.q else 0.0

    @property
    def dP(self) -> float:
        return self.dp * math.exp(self.p_scale) if self.dp else 0.0

    @property
    def dQ(self) -> float:
        return self.dq * math.exp(self.q_scale) if self.dq else 0.0


def _sqrt_gamma_log(z: complex, zp: complex, u: float) -> float:
    """log sqrt(Gamma(z+u) Gamma(z'+u)); the product is positive."""
    return 0.5 * (log_gamma(z + u) + log_gamma(zp + u)).real


def pq_point(x: float, z: complex, zp: complex, xi: float, deriv: bool = True) -> PQPoint:
    z, zp = complex(z), complex(zp)
    x = float(x)
    w = xi / (xi - 1.0)
    zz = (z * zp).real
    ssum = (z + zp).real
    lx, l1x = math.log(xi), math.log1p(-xi)
    base = _sqrt_gamma_log(z, zp, x + 0.5) - _sqrt_gamma_log(z, zp, 1.0)
    dbase = 0.5 * (digamma(z + x + 0.5) + digamma(zp + x + 0.5)).real if deriv else 0.0
    lp = 0.25 * math.log(zz) + 0.5 * x * lx + 0.5 * ssum * l1x + base
    lq = 0.75 * math.log(zz) + 0.5 * (x + 1) * lx + (0.5 * ssum - 1) * l1x + base
    dl = 0.5 * lx + dbase
    rp = hyp2f1_reg_scaled(-z, -zp, x + 0.5, w, deriv=deriv)
    rq = hyp2f1_reg_scaled(1 - z, 1 - zp, x + 1.5, w, deriv=deriv)

    def parts(r: Scaled, lpref: float):
        m = r.mantissa.real
        dm = (r.dmantissa + dl * r.mantissa).real
        return m, dm, r.log_scale + lpref

    p, dp, ps = parts(rp, lp)
    q, dq, qs = parts(rq, lq)
    return PQPoint(x, p, dp, ps, q, dq, qs)


def p_func(x: float, params: ZXiParams) -> float:
    params.require_kernel()
    return pq_point(x, params.z, params.zp, params.xi, deriv=False).P


def q_func(x: float, params: ZXiParams) -> float:
    params.require_kernel()
    return pq_point(x, params.z, params.zp, params.xi, deriv=False).Q


def dp_dxi(x: float, params: ZXiParams) -> float:
    """Closed-form xi-derivative of P."""
    params.require_kernel()
    pt = pq_point(x, params.z, params.zp, params.xi, deriv=False)
    xi, s = params.xi, (params.z + params.zp).real
    r = math.sqrt((params.z * params.zp).real)
    return (x / (2 * xi) - s / (2 * (1 - xi))) * pt.P - r / (math.sqrt(xi) * (1 - xi)) * pt.Q


def dq_dxi(x: float, params: ZXiParams) -> float:
    """Closed-form xi-derivative of Q."""
    params.require_kernel()
    pt = pq_point(x, params.z, params.zp, params.xi, deriv=False)
    xi, s = params.xi, (params.z + params.zp).real
    r = math.sqrt((params.z * params.zp).real)
    return (-x / (2 * xi) + s / (2 * (1 - xi))) * pt.Q + r / (math.sqrt(xi) * (1 - xi)) * pt.P


def _bilinear(m1, s1, m2, s2, m3, s3, m4, s4) -> float:
    """m1 m2 e^(s1+s2) - m3 m4 e^(s3+s4) without overflow."""
    a, b = s1 + s2, s3 + s4
    top = max(a, b)
    return (m1 * m2 * math.exp(a - top) - m3 * m4 * math.exp(b - top)) * math.exp(top)


def _first_entry(px: PQPoint, py: PQPoint) -> float:
    if px.x == py.x:
        # l'Hospital: P'(x) Q(x) - Q'(x) P(x)
        return _bilinear(px.dp, px.p_scale, px.q, px.q_scale, px.dq, px.q_scale, px.p, px.p_scale)
    num = _bilinear(px.p, px.p_scale, py.q, py.q_scale, px.q, px.q_scale, py.p, py.p_scale)
    return num / (px.x - py.x)


class HypergeometricKernel:
    """Discrete hypergeometric kernel with per-point caching of P and Q."""

    def __init__(self, params: ZXiParams):
        params.require_kernel()
        self.params = params
        self._cache: dict = {}

    def point(self, x: float, negated: bool = False) -> PQPoint:
        key = (float(x), negated)
        if key not in self._cache:
            p = self.params
            z, zp = (-p.z, -p.zp) if negated else (p.z, p.zp)
            self._cache[key] = pq_point(x, z, zp, p.xi)
        return self._cache[key]

    def first(self, x: float, y: float) -> float:
        return _first_entry(self.point(x), self.point(y))

    def second(self, x: float, y: float) -> float:
        if x > 0 and y > 0:
            return self.first(x, y)
        if x < 0 and y < 0:
            return _first_entry(self.point(-x, True), self.point(-y, True))
        if x > 0:
            px, hy = self.point(x), self.point(-y, True)
            num = _bilinear(px.p, px.p_scale, hy.p, hy.p_scale, -px.q, px.q_scale, hy.q, hy.q_scale)
            return num / (x - y)
        hx, py = self.point(-x, True), self.point(y)
        num = _bilinear(hx.p, hx.p_scale, py.p, py.p_scale, -hx.q, hx.q_scale, py.q, py.q_scale)
        return num / (x - y)

    def dxi(self, x: float, y: float) -> float:
        """xi-derivative of the first-form kernel: (PQ + QP)/(2 xi)."""
        px, py = self.point(x), self.point(y)
        num = _bilinear(px.p, px.p_scale, py.q, py.q_scale, -px.q, px.q_scale, py.p, py.p_scale)
        return num / (2 * self.params.xi)

    def entry(self, form: str, x: float, y: float) -> float:
        if form == "first":
            return self.first(x, y)
        if form == "second":
            return self.second(x, y)
        raise ParameterError(f"unknown form {form!r}")

    def matrix(self, points: Sequence[float], form: str = "first") -> np.ndarray:
        pts = [float(v) for v in points]
        return np.array([[self.entry(form, x, y) for y in pts] for x in pts])


def hyperg_kernel(form: str, x: float, y: float, params: ZXiParams) -> float:
    return HypergeometricKernel(params).entry(form, x, y)


def dxi_kernel(x: float, y: float, params: ZXiParams) -> float:
    return HypergeometricKernel(params).dxi(x, y)


# --------------------------------------------------------------------------
# gamma and psi kernels

def gamma_sign(u: float) -> float:
    """Sign of Gamma(u) for real u off the poles."""
    return 1.0 if u > 0 or math.floor(u) % 2 == 0 else -1.0


class GammaKernel:
    """Gamma kernel (psi kernel when z = z') in both lattice forms."""

    def __init__(self, z: complex, zp: complex):
        z, zp = complex(z), complex(zp)
        _check_pair(z, zp)
        self.z, self.zp = z, zp
        self.psi = z == zp
        self.S = _sin_prod(z, zp)
        self.C = None if self.psi else gamma_constant(z, zp)
        self._lg: dict = {}

    def _logs(self, x: float, sgn: int) -> tuple[complex, complex]:
        """log Gamma(s z + s x + 1/2), log Gamma(s z' + s x + 1/2) for s = sgn."""
        key = (x, sgn)
        if key not in self._lg:
            self._lg[key] = (log_gamma(sgn * (self.z + x) + 0.5), log_gamma(sgn * (self.zp + x) + 0.5))
        return self._lg[key]

    def _first(self, x: float, y: float, sgn: int, signed: bool = False) -> float:
        """First-form kernel with parameters (sgn z, sgn z') at (sgn x, sgn y).

        ``signed`` restores the factor sgn Gamma(z+x+1/2) Gamma(z+y+1/2) that the
        psi display omits, making it the z' -> z limit of the gamma kernel.
        """
        z, zp = sgn * self.z, sgn * self.zp
        u, v = sgn * x, sgn * y
        if self.psi:
            f = (np.sin(np.pi * z) / np.pi).real ** 2
            if u == v:
                return f * trigamma(z + u + 0.5).real
            val = f * (digamma(z + u + 0.5) - digamma(z + v + 0.5)).real / (u - v)
            if signed:
                val *= gamma_sign((z + u + 0.5).real) * gamma_sign((z + v + 0.5).real)
            return val
        C = gamma_constant(z, zp)
        if u == v:
            return (C * (digamma(z + u + 0.5) - digamma(zp + u + 0.5))).real
        ax, bx = self._logs(x, sgn)
        ay, by = self._logs(y, sgn)
        half = 0.5 * (ax + bx + ay + by).real
        num = np.exp(ax + by - half) - np.exp(bx + ay - half)
        return (C * num).real / (u - v)

    def first(self, x: float, y: float) -> float:
        return self._first(x, y, 1)

    def _cross(self, xp: float, yn: float) -> float:
        """Off-block entry with xp > 0 > yn, before the orientation sign."""
        z, zp = self.z, self.zp
        ax, bx = self._logs(xp, 1)
        ay, by = self._logs(yn, -1)
        half = 0.5 * (ax + bx + ay + by).real
        sz, szp = np.sin(np.pi * z), np.sin(np.pi * zp)
        if self.psi:
            sgn = np.exp(ax + ay - half).real
            d = np.pi * np.cos(np.pi * z) + sz * (digamma(z + xp + 0.5) - digamma(-z - yn + 0.5))
            return math.sqrt(self.S) * sgn * d.real / np.pi**2
        num = sz * np.exp(ax + ay - half) - szp * np.exp(bx + by - half)
        return math.sqrt(self.S) * (num / (np.pi * np.sin(np.pi * (z - zp)))).real

    def second(self, x: float, y: float) -> float:
        if x > 0 and y > 0:
            return self._first(x, y, 1, signed=True)
        if x < 0 and y < 0:
            return self._first(x, y, -1, signed=True)
        if x > 0:
            return self._cross(x, y) / (x - y)
        # x < 0 < y: same structure with the roles of z, z' exchanged in the sines
        z, zp = self.z, self.zp
        ax, bx = self._logs(x, -1)
        ay, by = self._logs(y, 1)
        half = 0.5 * (ax + bx + ay + by).real
        sz, szp = np.sin(np.pi * z), np.sin(np.pi * zp)
        if self.psi:
            sgn = np.exp(ax + ay - half).real
            d = np.pi * np.cos(np.pi * z) + sz * (digamma(z + y + 0.5) - digamma(-z - x + 0.5))
            return math.sqrt(self.S) * sgn * d.real / np.pi**2 / (x - y)
        num = sz * np.exp(ax + ay - half) - szp * np.exp(bx + by - half)
        return math.sqrt(self.S) * (num / (np.pi * np.sin(np.pi * (z - zp)))).real / (x - y)

    def entry(self, form: str, x: float, y: float) -> float:
        if form == "first":
            return self.first(x, y)
        if form == "second":
            return self.second(x, y)
        raise ParameterError(f"unknown form {form!r}")

    def matrix(self, points: Sequence[float], form: str = "first") -> np.ndarray:
        pts = [float(v) for v in points]
        return np.array([[self.entry(form, x, y) for y in pts] for x in pts])


def gamma_kernel(form: str, x: float, y: float, z: complex, zp: complex) -> float:
    return GammaKernel(z, zp).entry(form, x, y)


# --------------------------------------------------------------------------
# A- and L-kernels

def a_kernel(x: float, y: float, z: complex, zp: complex, xi: float | None = None) -> float:
    """A(x, y) for x > 0 > y; xi=None gives the xi = 1 kernel."""
    if not (x > 0 > y):
        raise DomainError("A-kernel needs x > 0 > y")
    z, zp = complex(z), complex(zp)
    _check_pair(z, zp)
    lg = (_sqrt_gamma_log(z, zp, x + 0.5) - math.lgamma(x + 0.5)
          + _sqrt_gamma_log(-z, -zp, -y + 0.5) - math.lgamma(-y + 0.5))
    if xi is not None:
        lg += 0.5 * (x - y) * math.log(xi)
    return math.sqrt(_sin_prod(z, zp)) / math.pi * math.exp(lg) / (x - y)


def l_kernel(x: float, y: float, z: complex, zp: complex, xi: float | None = None) -> float:
    if x > 0 > y:
        return a_kernel(x, y, z, zp, xi)
    if y > 0 > x:
        return -a_kernel(y, x, z, zp, xi)
    return 0.0


def l_matrix(points: Sequence[float], z: complex, zp: complex, xi: float | None = None) -> np.ndarray:
    pts = [float(v) for v in points]
    return np.array([[l_kernel(x, y, z, zp, xi) for y in pts] for x in pts])


# --------------------------------------------------------------------------
# circ transform

def epsilon_sign(x: float) -> int:
    """1 on positive points, (-1)^k at x = -(k + 1/2)."""
    if x > 0:
        return 1
    k = int(round(-x - 0.5))
    return -1 if k % 2 else 1


def circ_transform(K: np.ndarray, points: Sequence[float], flip: Iterable[float] | None = None,
                   sign=epsilon_sign) -> np.ndarray:
    """Replace rows indexed by ``flip`` (default: negative points) with delta - K,
    then conjugate by the diagonal sign map."""
    K = np.asarray(K, dtype=float)
    pts = [float(v) for v in points]
    if K.shape != (len(pts), len(pts)):
        raise DomainError("kernel matrix does not match the window")
    flip_set = {v for v in pts if v < 0} if flip is None else {float(v) for v in flip}
    out = K.copy()
    for i, x in enumerate(pts):
        if x in flip_set:
            out[i] = -K[i]
            out[i, i] += 1.0
    eps = np.array([sign(v) for v in pts], dtype=float)
    return eps[:, None] * out / eps[None, :]


# --------------------------------------------------------------------------
# tail kernels

def _sech_half(d: float) -> float:
    """1 / (2 cosh(d/2)) without overflow."""
    return math.exp(-0.5 * abs(d) - math.log1p(math.exp(-abs(d))))


def _sinh_ratio(a: complex, d: float) -> complex:
    """sinh(a d) / sinh(d / 2) for |Re a| < 1/2 without overflow."""
    if abs(d) < 1:
        return np.sinh(a * d) / math.sinh(0.5 * d)
    sg = math.copysign(1.0, d)
    ad = abs(d)
    return sg * (np.exp(a * d - 0.5 * ad) - np.exp(-a * d - 0.5 * ad)) / (1 - math.exp(-ad))


def tail_kernel(form: str, s: float, t: float, z: complex, zp: complex,
                signs: tuple[str, str] = ("+", "+")) -> float:
    """Translation-invariant kernel of the intermediate scaling regime."""
    z, zp = complex(z), complex(zp)
    _check_pair(z, zp)
    d = s - t
    if form == "first" or signs[0] == signs[1]:
        if z == zp:
            f = (np.sin(np.pi * z) / np.pi).real ** 2
            if d == 0:
                return f
            ad = abs(d)
            return f * (0.5 * d / math.sinh(0.5 * d) if ad < 1 else ad * math.exp(-0.5 * ad) / -math.expm1(-ad))
        C = gamma_constant(z, zp)
        if d == 0:
            return (C * (z - zp)).real
        return (C * _sinh_ratio(0.5 * (z - zp), d)).real
    if form != "second":
        raise ParameterError(f"unknown form {form!r}")
    S = _sin_prod(z, zp)
    sz, szp = np.sin(np.pi * z), np.sin(np.pi * zp)
    if z == zp:
        c = np.pi * np.cos(np.pi * z)
        num = (c + sz * d) if signs == ("+", "-") else (-c + sz * d)
        return math.sqrt(S) * num.real * _sech_half(d) / np.pi**2
    if signs == ("+", "-"):
        p, m = sz, szp
    elif signs == ("-", "+"):
        p, m = szp, sz
    else:
        raise ParameterError(f"bad sign pair {signs}")
    # e^{+-(z-z')d/2} / (2 cosh(d/2)) with the growth of cosh pulled into the exponent
    g = -0.5 * abs(d) - math.log1p(math.exp(-abs(d)))
    num = p * np.exp(0.5 * (z - zp) * d + g) - m * np.exp(-0.5 * (z - zp) * d + g)
    return (math.sqrt(S) * num / (np.pi * np.sin(np.pi * (z - zp)))).real


def l_tail(s: float, t: float, z: complex, zp: complex, signs: tuple[str, str]) -> float:
    z, zp = complex(z), complex(zp)
    _check_pair(z, zp)
    d = s - t
    amp = math.sqrt(_sin_prod(z, zp)) / math.pi
    h = 0.5 * (z + zp).real
    g = -0.5 * abs(d) - math.log1p(math.exp(-abs(d)))
    if signs == ("+", "-"):
        return amp * math.exp(h * d + g)
    if signs == ("-", "+"):
        return -amp * math.exp(-h * d + g)
    return 0.0


def fourier_symbols(u: float, z: complex, zp: complex) -> tuple[complex, complex, complex]:
    """Symbols (c, a, b) of the tail L-kernel and of the blocks of L/(1+L).

    c(u) is the transform of l_tail(+,-) in the difference variable with the
    e^{-iuv} convention.
    """
    z, zp = complex(z), complex(zp)
    _check_pair(z, zp)
    if abs(z + zp) >= 1:
        raise ParameterError("Fourier symbols need |z + z'| < 1")
    S = _sin_prod(z, zp)
    h = np.pi * (z + zp).real / 2
    den = math.cosh(2 * np.pi * u) + np.cos(np.pi * (z - zp)).real
    c = math.sqrt(S) / np.cos(1j * np.pi * u - h)
    a = 2 * S / den
    b = 2 * math.sqrt(S) * np.cos(1j * np.pi * u + h) / den
    return complex(c), complex(a), complex(b)
