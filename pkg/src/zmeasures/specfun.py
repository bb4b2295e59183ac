"""Complex special functions: log-gamma, digamma, Pochhammer symbols and
hypergeometric series (regularized Gauss function on the negative axis,
terminating and non-terminating series at unit argument).

Large quantities are carried in log space.  Internally many routines return a
``Scaled`` triple ``(mantissa, log_scale, dmantissa)`` meaning
``value = mantissa * exp(log_scale)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .errors import ConvergenceError, PoleError

EPS = float(np.finfo(float).eps)
LOG_ZERO = complex(-np.inf, 0.0)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    abs_error_estimate: float

    def __post_init__(self):
        if not self.abs_error_estimate >= 0:
            raise ValueError("error estimate must be nonnegative")


@dataclass(frozen=True)
class Scaled:
    """A number ``mantissa * exp(log_scale)`` with optional derivative."""

    mantissa: complex
    log_scale: float
    dmantissa: complex = 0j
    abs_error: float = 0.0

    @property
    def value(self) -> complex:
        if self.mantissa == 0:
            return 0j
        return self.mantissa * math.exp(self.log_scale)

    @property
    def derivative(self) -> complex:
        if self.dmantissa == 0:
            return 0j
        return self.dmantissa * math.exp(self.log_scale)

    def shifted(self, log_factor: complex) -> "Scaled":
        """Multiply by exp(log_factor), keeping the mantissa of order one."""
        if log_factor.real == -np.inf:
            return Scaled(0j, 0.0, 0j, 0.0)
        ph = np.exp(1j * log_factor.imag)
        return Scaled(self.mantissa * ph, self.log_scale + log_factor.real,
                      self.dmantissa * ph, self.abs_error)


def combine(parts: Sequence[Scaled]) -> Scaled:
    """Sum of scaled numbers, brought to a common scale."""
    live = [p for p in parts if p.mantissa != 0 or p.dmantissa != 0]
    if not live:
        return Scaled(0j, 0.0)
    top = max(p.log_scale for p in live)
    m = dm = 0j
    err = 0.0
    for p in live:
        f = math.exp(p.log_scale - top)
        m += p.mantissa * f
        dm += p.dmantissa * f
        err += p.abs_error * f
    return Scaled(m, top, dm, err)


def is_nonpositive_integer(zc) -> bool:
    zc = complex(zc)
    return zc.imag == 0 and zc.real <= 0 and zc.real == math.floor(zc.real)


def log_gamma(zc):
    """Principal-branch log Gamma for scalars or arrays."""
    if np.ndim(zc) == 0:
        if is_nonpositive_integer(zc):
            raise PoleError(f"Gamma has a pole at {zc}")
        return complex(special.loggamma(complex(zc)))
    arr = np.asarray(zc, dtype=complex)
    if np.any((arr.imag == 0) & (arr.real <= 0) & (arr.real == np.floor(arr.real))):
        raise PoleError("Gamma has a pole in the argument array")
    return special.loggamma(arr)


def log_rgamma(zc) -> complex:
    """log(1/Gamma), equal to -inf at the poles of Gamma."""
    if is_nonpositive_integer(zc):
        return LOG_ZERO
    return -complex(special.loggamma(complex(zc)))


def rgamma(zc) -> complex:
    return complex(special.rgamma(complex(zc)))


def rgamma_derivative_at_pole(zc) -> float:
    """d/du of 1/Gamma(u) at u = -m: (-1)^m m!."""
    m = int(round(-complex(zc).real))
    return (-1) ** m * math.factorial(m)


def digamma(zc):
    if np.ndim(zc) == 0:
        if is_nonpositive_integer(zc):
            raise PoleError(f"digamma has a pole at {zc}")
        zc = complex(zc)
        if zc.imag == 0:
            return complex(special.psi(zc.real))
        return complex(special.psi(zc))
    arr = np.asarray(zc, dtype=complex)
    return special.psi(arr)


def trigamma(zc) -> complex:
    """psi'(zc); complex arguments by upward recurrence plus asymptotics."""
    if is_nonpositive_integer(zc):
        raise PoleError(f"trigamma has a pole at {zc}")
    zc = complex(zc)
    if zc.imag == 0:
        return complex(special.polygamma(1, zc.real))
    acc = 0j
    while abs(zc) < 20 or zc.real < 10:
        acc += 1 / zc**2
        zc += 1
    inv = 1 / zc
    inv2 = inv * inv
    # Bernoulli tail: 1/z + 1/(2z^2) + sum B_2k / z^(2k+1)
    bern = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)
    s = inv + inv2 / 2
    p = inv * inv2
    for b in bern:
        s += b * p
        p *= inv2
    return acc + s


def pochhammer(zc, k: int) -> complex:
    """Rising factorial (zc)_k."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    zc = complex(zc)
    if k <= 64 or is_nonpositive_integer(zc):
        out = 1 + 0j
        for j in range(k):
            out *= zc + j
            if out == 0:
                break
        return out
    if is_nonpositive_integer(zc + k):
        # only reachable for non-integer zc: impossible, kept for clarity
        raise PoleError("pochhammer endpoint on a pole")
    return complex(np.exp(log_gamma(zc + k) - log_gamma(zc)))


def log_pochhammer(zc, k: int) -> complex:
    """log (zc)_k, -inf if the product vanishes."""
    zc = complex(zc)
    if is_nonpositive_integer(zc):
        if k > -zc.real:
            return LOG_ZERO
        return complex(np.sum(np.log(zc + np.arange(k))))
    if k <= 64:
        return complex(np.sum(np.log(zc + np.arange(k))))
    return log_gamma(zc + k) - log_gamma(zc)


# --------------------------------------------------------------------------
# generic hypergeometric-type series in log form

def _series(upper, lower, x: complex, log_t0: complex, n0: int = 0,
            dupper=None, dlower=None, d0: complex = 0j, *, unit: bool = False,
            tol: float = 1e-17, max_terms: int = 4_000_000) -> Scaled:
    """Sum t_n, n >= n0, with t_{n+1}/t_n = prod(u+n)/prod(l+n) * x/(n+1).

    ``dupper``/``dlower`` give derivatives of the parameters with respect to an
    external variable; the derivative of the sum is accumulated alongside.
    For ``unit`` series an asymptotic tail correction is added.
    """
    upper = np.atleast_1d(np.asarray(upper, dtype=complex))
    lower = np.atleast_1d(np.asarray(lower, dtype=complex))
    want_d = dupper is not None or dlower is not None
    du = np.zeros(len(upper)) if dupper is None else np.asarray(dupper, dtype=complex)
    dl = np.zeros(len(lower)) if dlower is None else np.asarray(dlower, dtype=complex)
    if log_t0.real == -np.inf:
        return Scaled(0j, 0.0)
    scale = log_t0.real
    logt = log_t0
    dcur = complex(d0)
    s = ds = 0j
    a_sum = 0.0
    n = n0
    chunk = 32
    excess = complex(lower.sum() - upper.sum()) if unit else 0j
    while True:
        j = n + np.arange(chunk, dtype=float)
        num = np.prod(upper[:, None] + j, axis=0) if len(upper) else np.ones(chunk)
        den = np.prod(lower[:, None] + j, axis=0) if len(lower) else np.ones(chunk)
        r = num * x / (den * (j + 1))
        zeros = np.flatnonzero(r == 0)
        stop_at = int(zeros[0]) if zeros.size else None
        with np.errstate(divide="ignore"):
            lr = np.log(r.astype(complex))
        cum = np.concatenate(([0j], np.cumsum(lr[:-1])))
        logs = logt + cum
        if want_d:
            dd = (du[:, None] / (upper[:, None] + j)).sum(axis=0) - \
                 (dl[:, None] / (lower[:, None] + j)).sum(axis=0)
            dcum = dcur + np.concatenate(([0j], np.cumsum(dd[:-1])))
        if stop_at is not None:
            logs = logs[: stop_at + 1]
            if want_d:
                dcum = dcum[: stop_at + 1]
        top = float(np.max(logs.real))
        if top > scale:
            f = math.exp(scale - top)
            s *= f
            ds *= f
            a_sum *= f
            scale = top
        e = np.exp(logs - scale)
        s += e.sum()
        a_sum += float(np.abs(e).sum())
        if want_d:
            ds += (e * dcum).sum()
        if stop_at is not None:
            return Scaled(s, scale, ds, 4 * EPS * a_sum)
        last = abs(e[-1])
        rho = abs(r[-1])
        n_last = n + chunk - 1
        logt = logt + lr.sum()
        if want_d:
            dcur = dcum[-1] + dd[-1]
        n += chunk
        if unit:
            if rho < 1 and excess.real > 0:
                # power-law tail t_m ~ t_n (n/m)^(s+1), summed by Euler-Maclaurin
                tail = e[-1] * (n_last / excess - 0.5)
                resid = last * (2 + abs(excess))
                big = abs(s)
                if (abs(tail) <= tol * big or resid <= 1e-15 * big
                        or (n - n0 > max_terms and resid <= 1e-8 * big)):
                    s += tail
                    if want_d:
                        ds += dcum[-1] * tail
                    return Scaled(s, scale, ds, resid + 4 * EPS * a_sum)
        else:
            rho_b = max(rho, abs(x))
            if rho_b < 1:
                tail_mag = last * rho_b / (1 - rho_b)
                if tail_mag <= tol * max(abs(s), 1e-300):
                    return Scaled(s, scale, ds, tail_mag + 4 * EPS * a_sum)
        if n - n0 > max_terms:
            raise ConvergenceError(f"series did not converge within {max_terms} terms")
        chunk = min(chunk * 2, 8192)


# --------------------------------------------------------------------------
# regularized Gauss function F(a,b;c;w)/Gamma(c), w <= 0

def _f21_pfaff(a: complex, b: complex, c: complex, w: float, deriv: bool) -> Scaled:
    xi = w / (w - 1.0)
    if xi >= 1 - 1e-12:
        raise ConvergenceError(f"transformed argument {xi} too close to 1")
    bp = c - b
    n0 = int(round(1 - c.real)) if is_nonpositive_integer(c) else 0
    parts = []
    if deriv and n0 > 0:
        # terms killed by 1/Gamma(c+n) still carry a c-derivative
        for n in range(n0):
            lp = log_pochhammer(a, n) + log_pochhammer(bp, n)
            if lp.real == -np.inf or (xi == 0 and n > 0):
                continue
            m = n0 - 1 - n
            lt = lp + (n * math.log(xi) if n else 0.0) - math.lgamma(n + 1) + math.lgamma(m + 1)
            sign = (-1) ** m
            ph = np.exp(1j * lt.imag)
            parts.append(Scaled(0j, lt.real, sign * ph))
    if xi == 0:
        if n0 == 0:
            rg = rgamma(c)
            main = Scaled(rg, 0.0, -complex(digamma(c)) * rg if deriv else 0j)
        else:
            main = Scaled(0j, 0.0)
    else:
        lp = log_pochhammer(a, n0) + log_pochhammer(bp, n0)
        log_t0 = lp + n0 * math.log(xi) - math.lgamma(n0 + 1) - log_gamma(c + n0)
        d0 = 0j
        if deriv:
            d0 = sum(1 / (bp + j) for j in range(n0)) - complex(digamma(c + n0))
        main = _series([a, bp], [c], xi, log_t0, n0,
                       dupper=[0, 1] if deriv else None,
                       dlower=[1] if deriv else None, d0=d0)
    total = combine(parts + [main])
    return total.shifted(complex(a * math.log1p(-xi)))


def _f21_connection(a: complex, b: complex, c: complex, w: float, deriv: bool) -> Scaled:
    u = 1.0 / w
    parts = []
    for p, q in ((a, b), (b, a)):
        lg_head = log_gamma(q - p) + log_rgamma(q) - p * math.log(-w)
        if lg_head.real == -np.inf:
            continue
        e = p - c + 1
        f = p - q + 1
        ser = _series([p, e], [f], u, 0j, 0,
                      dupper=[0, -1] if deriv else None, dlower=[0] if deriv else None)
        cp = c - p
        if is_nonpositive_integer(cp):
            # 1/Gamma vanishes; only the derivative survives
            if deriv:
                k = rgamma_derivative_at_pole(cp)
                parts.append(Scaled(0j, ser.log_scale, k * ser.mantissa).shifted(lg_head))
            continue
        lrg = log_rgamma(cp)
        psi = complex(digamma(cp)) if deriv else 0j
        piece = Scaled(ser.mantissa, ser.log_scale,
                       ser.dmantissa - psi * ser.mantissa, ser.abs_error)
        parts.append(piece.shifted(lg_head + lrg))
    return combine(parts)


def hyp2f1_reg_scaled(a, b, c, w: float, deriv: bool = False) -> Scaled:
    """F(a,b;c;w)/Gamma(c) for w <= 0, with optional derivative in c."""
    a, b, c = complex(a), complex(b), complex(c)
    w = float(w)
    if w > 0:
        raise ValueError("argument must be nonpositive")
    xi = w / (w - 1.0) if w != 0 else 0.0
    if xi > 0.9 and w != 0:
        ba = b - a
        if not (ba.imag == 0 and ba.real == round(ba.real)):
            u = 1.0 / abs(w)
            reach = u * (1 + max(abs(a - c + 1), abs(b - c + 1), abs(a), abs(b)))
            if reach < 0.5:
                return _f21_connection(a, b, c, w, deriv)
    return _f21_pfaff(a, b, c, w, deriv)


def hyp2f1_reg(a, b, c, w: float) -> EvalResult:
    """Regularized Gauss function F(a,b;c;w)/Gamma(c) on w <= 0.

    Entire in c: at c = 0, -1, -2, ... the series starts past the vanishing
    terms.
    """
    s = hyp2f1_reg_scaled(a, b, c, w)
    scale = math.exp(s.log_scale) if s.mantissa != 0 else 0.0
    return EvalResult(s.value, float(s.abs_error * scale))


# --------------------------------------------------------------------------
# series at unit argument

def _sort_params(params) -> list:
    vals = [complex(p) for p in params]
    return sorted(vals, key=lambda v: (v.real, v.imag))


def hyp_terminating(upper: Sequence[complex], n: int, lower: Sequence[complex]) -> EvalResult:
    """Finite sum  pFq[-n, upper; lower; 1]  with Kahan compensation."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    up = _sort_params(upper)
    lo = _sort_params(lower)
    for l in lo:
        if is_nonpositive_integer(l) and -l.real <= n - 1:
            raise PoleError(f"lower parameter {l} meets a pole before the series ends")
    t = 1 + 0j
    s = 1 + 0j
    comp = 0j
    a_sum = 1.0
    for k in range(n):
        num = complex(k - n)
        for v in up:
            num *= v + k
        den = complex(k + 1)
        for v in lo:
            den *= v + k
        t = t * num / den
        if t == 0:
            break
        y = t - comp
        tmp = s + y
        comp = (tmp - s) - y
        s = tmp
        a_sum += abs(t)
    return EvalResult(s, 2 * EPS * (n + 1) * a_sum)


def hyp3f2_term(a1, a2, n: int, b1, b2) -> EvalResult:
    """3F2[-n, a1, a2; b1, b2; 1] as a terminating sum."""
    return hyp_terminating([a1, a2], n, [b1, b2])


def hyp4f3_term(x1, x2, x3, n: int, u, v, w2) -> EvalResult:
    """4F3[x1, x2, x3, -n; u, v, w2; 1] as a terminating sum."""
    return hyp_terminating([x1, x2, x3], n, [u, v, w2])


def hyp_unit_scaled(upper: Sequence[complex], lower: Sequence[complex]) -> Scaled:
    """Non-terminating (q+1)F(q)[upper; lower; 1]; needs Re(sum lower - sum upper) > 0."""
    up = _sort_params(upper)
    lo = _sort_params(lower)
    if len(up) != len(lo) + 1:
        raise ValueError("need one more upper than lower parameter")
    if (sum(lo) - sum(up)).real <= 0:
        raise ConvergenceError("unit-argument series diverges (nonpositive excess)")
    for l in lo:
        if is_nonpositive_integer(l):
            raise PoleError(f"lower parameter {l} is a nonpositive integer")
    return _series(up, lo, 1.0, 0j, 0, unit=True)


def hyp_unit(upper: Sequence[complex], lower: Sequence[complex]) -> EvalResult:
    s = hyp_unit_scaled(upper, lower)
    return EvalResult(s.value, float(s.abs_error * math.exp(s.log_scale)))


def _lg_ratio(num: Sequence[complex], den: Sequence[complex]) -> complex:
    """log of Gamma[num]/Gamma[den]; -inf if a denominator Gamma has a pole."""
    out = 0j
    for v in num:
        out += log_gamma(v)
    for v in den:
        r = log_rgamma(v)
        if r.real == -np.inf:
            return LOG_ZERO
        out += r
    return out


def bailey_3f2_scaled(a, b, c, e, f) -> Scaled:
    """3F2[a,b,c; e,f; 1] through the two-term relation swapping b and c.

    3F2 = Gamma[1-a,e,f,c-b; e-b,f-b,1+b-a,c] 3F2[b, b-e+1, b-f+1; 1+b-c, 1+b-a; 1]
          + (b <-> c).
    Valid when both right-hand series converge; used for terminating series
    (a = -m) whose direct sum suffers cancellation.
    """
    a, b, c, e, f = map(complex, (a, b, c, e, f))
    parts = []
    for p, q in ((b, c), (c, b)):
        lg = _lg_ratio([1 - a, e, f, q - p], [e - p, f - p, 1 + p - a, q])
        if lg.real == -np.inf:
            continue
        ser = hyp_unit_scaled([p, p - e + 1, p - f + 1], [1 + p - q, 1 + p - a])
        parts.append(ser.shifted(lg))
    return combine(parts)


def bailey_4f3_saalschutz(x, y, z, n: int, u, v, w) -> tuple[complex, tuple]:
    """Saalschutzian 4F3 transformation.

    4F3[x,y,z,-n; u,v,w] = G * 4F3[u-x, u-y, z, -n; 1-v+z-n, 1-w+z-n, u]
    with G = Gamma[v-z+n, w-z+n, v, w; v-z, w-z, v+n, w+n].
    Returns (log G, new parameter tuple (x', y', z', n, u', v', w')).
    """
    x, y, z, u, v, w = map(complex, (x, y, z, u, v, w))
    lg = _lg_ratio([v - z + n, w - z + n, v, w], [v - z, w - z, v + n, w + n])
    return lg, (u - x, u - y, z, n, 1 - v + z - n, 1 - w + z - n, u)


def hyp4f3_two_term_scaled(x, y, z, n: int, u, v, w) -> Scaled:
    """Terminating 4F3[x,y,z,-n; u,v,w; 1] as two non-terminating 4F3 series.

    4F3 = Gamma[1+x-u, 1+y-u, 1+z-u, 1-n-u, v, v-w;
                v-x, v-y, v-z, v+n, 1-u, 1-u+w]
          * 4F3[w-x, w-y, w-z, w+n; 1-u+w, 1-v+w, w; 1]  +  (v <-> w).
    """
    x, y, z, u, v, w = map(complex, (x, y, z, u, v, w))
    parts = []
    for p, q in ((v, w), (w, v)):
        lg = _lg_ratio([1 + x - u, 1 + y - u, 1 + z - u, 1 - n - u, p, p - q],
                       [p - x, p - y, p - z, p + n, 1 - u, 1 - u + q])
        if lg.real == -np.inf:
            continue
        ser = hyp_unit_scaled([q - x, q - y, q - z, q + n], [1 - u + q, 1 - p + q, q])
        parts.append(ser.shifted(lg))
    return combine(parts)
