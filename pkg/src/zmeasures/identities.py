"""Exact identity suites shared by the command line and the test-suite.

Each suite returns a list of ``Check`` rows: a label, the observed
discrepancy, the tolerance and the resulting verdict.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .dpp import WindowMatrix, circ_blocks, k_from_l, lattice_window, projection_residual
from .errors import ParameterError
from .kernels import (GammaKernel, HypergeometricKernel, circ_transform, fourier_symbols, gamma_sign,
                      l_matrix, l_tail)
from .measures import ZABParams, ZWParams, ZXiParams
from .opkernels import (AskeyLeskyBasis, RacahIdentification, divided_difference, neretin_basis,
                        zab_log_weight, zab_trace, zab_weight_constant)


@dataclass(frozen=True)
class Check:
    label: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tol)


def form_relation(params: ZXiParams, window: int = 60, tol: float = 1e-10) -> list[Check]:
    """Second-form kernel against the circ transform of the first form."""
    H = HypergeometricKernel(params)
    pts = lattice_window(window)
    got = circ_transform(H.matrix(pts, "first"), pts)
    want = H.matrix(pts, "second")
    return [Check(f"hypergeometric z={params.z} z'={params.zp} xi={params.xi}",
                  float(np.abs(got - want).max()), tol)]


def gamma_form_relation(z: complex, zp: complex, window: int = 60, tol: float = 1e-10) -> list[Check]:
    G = GammaKernel(z, zp)
    pts = lattice_window(window)
    first = G.matrix(pts, "first")
    if G.psi:
        # the psi display drops the sign of Gamma(z + x + 1/2); restore it
        s = np.array([gamma_sign((complex(z) + x + 0.5).real) for x in pts])
        first = s[:, None] * first * s[None, :]
    got = circ_transform(first, pts)
    want = G.matrix(pts, "second")
    return [Check(f"gamma z={z} z'={zp}", float(np.abs(got - want).max()), tol)]


DEFAULT_DXI_PROBES = ((0.5, 1.5), (-0.5, 0.5), (1.5, -2.5), (-3.5, -1.5), (2.5, 4.5),
                      (-4.5, 3.5), (0.5, -5.5), (6.5, 1.5), (-2.5, 7.5), (3.5, -0.5))


def xi_derivative(params: ZXiParams, probes=DEFAULT_DXI_PROBES, step: float = 1e-5,
                  tol: float = 1e-6) -> list[Check]:
    """Closed-form d/dxi of the first-form kernel against a central difference."""
    H = HypergeometricKernel(params)
    lo = HypergeometricKernel(ZXiParams(params.z, params.zp, params.xi - step))
    hi = HypergeometricKernel(ZXiParams(params.z, params.zp, params.xi + step))
    out = []
    for x, y in probes:
        exact = H.dxi(x, y)
        fd = (hi.first(x, y) - lo.first(x, y)) / (2 * step)
        out.append(Check(f"dK/dxi at ({x}, {y})", abs(exact - fd) / max(abs(fd), 1e-300), tol))
    return out


def _block_checks(label: str, L: WindowMatrix, tol: float) -> list[Check]:
    K = k_from_l(L)
    Kc, cK = circ_blocks(K)
    A, B = Kc.entries, cK.entries
    I = np.eye(len(L.points))
    return [
        Check(f"{label}: sum is identity", float(np.abs(A + B - I).max()), tol),
        Check(f"{label}: products vanish", float(max(np.abs(A @ B).max(), np.abs(B @ A).max())), tol),
        Check(f"{label}: idempotent", float(max(np.abs(A @ A - A).max(), np.abs(B @ B - B).max())), tol),
        Check(f"{label}: symmetric", float(np.abs(A - A.T).max()), tol),
    ]


def block_algebra(seed: int = 0, size: int = 20, z: complex = 0.3, zp: complex = 0.6,
                  xi: float = 0.5, tol: float = 1e-12) -> list[Check]:
    """Projection algebra of the blocks built from L = [[0, A], [-A^T, 0]].

    Two sources of A: a seeded random matrix and the A-kernel on a window.
    """
    if size % 2:
        raise ParameterError("block size must be even")
    half = size // 2
    pts = lattice_window(half)
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((half, half)) / math.sqrt(half)
    # points are ordered negative first, so the lower-left block maps H_- -> H_+
    L = np.zeros((size, size))
    L[half:, :half] = A
    L[:half, half:] = -A.T
    out = _block_checks("random A", WindowMatrix(pts, L), tol)
    out += _block_checks("A-kernel", WindowMatrix(pts, l_matrix(pts, z, zp, xi)), tol)
    return out


def resolvent(params: ZXiParams, window: int = 80, interior: int = 10, tol: float = 1e-8) -> list[Check]:
    """L (1 + L)^{-1} on a window against the closed-form second-form kernel."""
    pts = lattice_window(window)
    K = k_from_l(WindowMatrix(pts, l_matrix(pts, params.z, params.zp, params.xi)))
    H = HypergeometricKernel(params)
    inner = [p for p in pts if abs(p) < interior]
    got = K.sub(inner)
    want = H.matrix(inner, "second")
    return [Check(f"resolvent window {window}", float(np.abs(got - want).max()), tol)]


def fourier_identities(z: complex, zp: complex, n_u: int = 20, tol: float = 1e-12) -> list[Check]:
    """a = |c|^2 / (1 + |c|^2) and b = c / (1 + |c|^2) on a grid of u."""
    errs_a, errs_b = [], []
    for u in np.linspace(-3, 3, n_u):
        c, a, b = fourier_symbols(u, z, zp)
        d = 1 + abs(c) ** 2
        errs_a.append(abs(a - abs(c) ** 2 / d))
        errs_b.append(abs(b - c / d))
    return [Check("a = |c|^2/(1+|c|^2)", float(max(errs_a)), tol),
            Check("b = c/(1+|c|^2)", float(max(errs_b)), tol)]


def tail_transform(u: float, z: complex, zp: complex) -> complex:
    """Numerical transform of the tail L-kernel profile, e^{-iuv} convention."""
    def even(v):
        return l_tail(v, 0.0, z, zp, ("+", "-")) + l_tail(-v, 0.0, z, zp, ("+", "-"))

    def odd(v):
        return l_tail(v, 0.0, z, zp, ("+", "-")) - l_tail(-v, 0.0, z, zp, ("+", "-"))

    if u == 0:
        re = integrate.quad(even, 0, np.inf, epsabs=1e-12, epsrel=1e-12, limit=400)[0]
        return complex(re, 0.0)
    re = integrate.quad(even, 0, np.inf, weight="cos", wvar=u, epsabs=1e-12, limlst=100)[0]
    im = integrate.quad(odd, 0, np.inf, weight="sin", wvar=u, epsabs=1e-12, limlst=100)[0]
    return complex(re, -im)


def fourier_quadrature(z: complex, zp: complex, us=(0.0, 0.5, 1.0), tol: float = 1e-6) -> list[Check]:
    return [Check(f"transform at u={u}", abs(tail_transform(u, z, zp) - fourier_symbols(u, z, zp)[0]), tol)
            for u in us]


def projection_trend(kernel: str, z: complex, zp: complex, xi: float | None = None,
                     windows=(40, 80, 160), radius: float = 10) -> tuple[list[float], bool]:
    """Interior residuals of K^2 - K over growing windows and whether they
    strictly decrease."""
    if kernel == "hypergeometric":
        K = HypergeometricKernel(ZXiParams(z, zp, xi))
        build = lambda pts: K.matrix(pts, "first")
    elif kernel == "gamma":
        if abs(complex(z) + complex(zp)) >= 1:
            raise ParameterError("the gamma projection check needs |z + z'| < 1")
        G = GammaKernel(z, zp)
        build = lambda pts: G.matrix(pts, "first")
    else:
        raise ParameterError(f"unknown kernel {kernel!r}")
    res = []
    for n in windows:
        pts = lattice_window(n)
        res.append(projection_residual(WindowMatrix(pts, build(pts)), radius=radius))
    return res, all(b < a for a, b in zip(res, res[1:]))


SUITES = ("form-relation", "gamma-form-relation", "xi-derivative", "block-algebra",
          "resolvent", "fourier", "projection")


# --------------------------------------------------------------------------
# orthogonal-polynomial suites

def askey_lesky_suite(params: ZWParams, shell_tol: float = 1e-10) -> list[Check]:
    B = AskeyLeskyBasis(params)
    N = params.N
    out = []
    if N <= 5:
        for which in (N, N - 1):
            if which == 0:
                continue
            nodes = [k + 0.5 for k in range(which + 1)]
            lead = divided_difference(list(B.eval(which, np.array(nodes))), nodes)
            out.append(Check(f"p_{which} monic", abs(lead - 1), 1e-8))
    ab = B.inner(N, N - 1, shell_tol).value
    aa = B.inner(N, N, shell_tol).value
    bb = B.inner(N - 1, N - 1, shell_tol).value
    out.append(Check("orthogonality", abs(ab) / math.sqrt(abs(aa * bb)), 1e-6))
    out.append(Check("norm h_{N-1}", abs(bb / B.norm - 1), 1e-6))
    out.append(Check("trace", abs(B.trace(shell_tol).value - N), 1e-3))
    return out


def neretin_suite(params: ZABParams, n_max: int = 5, shell_tol: float = 1e-10) -> list[Check]:
    """Norms, leading coefficients and orthogonality of Q_n for n <= n_max,
    the weight proportionality and, when the moment condition holds, the
    trace of the kernel."""
    B = neretin_basis(params)
    out = []
    for n in range(n_max + 1):
        s = B.inner(n, n, shell_tol).value
        out.append(Check(f"H_{n}", abs(s / B.norm(n) - 1), 1e-6))
        if n:
            nodes = [float(((t + B.alpha) ** 2).real) for t in range(n + 1)]
            vals = [B.q_eval(n, float(t)) for t in range(n + 1)]
            out.append(Check(f"k_{n}", abs(divided_difference(vals, nodes) / B.leading(n) - 1), 1e-10))
            o = B.inner(n, n - 1, shell_tol).value
            out.append(Check(f"<Q_{n}, Q_{n - 1}>", abs(o) / math.sqrt(abs(s * B.inner(n - 1, n - 1, shell_tol).value)), 1e-6))
    if not (float(params.a + params.b).is_integer() or float(params.a).is_integer()):
        C = zab_weight_constant(params)
        ratios = []
        for x in (-0.5, 0.5, 1.5):
            r = RacahIdentification.of(params, x)
            ratios.append(cmath.exp(zab_log_weight(x, params) - B.log_weight(r.t)))
        out.append(Check("g / w constant", max(abs(v / C - 1) for v in ratios), 1e-10))
    if params.moment_condition:
        out.append(Check("trace", abs(zab_trace(params, shell_tol).value - params.N), 1e-3))
    return out
