import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from zmeasures.errors import ConvergenceError, ParameterError
from zmeasures.measures import ZABParams, ZWParams
from zmeasures.opkernels import (AskeyLeskyBasis, NeretinBasis, RacahIdentification, ZABKernel,
                                 divided_difference, neretin_basis, shell_sum, zab_log_weight,
                                 zab_trace, zab_weight_constant, zw_kernel)

ZW_REAL = (0.3, 0.6, 1.2, 1.5)
ZW_COMPLEX = (0.4 + 0.7j, 0.4 - 0.7j, 1.2 + 0.5j, 1.2 - 0.5j)


def al_mp(m, b, c, e, f):
    """sum_k (-m)_k (b)_k (c)_k / ((e)_k k!) (f+k)_{m-k}, in mpmath."""
    b, c, e, f = (v if isinstance(v, (mp.mpf, mp.mpc)) else mp.mpc(complex(v)) for v in (b, c, e, f))
    return mp.fsum(mp.rf(-m, k) * mp.rf(b, k) * mp.rf(c, k) / (mp.rf(e, k) * mp.factorial(k)) * mp.rf(f + k, m - k)
                   for k in range(m + 1))


def zw_kernel_mp(p: ZWParams, x, y):
    """Christoffel-Darboux kernel assembled in mpmath from the defining sums;
    the diagonal uses mpmath derivatives of the two polynomials."""
    N = p.N
    z, zp, w, wp = (mp.mpc(v) for v in (p.z, p.zp, p.w, p.wp))
    s = z + zp + w + wp
    pa = lambda x: al_mp(N, z + wp, zp + wp, s, x + wp + 0.5)
    pb = lambda x: al_mp(N - 1, z + wp + 1, zp + wp + 1, s + 2, x + wp + 1.5)

    def sqrt_f(x):
        f = 1 / (mp.gamma(z - x + 0.5) * mp.gamma(zp - x + 0.5) * mp.gamma(w + x + N + 0.5) * mp.gamma(wp + x + N + 0.5))
        return mp.sqrt(f.real)

    h = (mp.gamma(N) * mp.gamma(s + 1) * mp.gamma(s + 2)
         / (mp.gamma(s + N + 1) * mp.gamma(z + w + 1) * mp.gamma(z + wp + 1) * mp.gamma(zp + w + 1) * mp.gamma(zp + wp + 1)))
    x, y = mp.mpf(x), mp.mpf(y)
    if x == y:
        num = mp.diff(pa, x) * pb(x) - mp.diff(pb, x) * pa(x)
        return float((num / h * sqrt_f(x) ** 2).real)
    return float(((pa(x) * pb(y) - pb(x) * pa(y)) / (h * (x - y)) * sqrt_f(x) * sqrt_f(y)).real)


@pytest.mark.parametrize("zw", [ZW_REAL, ZW_COMPLEX])
@pytest.mark.parametrize("N", [3, 40, 160])
def test_askey_lesky_polynomials_against_mpmath(zw, N):
    mp.mp.dps = 120
    B = AskeyLeskyBasis(ZWParams(*zw, N))
    for x in (0.5, -3.5, 7.5, -N / 2 - 2.5 if N > 4 else -1.5, -N - 4.5):
        pt = B._point(x)
        for which, s in ((N, pt.pN), (N - 1, pt.pN1)):
            ref = complex(al_mp(*B._args(which, x)))
            assert abs(s.value - ref) <= 1e-10 * abs(ref)


@pytest.mark.parametrize("N", [10, 160])
@pytest.mark.parametrize("x,y", [(0.5, -1.5), (7.5, -20.5), (-3.5, 2.5), (3.5, -12.5)])
def test_zw_kernel_offdiagonal_against_mpmath(N, x, y):
    mp.mp.dps = 120
    p = ZWParams(*ZW_REAL, N)
    want = zw_kernel_mp(p, x, y)
    assert abs(zw_kernel(x, y, p) - want) <= 1e-10 * max(abs(want), 1e-6)


@pytest.mark.parametrize("N", [10, 160])
def test_zw_kernel_diagonal_against_mpmath(N):
    mp.mp.dps = 120
    p = ZWParams(*ZW_REAL, N)
    B = AskeyLeskyBasis(p)
    for x in (0.5, -2.5, 5.5, -N / 2 - 3.5):
        want = zw_kernel_mp(p, x, x)
        assert 0 < want < 1
        assert math.isclose(B.kernel(x, x), want, rel_tol=1e-9)


def test_monic_leading_coefficient():
    B = AskeyLeskyBasis(ZWParams(*ZW_COMPLEX, 4))
    for which in (4, 3):
        nodes = [k + 0.5 for k in range(which + 1)]
        assert abs(divided_difference(list(B.eval(which, np.array(nodes))), nodes) - 1) < 1e-10


@pytest.mark.parametrize("N", [1, 2, 5, 8])
def test_zw_trace_is_N(N):
    B = AskeyLeskyBasis(ZWParams(*ZW_COMPLEX, N))
    r = B.trace(1e-10)
    assert r.settled(1e-10)
    assert abs(r.value - N) < 1e-3


def test_reversal_symmetry():
    p = ZWParams(*ZW_REAL, 6)
    B, R = AskeyLeskyBasis(p), AskeyLeskyBasis(p.swapped())
    for x, y in [(0.5, 1.5), (-2.5, 3.5), (-7.5, -0.5)]:
        assert abs(B.kernel(x, y) - R.kernel(-6 - x, -6 - y)) < 1e-12


def test_sigma_zero_rejected():
    with pytest.raises(ParameterError):
        AskeyLeskyBasis(ZWParams(0.3, 0.6, -0.4, -0.5, 2))  # sigma = 0 up to rounding


def test_shell_sum_geometric():
    r = shell_sum(lambda xs: np.exp(-np.abs(xs)), tol=1e-14)
    want = 2 * math.exp(-0.5) / (1 - math.exp(-1))
    assert abs(r.value - want) < 1e-12
    assert r.settled(1e-14)
    slow = shell_sum(lambda xs: 1 / np.abs(xs), tol=1e-3, cap=200)
    assert not slow.settled(1e-3)


# Neretin polynomials ------------------------------------------------------

def q_mp(B: NeretinBasis, n, t):
    a1, a2, a3, a4 = (mp.mpc(v) for v in B.a)
    al = mp.mpc(B.alpha)
    sa = a1 + a2 + a3 + a4
    U, V, W = 2 - a1 - a2, 2 - a1 - a3, 2 - a1 - a4
    s = mp.fsum(mp.rf(-n, k) * mp.rf(n + 3 - sa, k) * mp.rf(1 - a1 + t + al, k) * mp.rf(1 - a1 - t - al, k)
                / (mp.rf(U, k) * mp.rf(V, k) * mp.rf(W, k) * mp.factorial(k)) for k in range(n + 1))
    return mp.rf(U, n) * mp.rf(V, n) * mp.rf(W, n) * s


ZAB6 = ZABParams(0.45 + 0.5j, 0.45 - 0.5j, 0.5, 0.25, 6)


@pytest.mark.parametrize("n", range(6))
def test_neretin_values(n):
    mp.mp.dps = 60
    B = neretin_basis(ZAB6)
    for t in (0, 1, 3, 10, 250):
        want = complex(q_mp(B, n, t))
        assert abs(B.q_eval(n, t) - want) <= 1e-11 * abs(want)


def test_neretin_routes_agree_at_large_degree():
    mp.mp.dps = 250
    B = neretin_basis(ZABParams(0.3, 0.6, 0.5, 0.25, 160))
    for t in (159.0, 160.0, 175.0):
        want = q_mp(B, 160, t)
        got = B.q_transformed(160, t)
        assert abs(complex(mp.log(want)).real - (math.log(abs(got.mantissa)) + got.log_scale)) < 1e-10


@pytest.mark.parametrize("n", range(6))
def test_neretin_norm_and_leading(n):
    B = neretin_basis(ZAB6)
    s = B.inner(n, n, tol=1e-10).value
    assert abs(s / B.norm(n) - 1) < 1e-6
    if n:
        nodes = [float(((t + B.alpha) ** 2).real) for t in range(n + 1)]
        vals = [B.q_eval(n, float(t)) for t in range(n + 1)]
        assert abs(divided_difference(vals, nodes) / B.leading(n) - 1) < 1e-10


def test_neretin_inner_needs_moments():
    # n = 3 on the N = 3 example: Q_3^2 w is not summable
    B = neretin_basis(ZABParams(0.3 + 0.5j, 0.3 - 0.5j, 0.5, 0.25, 3))
    assert abs(B.inner(2, 2, tol=1e-8).value / B.norm(2) - 1) < 1e-6
    with pytest.raises(ConvergenceError):
        B.inner(3, 3, tol=1e-8, cap=2000)


def test_zab_weight_proportional_to_neretin_weight():
    B = neretin_basis(ZAB6)
    C = zab_weight_constant(ZAB6)
    for x in (-0.5, 0.5, 1.5, 9.5):
        r = RacahIdentification.of(ZAB6, x)
        ratio = cmath.exp(zab_log_weight(x, ZAB6) - B.log_weight(r.t))
        assert abs(ratio / C - 1) < 1e-10
    assert zab_log_weight(-6.5, ZAB6).real == -np.inf


def test_zab_trace_and_moment_condition():
    assert abs(zab_trace(ZAB6, 1e-10).value - 6) < 1e-3
    with pytest.raises(ParameterError):
        ZABKernel(ZABParams(0.3 + 0.5j, 0.3 - 0.5j, 0.5, 0.25, 3))


def test_zab_kernel_symmetric_and_vanishes_below_support():
    K = ZABKernel(ZAB6)
    assert abs(K.kernel(0.5, 2.5) - K.kernel(2.5, 0.5)) < 1e-14
    assert K.kernel(-6.5, 0.5) == 0
    assert 0 < K.kernel(1.5, 1.5) < 1
