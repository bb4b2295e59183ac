import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zmeasures import combinatorics as cb
from zmeasures.errors import BudgetError, ParameterError
from zmeasures.measures import (AdmissibilityClass, ZABParams, ZWParams, ZXiParams, classify,
                                correlation_oracle, mixing_tail, mixing_weight, plancherel_weight,
                                z_ensemble, z_weight, z_weight_frobenius, zab_weight, zw_const,
                                zw_weight)


@pytest.mark.parametrize("z,zp,cls", [
    (0.4 + 0.7j, 0.4 - 0.7j, AdmissibilityClass.PRINCIPAL),
    (0.3, 0.6, AdmissibilityClass.COMPLEMENTARY),
    (-1.3, -1.9, AdmissibilityClass.COMPLEMENTARY),
    (2, 1.5, AdmissibilityClass.DEGENERATE),
    (-3, -2.2, AdmissibilityClass.DEGENERATE),
    (0.2, -0.1, AdmissibilityClass.INADMISSIBLE),
    (0.5, 1.5, AdmissibilityClass.INADMISSIBLE),
    (0.4 + 0.7j, 0.4 + 0.7j, AdmissibilityClass.INADMISSIBLE),
])
def test_classify(z, zp, cls):
    assert classify(z, zp) is cls


def test_zero_parameter_rejected():
    with pytest.raises(ParameterError):
        classify(0, 0.5)


@pytest.mark.parametrize("xi", [0, 1, -0.2, 1.5])
def test_xi_range(xi):
    with pytest.raises(ParameterError):
        ZXiParams(0.3, 0.6, xi)


def test_frozen_weight():
    z, xi = 0.4 + 0.7j, 0.35
    zp = z.conjugate()
    poch = lambda c: c * (c + 1) * (c - 1)  # contents of (2,1)
    want = ((1 - xi) ** (z * zp) * xi**3 * poch(z) * poch(zp) * (2 / 6) ** 2).real
    got = z_weight(ZXiParams(z, zp, xi), cb.YoungDiagram.of(2, 1)).value
    assert math.isclose(got, want, rel_tol=1e-13)
    assert math.isclose(got, 0.00487364253666178, rel_tol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 7), max_size=5))
def test_weight_two_forms(rows):
    lam = cb.YoungDiagram(tuple(sorted(rows, reverse=True)))
    for p in (ZXiParams(0.4 + 0.7j, 0.4 - 0.7j, 0.35), ZXiParams(0.3, 0.6, 0.7), ZXiParams(2, 1.5, 0.5)):
        a = z_weight(p, lam).value
        b = z_weight_frobenius(p, lam).value
        assert math.isclose(a, b, rel_tol=1e-10, abs_tol=1e-300)


def test_degenerate_weight_vanishes_outside_strip():
    # z = 2: only diagrams fitting in two rows carry weight
    p = ZXiParams(2, 1.5, 0.5)
    assert z_weight(p, cb.YoungDiagram.of(1, 1, 1)).value == 0
    assert z_weight(p, cb.YoungDiagram.of(3, 1)).value > 0


@pytest.mark.parametrize("p", [ZXiParams(0.4 + 0.7j, 0.4 - 0.7j, 0.35), ZXiParams(0.3, 0.6, 0.5)])
def test_levels_sum_to_mixing_weights(p):
    for n in range(8):
        s = sum(z_weight(p, lam).value for lam in cb.enum_partitions(n))
        assert math.isclose(s, mixing_weight(n, p), rel_tol=1e-12)
    assert mixing_tail(28, ZXiParams(0.3, 0.6, 0.35)) < 1e-9


def test_plancherel_normalized():
    s = sum(plancherel_weight(1.5, lam) for n in range(30) for lam in cb.enum_partitions(n))
    assert math.isclose(s, 1.0, rel_tol=1e-12)
    with pytest.raises(ParameterError):
        plancherel_weight(0, cb.YoungDiagram())


def test_inadmissible_weights_rejected():
    with pytest.raises(ParameterError):
        z_weight(ZXiParams(0.2, -0.1, 0.5), cb.YoungDiagram.of(1))


def test_zw_params():
    p = ZWParams(0.4 + 0.7j, 0.4 - 0.7j, 1.2 + 0.5j, 1.2 - 0.5j, 2)
    assert p.sigma == pytest.approx(3.2)
    assert p.swapped().w == p.z
    with pytest.raises(ParameterError):
        ZWParams(0.3, 0.6, 0.5, 1.0, 2)
    with pytest.raises(ParameterError):
        ZWParams(-0.7, -0.8, -0.1, -0.2, 2)


def test_zw_weight_positive_and_symmetric():
    p = ZWParams(0.4 + 0.7j, 0.4 - 0.7j, 1.2 + 0.5j, 1.2 - 0.5j, 2)
    for lam in cb.enum_signatures(2, 4):
        assert zw_weight(lam, p).value > 0
        # reversal symmetry: swapping (z, z') and (w, w') maps lam to its reversed negation
        a = zw_weight(lam, p).value
        b = zw_weight(lam.reversed_negated(), p.swapped()).value
        assert math.isclose(a, b, rel_tol=1e-12)
    total, shell = zw_const(p, 20)
    assert total > 0 and shell < 1e-3


def test_zab_weight():
    p = ZABParams(0.45 + 0.5j, 0.45 - 0.5j, 0.5, 0.25, 3)
    vals = [zab_weight(lam, p).value for lam in cb.enum_signatures(3, 6, nonneg=True)]
    assert min(vals) > 0
    with pytest.raises(ParameterError):
        zab_weight(cb.Signature((1, -1, -2)), p)
    with pytest.raises(ParameterError):
        ZABParams(0.3, 0.6, -1.5, 0.25, 2)
    assert ZABParams(0.45 + 0.5j, 0.45 - 0.5j, 0.5, 0.25, 3).moment_condition
    assert not ZABParams(0.3 + 0.5j, 0.3 - 0.5j, 0.5, 0.25, 3).moment_condition


def test_oracle_empty_and_single_point():
    p = ZXiParams(0.3, 0.6, 0.35)
    ens = z_ensemble(p, 20)
    assert math.isclose(correlation_oracle(ens, []).value, 1 - ens.tail, abs_tol=1e-12)
    # -1/2 is occupied by some diagrams and not others
    r = correlation_oracle(ens, [-0.5]).value
    assert 0 < r < 1


def test_oracle_budget():
    ens = z_ensemble(ZXiParams(0.4 + 0.7j, 0.4 - 0.7j, 0.9), 10)
    with pytest.raises(BudgetError):
        correlation_oracle(ens, [0.5], tol=1e-9)
