import math
from fractions import Fraction

import pytest

from qpverify import (
    TauNome,
    half_period_rewrite,
    lemma1_multiplier,
    reduce_argument,
    theta_eval,
    theta_nullwerte,
    theta_series,
)
from qpverify.errors import DomainError, EvalOverflowError
from qpverify.exact import QQI_ONE, QQi
from qpverify.rng import Lcg
from qpverify.theta import HALF_BOTH, HALF_PI, HALF_PITAU, theta1_triple_prime0

from conftest import TAUS, rel_err, theta_oracle

# frozen from the brute-force oracle: sum of q^(n^2), q = e^(-pi)
THETA3_AT_I = 1.0864348112133082


def test_theta3_nullwert_against_oracle():
    tn = TauNome.from_tau(1j)
    got = theta_eval(3, 0j, tn)
    assert rel_err(got, theta_oracle(3, 0j, 1j)) < 1e-15
    assert abs(got.real - THETA3_AT_I) < 1e-15
    assert abs(got.imag) < 1e-16


def test_theta1_vanishes_at_zero():
    tn = TauNome.from_tau(0.3 + 0.8j)
    assert theta_eval(1, 0j, tn) == 0j


def test_theta1_pi_shift_flips_sign():
    tn = TauNome.from_tau(1j)
    lhs = theta_eval(1, 0.3 + math.pi, tn)
    assert rel_err(lhs, -theta_eval(1, 0.3, tn)) < 1e-13


@pytest.mark.parametrize("tau", TAUS)
@pytest.mark.parametrize("kind", [1, 2, 3, 4])
def test_series_matches_oracle(tau, kind):
    tn = TauNome.from_tau(tau)
    rng = Lcg(kind)
    for _ in range(20):
        z = complex(rng.uniform_in(-2, 2), rng.uniform_in(-1.2, 1.2))
        assert rel_err(theta_series(kind, z, tn), theta_oracle(kind, z, tau)) < 1e-13


@pytest.mark.parametrize("tau", TAUS)
def test_lemma1_quasi_periodicity(tau):
    """theta_k against the exact multipliers, raw series on both sides."""
    tn = TauNome.from_tau(tau)
    rng = Lcg(11)
    for kind in (1, 2, 3, 4):
        for _ in range(50):
            z = complex(rng.uniform_in(-1.5, 1.5), rng.uniform_in(-1.0, 1.0))
            for (j, k, lam) in ((1, 0, math.pi), (0, 1, math.pi * tau)):
                lhs = theta_series(kind, z + lam, tn)
                m = lemma1_multiplier(kind, j, k)
                rhs = m.value(z, tn) * theta_series(kind, z, tn)
                assert rel_err(lhs, rhs) < 1e-10


@pytest.mark.parametrize("tau", TAUS)
def test_parity(tau):
    tn = TauNome.from_tau(tau)
    rng = Lcg(5)
    for _ in range(30):
        z = complex(rng.uniform_in(-1.5, 1.5), rng.uniform_in(-1.0, 1.0))
        assert rel_err(theta_series(1, -z, tn), -theta_series(1, z, tn)) < 1e-12
        for kind in (2, 3, 4):
            assert rel_err(theta_series(kind, -z, tn), theta_series(kind, z, tn)) < 1e-12


def test_reduce_argument_window_and_roundtrip():
    tau = 0.3 + 0.8j
    tn = TauNome.from_tau(tau)
    rng = Lcg(23)
    for kind in (1, 2, 3, 4):
        for _ in range(25):
            z = complex(rng.uniform_in(-9, 9), rng.uniform_in(-6, 6))
            z0, m = reduce_argument(kind, z, tn)
            assert abs(z0.real) <= math.pi / 2 + 1e-12
            assert abs(z0.imag) <= math.pi * tau.imag / 2 + 1e-12
            raw = theta_series(kind, z, tn)
            assert rel_err(raw, m.value(z0, tn) * theta_series(kind, z0, tn)) < 1e-10


def test_reduce_argument_exact_bookkeeping():
    tn = TauNome.from_tau(0.3 + 0.8j)
    z = 0.4 + 0.3j  # already reduced
    z0, m = reduce_argument(1, z + math.pi * tn.tau, tn)
    assert abs(z0 - z) < 1e-12
    assert m.sign == QQi.of(-1)
    assert m.c_tau == Fraction(-1)
    assert m.c_z == Fraction(-2)
    assert m.c_pi == 0

    z0, m = reduce_argument(4, z + 5 * math.pi, tn)
    assert abs(z0 - z) < 1e-12
    assert m.sign == QQI_ONE
    assert (m.c_pi, m.c_tau, m.c_z) == (0, 0, 0)

    z0, m = reduce_argument(3, z + math.pi, tn)
    assert m.sign == QQI_ONE and (m.c_pi, m.c_tau, m.c_z) == (0, 0, 0)


def test_multiplier_composition_is_exact():
    a = lemma1_multiplier(1, 2, 3)
    b = lemma1_multiplier(1, -1, 1)
    c = a.compose(b)
    assert c.c_tau == a.c_tau + b.c_tau
    assert c.c_z == a.c_z + b.c_z
    assert c.sign == a.sign * b.sign


@pytest.mark.parametrize("tau", TAUS)
def test_half_period_rewrites_numeric(tau):
    """All 12 half-period transformations against the raw series."""
    tn = TauNome.from_tau(tau)
    shifts = {
        HALF_PI: math.pi / 2,
        HALF_PITAU: math.pi * tau / 2,
        HALF_BOTH: math.pi / 2 + math.pi * tau / 2,
    }
    rng = Lcg(31)
    for kind in (1, 2, 3, 4):
        for name, value in shifts.items():
            new_kind, m = half_period_rewrite(kind, name)
            for _ in range(10):
                z = complex(rng.uniform_in(-1.2, 1.2), rng.uniform_in(-0.8, 0.8))
                lhs = theta_series(kind, z + value, tn)
                rhs = m.value(z, tn) * theta_series(new_kind, z, tn)
                assert rel_err(lhs, rhs) < 1e-12


def test_half_period_rewrite_exact_table_entries():
    new_kind, m = half_period_rewrite(3, HALF_PI)
    assert new_kind == 4
    assert m.sign == QQI_ONE and (m.c_pi, m.c_tau, m.c_z) == (0, 0, 0)

    new_kind, m = half_period_rewrite(2, HALF_PITAU)
    assert new_kind == 3
    assert m.sign == QQI_ONE
    assert m.c_tau == Fraction(-1, 4) and m.c_z == Fraction(-1)

    new_kind, m = half_period_rewrite(1, HALF_PI)
    assert new_kind == 2 and m.sign == QQI_ONE


def test_nullwerte_self_dual_point():
    nw = theta_nullwerte(TauNome.from_tau(1j))
    assert rel_err(nw.theta2, nw.theta4) < 1e-13


@pytest.mark.parametrize("tau", TAUS + (0.5j, 2j))
def test_theta1_prime_is_nullwert_product(tau):
    nw = theta_nullwerte(TauNome.from_tau(tau))
    assert rel_err(nw.theta1_prime, nw.theta2 * nw.theta3 * nw.theta4) < 1e-12


def test_truncation_padding_stable():
    rng = Lcg(17)
    for tau in TAUS:
        tn = TauNome.from_tau(tau)
        for kind in (1, 2, 3, 4):
            z = complex(rng.uniform_in(-1.5, 1.5), rng.uniform_in(-1.0, 1.0))
            a = theta_series(kind, z, tn)
            b = theta_series(kind, z, tn, pad=5)
            assert rel_err(a, b) < 1e-14


def test_domain_bounds():
    with pytest.raises(DomainError):
        TauNome.from_tau(0.5 - 0.1j)
    with pytest.raises(DomainError):
        TauNome.from_tau(0.5 + 0.01j)
    assert TauNome.from_tau(0.5 + 0.06j).low_accuracy
    assert not TauNome.from_tau(0.5 + 0.4j).low_accuracy


def test_multiplier_overflow():
    tn = TauNome.from_tau(1j)
    with pytest.raises(EvalOverflowError):
        theta_eval(3, 40j * math.pi, tn)


def test_theta1_third_derivative_sign():
    # at tau = i the ratio theta1'''/theta1' equals -3/pi
    tn = TauNome.from_tau(1j)
    ratio = theta1_triple_prime0(tn) / theta_nullwerte(tn).theta1_prime
    assert rel_err(ratio, -3 / math.pi) < 1e-13
