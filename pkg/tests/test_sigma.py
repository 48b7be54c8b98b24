import cmath

import pytest

from qpverify import (
    sigma_aux_consistency,
    sigma_eval,
    sigma_product_oracle,
)
from qpverify.errors import DomainError, EvalOverflowError
from qpverify.rng import Lcg

from conftest import rel_err


def test_sigma_zero_and_slope(lat_square):
    assert sigma_eval("sigma", 0, lat_square) == 0
    z = 1e-6
    assert abs(sigma_eval("sigma", z, lat_square) / z - 1) < 1e-6


def test_sigma_aux_normalization(lattices):
    for lat in lattices:
        for j in (1, 2, 3):
            assert rel_err(sigma_eval(f"sigma{j}", 0, lat), 1) < 1e-14


def test_sigma_j_vanishes_at_own_half_period(lattices):
    for lat in lattices:
        for j in (1, 2, 3):
            probe = abs(sigma_eval(f"sigma{j}", 0.37 * lat.omega1 + 0.21 * lat.omega3, lat))
            assert abs(sigma_eval(f"sigma{j}", lat.omega(j), lat)) < 1e-12 * probe


def test_unknown_kind_rejected(lat_square):
    with pytest.raises(DomainError):
        sigma_eval("sigma4", 0.1, lat_square)


def test_product_oracle_at_spec_point(lat_square):
    z = 0.3 + 0.1j
    a = sigma_eval("sigma", z, lat_square)
    b = sigma_product_oracle(z, lat_square, 60)
    assert rel_err(a, b) < 1e-5


def test_product_oracle_basics(lat_square):
    assert sigma_product_oracle(0, lat_square, 12) == 0
    with pytest.raises(DomainError):
        sigma_product_oracle(0.1, lat_square, 5)
    z = 0.4 + 0.22j
    a = sigma_product_oracle(z, lat_square, 24)
    b = sigma_product_oracle(-z, lat_square, 24)
    assert rel_err(a, -b) < 1e-12


def test_product_oracle_converges_with_cutoff(lattices):
    """Doubling the shell cutoff should at least halve the disagreement."""
    rng = Lcg(3)
    for lat in lattices:
        worst30 = worst60 = 0.0
        for _ in range(6):
            u, v = rng.uniform_in(-0.4, 0.4), rng.uniform_in(-0.4, 0.4)
            z = u * 2 * lat.omega1 + v * 2 * lat.omega3
            if abs(z) < 0.1 * abs(lat.omega1):
                continue
            a = sigma_eval("sigma", z, lat)
            worst30 = max(worst30, rel_err(a, sigma_product_oracle(z, lat, 30)))
            worst60 = max(worst60, rel_err(a, sigma_product_oracle(z, lat, 60)))
        assert worst60 <= worst30 / 2


def test_quasi_periodicity(lattices):
    rng = Lcg(7)
    for lat in lattices:
        for _ in range(15):
            z = complex(rng.uniform_in(-1, 1), rng.uniform_in(-1, 1))
            for j in (1, 2, 3):
                lhs = sigma_eval("sigma", z + 2 * lat.omega(j), lat)
                rhs = -cmath.exp(2 * lat.eta(j) * (z + lat.omega(j))) * sigma_eval("sigma", z, lat)
                assert rel_err(lhs, rhs) < 1e-10


def test_sigma_square_quasi_periodicity(lattices):
    rng = Lcg(13)
    for lat in lattices:
        for _ in range(8):
            z = complex(rng.uniform_in(-1, 1), rng.uniform_in(-1, 1))
            for j in (1, 2, 3):
                mult = cmath.exp(4 * lat.eta(j) * z + 4 * lat.eta(j) * lat.omega(j))
                for k in (1, 2, 3):
                    lhs = sigma_eval(f"sigma{k}", z + 2 * lat.omega(j), lat) ** 2
                    rhs = mult * sigma_eval(f"sigma{k}", z, lat) ** 2
                    assert rel_err(lhs, rhs) < 1e-10


def test_aux_consistency(lattices):
    rng = Lcg(19)
    for lat in lattices:
        assert sigma_aux_consistency(1, 0, lat) < 1e-14
        z = 0.2 * lat.omega1 + 0.1 * lat.omega3
        assert sigma_aux_consistency(1, z, lat) < 1e-9
        for _ in range(8):
            zz = rng.uniform_in(0.05, 0.45) * lat.omega1 + rng.uniform_in(0.05, 0.45) * lat.omega3
            for j in (1, 2, 3):
                assert sigma_aux_consistency(j, zz, lat) < 1e-9


def test_aux_consistency_degenerate_guard(lat_square):
    from qpverify.errors import DegenerateEvalError

    # z = omega_1 puts sigma(omega_1 - z) = sigma(0) = 0 in a denominator role
    with pytest.raises(DegenerateEvalError):
        sigma_aux_consistency(1, lat_square.omega1, lat_square)


def test_sigma_j_even(lattices):
    rng = Lcg(29)
    for lat in lattices:
        for _ in range(8):
            z = rng.uniform_in(0.1, 0.6) * lat.omega1 + rng.uniform_in(0.1, 0.6) * lat.omega3
            for j in (1, 2, 3):
                a = sigma_eval(f"sigma{j}", z, lat)
                b = sigma_eval(f"sigma{j}", -z, lat)
                assert rel_err(a, b) < 1e-12


def test_exponent_safety_and_overflow(lat_square):
    # several periods out is fine thanks to combined exponents
    z = 6 * 2 * lat_square.omega1 + 5 * 2 * lat_square.omega3
    v = sigma_eval("sigma", z + 0.3, lat_square)
    assert cmath.isfinite(v)
    with pytest.raises(EvalOverflowError):
        sigma_eval("sigma", 60 * lat_square.omega1, lat_square)
