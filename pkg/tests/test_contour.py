import math

import pytest

from qpverify import (
    Parallelogram,
    TauNome,
    WindingOptions,
    choose_admissible_base,
    locate_zeros,
    sigma_eval,
    theta_eval,
    winding_count,
)
from qpverify.errors import (
    BoundaryZeroError,
    BudgetExceededError,
    DomainError,
    NoAdmissibleBaseError,
)


def fundamental_cell(lat, offset=0.11 + 0.07j):
    return Parallelogram(-lat.omega1 - lat.omega3 + offset, 2 * lat.omega1, 2 * lat.omega3)


def test_orientation_validated():
    with pytest.raises(DomainError):
        Parallelogram(0, 1 + 0j, -1j)


def test_constant_has_winding_zero():
    cert = winding_count(lambda z: 1 + 0j, Parallelogram(-1 - 1j, 2 + 0j, 2j))
    assert cert.winding == 0
    assert cert.max_phase_step == 0.0


def test_sigma_fundamental_cell(lat_square):
    cert = winding_count(lambda z: sigma_eval("sigma", z, lat_square), fundamental_cell(lat_square))
    assert cert.winding == 1
    assert cert.max_phase_step < math.pi / 2


def test_theta1_cell():
    tn = TauNome.from_tau(1j)
    f = lambda z: theta_eval(1, z, tn)
    base = choose_admissible_base(f, math.pi + 0j, math.pi * 1j, seed=7)
    cert = winding_count(f, Parallelogram(base, math.pi + 0j, math.pi * 1j))
    assert cert.winding == 1


def test_pair_product_counts_two(lat_square):
    a = 0.3 * lat_square.omega1 + 0.2 * lat_square.omega3
    f = lambda z: sigma_eval("sigma", z + a, lat_square) * sigma_eval("sigma", z - a, lat_square)
    cert = winding_count(f, fundamental_cell(lat_square))
    assert cert.winding == 2


def test_translation_invariance(lat_square):
    f = lambda z: sigma_eval("sigma", z, lat_square)
    p = fundamental_cell(lat_square)
    shifted = Parallelogram(p.base + p.gen1, p.gen1, p.gen2)
    assert winding_count(f, p).winding == winding_count(f, shifted).winding


def test_boundary_zero_detected(lat_square):
    f = lambda z: sigma_eval("sigma", z, lat_square)
    # first edge runs from -omega1 to +omega1 straight through the zero at 0
    through_origin = Parallelogram(-lat_square.omega1, 2 * lat_square.omega1, 2 * lat_square.omega3)
    with pytest.raises(BoundaryZeroError):
        winding_count(f, through_origin)


def test_budget_exceeded(lat_square):
    f = lambda z: sigma_eval("sigma", z, lat_square)
    with pytest.raises(BudgetExceededError):
        winding_count(f, fundamental_cell(lat_square), WindingOptions(init_samples=256, max_samples=100))


def test_determinism(lat_square):
    f = lambda z: sigma_eval("sigma", z, lat_square)
    p = fundamental_cell(lat_square)
    assert winding_count(f, p) == winding_count(f, p)
    b1 = choose_admissible_base(f, p.gen1, p.gen2, seed=9)
    b2 = choose_admissible_base(f, p.gen1, p.gen2, seed=9)
    assert b1 == b2


def test_identically_zero_has_no_admissible_base():
    with pytest.raises(NoAdmissibleBaseError):
        choose_admissible_base(lambda z: 0j, 2 + 0j, 2j, seed=1)


def test_noise_below_floor_has_no_admissible_base():
    noise = lambda z: 1e-14 * (z + 1.7j)
    with pytest.raises(NoAdmissibleBaseError):
        choose_admissible_base(noise, 2 + 0j, 2j, seed=1, abs_floor=1e-9)


def test_locate_pair_zeros(lat_square):
    a = 0.3 * lat_square.omega1 + 0.2 * lat_square.omega3
    f = lambda z: sigma_eval("sigma", z + a, lat_square) * sigma_eval("sigma", z - a, lat_square)
    p = fundamental_cell(lat_square)
    zeros = locate_zeros(f, p, 2, 1e-8)
    assert [z.multiplicity for z in zeros] == [1, 1]
    dists = sorted(
        min(lat_square.lattice_distance(z.zero - a), lat_square.lattice_distance(z.zero + a))
        for z in zeros
    )
    cell_size = 2 * max(abs(lat_square.omega1), abs(lat_square.omega3))
    assert all(d * cell_size < 1e-8 for d in dists)


def test_locate_theta1_zero():
    tn = TauNome.from_tau(1j)
    f = lambda z: theta_eval(1, z, tn)
    base = choose_admissible_base(f, math.pi + 0j, math.pi * 1j, seed=7)
    zeros = locate_zeros(f, Parallelogram(base, math.pi + 0j, math.pi * 1j), 1, 1e-8)
    z = zeros[0].zero
    u, v = z.real / math.pi, z.imag / math.pi
    assert max(abs(u - round(u)), abs(v - round(v))) < 1e-8


def test_locate_sigma_j_zero(lat_square):
    for j in (1, 2, 3):
        f = lambda z, j=j: sigma_eval(f"sigma{j}", z, lat_square)
        base = choose_admissible_base(f, 2 * lat_square.omega1, 2 * lat_square.omega3, seed=3)
        zeros = locate_zeros(f, Parallelogram(base, 2 * lat_square.omega1, 2 * lat_square.omega3), 1, 1e-7)
        assert len(zeros) == 1
        d = lat_square.lattice_distance(zeros[0].zero - lat_square.omega(j))
        assert d < 1e-7


def test_locate_double_zero_multiplicity(lat_square):
    a = 0.27 * lat_square.omega1 + 0.18 * lat_square.omega3
    f = lambda z: sigma_eval("sigma", z - a, lat_square) ** 2
    base = choose_admissible_base(f, 2 * lat_square.omega1, 2 * lat_square.omega3, seed=6)
    cell = Parallelogram(base, 2 * lat_square.omega1, 2 * lat_square.omega3)
    assert winding_count(f, cell).winding == 2
    zeros = locate_zeros(f, cell, 2, 1e-6)
    assert sum(z.multiplicity for z in zeros) == 2
    # the confluent pair is reported as one multiplicity-2 zero at tol scale
    assert len(zeros) == 1
    assert lat_square.lattice_distance(zeros[0].zero - a) < 1e-5


def test_locate_zero_on_split_line(lat_square):
    """Zeros engineered onto default split fractions must still resolve."""
    g1, g2 = 2 * lat_square.omega1, 2 * lat_square.omega3
    base = -lat_square.omega1 - lat_square.omega3 + 0.0131 + 0.0147j
    cell = Parallelogram(base, g1, g2)
    for ux, vx in ((0.5, 0.5), (0.2500001, 0.500000001)):
        a = base + ux * g1 + vx * g2
        f = lambda z, a=a: sigma_eval("sigma", z - a, lat_square) ** 2
        zeros = locate_zeros(f, cell, 2, 1e-8)
        assert sum(z.multiplicity for z in zeros) == 2
        for z in zeros:
            assert abs(f(z.zero)) < 1e-6


def test_winding_matches_prediction_on_random_products(lattices):
    """Contour count == exact zero-count formula on randomized factor products."""
    from qpverify import eval_expr, expr_multiplier, parse, predicted_zero_count
    from qpverify.rng import Lcg

    lat = lattices[0]
    rng = Lcg(4242)
    sigma_pool = ["sigma(z+a)", "sigma(z-a)", "sigma(z+b)", "sigma(z-b)", "sigma1(z)", "sigma3(z)"]
    theta_pool = ["theta1(z+a)", "theta1(z-a)", "theta2(z)", "theta3(z+b)", "theta4(z-b)"]
    checked = 0
    for trial in range(10):
        theta_family = trial % 2 == 1
        pool = theta_pool if theta_family else sigma_pool
        count = 1 + int(rng.uniform() * 3)
        picks = [pool[int(rng.uniform() * len(pool))] for _ in range(count)]
        text = "*".join(picks)
        e = parse(text, variable="z", parameters=("a", "b"))
        gens = ("pi", "pitau") if theta_family else ("2w1", "2w3")
        m1 = expr_multiplier(e, "z", gens[0])
        m2 = expr_multiplier(e, "z", gens[1])
        predicted = predicted_zero_count(m1, m2, *gens)
        assert predicted.denominator == 1
        bindings = {
            "a": complex(rng.uniform_in(-0.4, 0.4), rng.uniform_in(-0.3, 0.3)),
            "b": complex(rng.uniform_in(-0.4, 0.4), rng.uniform_in(-0.3, 0.3)),
        }
        l1, l2 = (
            (math.pi + 0j, math.pi * lat.tau) if theta_family else (2 * lat.omega1, 2 * lat.omega3)
        )
        f = lambda z, e=e, b=bindings: eval_expr(e, {**b, "z": z}, lat).value
        base = choose_admissible_base(f, l1, l2, seed=100 + trial)
        cert = winding_count(f, Parallelogram(base, l1, l2))
        assert cert.winding == predicted.numerator, text
        checked += 1
    assert checked == 10
