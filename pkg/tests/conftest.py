import cmath
import math

import pytest

from qpverify import lattice_new


def theta_oracle(kind: int, z: complex, tau: complex) -> complex:
    """Brute-force defining series, independent of the package internals.

    Sums n = -80..80 directly with per-term exponentials; more than enough
    terms for Im(tau) >= 0.3 and |Im z| of a few periods.
    """
    q = cmath.exp(1j * math.pi * tau)
    total = 0j
    for n in range(-80, 81):
        if kind == 1:
            total += (-1) ** n * q ** ((n + 0.5) ** 2) * cmath.exp((2 * n + 1) * 1j * z)
        elif kind == 2:
            total += q ** ((n + 0.5) ** 2) * cmath.exp((2 * n + 1) * 1j * z)
        elif kind == 3:
            total += q ** (n * n) * cmath.exp(2 * n * 1j * z)
        else:
            total += (-1) ** n * q ** (n * n) * cmath.exp(2 * n * 1j * z)
    if kind == 1:
        total *= -1j
    return total


def rel_err(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@pytest.fixture(scope="session")
def lattices():
    return [
        lattice_new(math.pi / 2, 1j * math.pi / 2),
        lattice_new(1.0, 0.3 + 0.9j),
        lattice_new(1 + 0.2j, -0.4 + 1.1j),
    ]


@pytest.fixture(scope="session")
def lat_square(lattices):
    return lattices[0]


TAUS = (1j, 0.3 + 0.8j, -0.4 + 1.1j)
