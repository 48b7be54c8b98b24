"""Weierstrass sigma and auxiliary sigma functions.

Production evaluation routes through the theta kernel:

    sigma(z)  = (2*omega1 / (pi*theta1'(0))) * e^(eta1*z^2/(2*omega1)) * theta1(u)
    sigma1(z) = e^(eta1*z^2/(2*omega1)) * theta2(u) / theta2(0)
    sigma2(z) = e^(eta1*z^2/(2*omega1)) * theta3(u) / theta3(0)
    sigma3(z) = e^(eta1*z^2/(2*omega1)) * theta4(u) / theta4(0)

with u = pi*z/(2*omega1).  The sigma_j <-> theta pairing is fixed by the
zero structure: sigma_j vanishes exactly on omega_j + lattice, and
u(omega1) = pi/2, u(omega2) = -(pi + pi*tau)/2, u(omega3) = pi*tau/2 are the
zero classes of theta2, theta3, theta4 respectively.

The quadratic prefactor exponent and the theta reduction exponent are
combined before a single exponentiation, so moderate multi-period arguments
evaluate without intermediate overflow.

The defining lattice product is kept as a slow independent oracle
(`sigma_product_oracle`), including the product route to the eta constants
used by the non-circular Legendre check.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import DegenerateEvalError, DomainError, EvalOverflowError
from .lattice import Lattice
from .theta import reduce_argument, theta_series

SIGMA_KINDS = ("sigma", "sigma1", "sigma2", "sigma3")

# sigma_j evaluates through theta_{pairing[j]}; see the zero-structure note above.
_THETA_FOR_SIGMA = {"sigma": 1, "sigma1": 2, "sigma2": 3, "sigma3": 4}

_EXP_LIMIT = 700.0


def sigma_eval(kind: str, z: complex, lat: Lattice) -> complex:
    """Evaluate sigma / sigma_1 / sigma_2 / sigma_3 at z for the given lattice."""
    if kind not in _THETA_FOR_SIGMA:
        raise DomainError(f"unknown sigma kind {kind!r}")
    z = complex(z)
    tk = _THETA_FOR_SIGMA[kind]
    u = math.pi * z / (2 * lat.omega1)
    u0, m = reduce_argument(tk, u, lat.tn)
    exponent = lat.eta1 * z * z / (2 * lat.omega1) + m.exponent(u0, lat.tn)
    if abs(exponent.real) > _EXP_LIMIT:
        raise EvalOverflowError(
            f"sigma prefactor exponent {exponent.real:.1f} exceeds the double range"
        )
    nw = lat.nullwerte
    if kind == "sigma":
        front = 2 * lat.omega1 / (math.pi * nw.theta1_prime)
    elif kind == "sigma1":
        front = 1 / nw.theta2
    elif kind == "sigma2":
        front = 1 / nw.theta3
    else:
        front = 1 / nw.theta4
    return front * complex(m.sign) * cmath.exp(exponent) * theta_series(tk, u0, lat.tn)


def sigma_product_oracle(z: complex, lat: Lattice, shell_cutoff: int) -> complex:
    """Truncated defining product of sigma over |n|, |m| <= shell_cutoff.

    Each lattice point w = 2n*omega1 + 2m*omega3 contributes
    exp(z/w + z^2/(2w^2)) * (1 - z/w).  Convergence of the truncation is
    O(shell_cutoff^-2)-ish on the centered cell; this is a test oracle, not
    a production evaluator.
    """
    if shell_cutoff < 10:
        raise DomainError("shell_cutoff must be >= 10")
    z = complex(z)
    if z == 0:
        return 0j
    rng = np.arange(-shell_cutoff, shell_cutoff + 1)
    n, m = np.meshgrid(rng, rng, indexing="ij")
    w = 2 * lat.omega1 * n + 2 * lat.omega3 * m
    w = w[(n != 0) | (m != 0)]
    x = z / w
    # exp(sum of logs) equals the finite product regardless of log branches
    log_terms = x + 0.5 * x * x + np.log1p(-x)
    return z * complex(np.exp(np.sum(log_terms)))


def eta_product_oracle(lat: Lattice, j: int, shell_cutoff: int = 60, step: float = 1e-5) -> complex:
    """eta_j = sigma'(omega_j)/sigma(omega_j) from the truncated product.

    Central difference with step `step`*|omega1|; independent of the
    theta-derivative route used by `lattice_new`, so it breaks the
    circularity of the built-in Legendre relation.
    """
    w = lat.omega(j)
    h = step * abs(lat.omega1)
    s0 = sigma_product_oracle(w, lat, shell_cutoff)
    sp = sigma_product_oracle(w + h, lat, shell_cutoff)
    sm = sigma_product_oracle(w - h, lat, shell_cutoff)
    if abs(s0) < 1e-300:
        raise DegenerateEvalError(f"sigma product vanished at omega_{j}")
    return (sp - sm) / (2 * h * s0)


_DEGENERACY = 1e-8


def sigma_aux_consistency(j: int, z: complex, lat: Lattice) -> float:
    """Max pairwise relative difference between the three sigma_j routes.

    Routes: e^(eta_j z) sigma(omega_j - z)/sigma(omega_j),
            e^(-eta_j z) sigma(omega_j + z)/sigma(omega_j),
            sigma_eval(sigma_j, z).
    """
    if j not in (1, 2, 3):
        raise DomainError(f"sigma_j index must be 1..3, got {j}")
    wj = lat.omega(j)
    ej = lat.eta(j)
    s_wj = sigma_eval("sigma", wj, lat)
    s_minus = sigma_eval("sigma", wj - z, lat)
    s_plus = sigma_eval("sigma", wj + z, lat)
    direct = sigma_eval(f"sigma{j}", z, lat)
    scale = max(abs(s_minus), abs(s_plus), abs(direct) * abs(s_wj))
    if abs(s_wj) < _DEGENERACY * max(scale, 1e-300):
        raise DegenerateEvalError("sigma(omega_j) numerically degenerate")
    if min(abs(s_minus), abs(s_plus)) < _DEGENERACY * abs(s_wj):
        raise DegenerateEvalError(
            "z lies too close to a zero of sigma(omega_j -+ z); the ratio check is meaningless there"
        )
    v1 = cmath.exp(ej * z) * s_minus / s_wj
    v2 = cmath.exp(-ej * z) * s_plus / s_wj
    ref = max(abs(v1), abs(v2), abs(direct))
    return max(abs(v1 - v2), abs(v1 - direct), abs(v2 - direct)) / ref
