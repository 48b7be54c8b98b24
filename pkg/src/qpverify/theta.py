"""Jacobi theta functions with exact quasi-period argument reduction.

Conventions (fixed throughout the package):

* nome q = e^(i*pi*tau) with tau in the upper half-plane -- NOT the
  q = e^(2*pi*i*tau) convention used in parts of the literature;
* theta1(z) = -i * sum_n (-1)^n q^((n+1/2)^2) e^((2n+1)iz)
* theta2(z) =      sum_n        q^((n+1/2)^2) e^((2n+1)iz)
* theta3(z) =      sum_n        q^(n^2)       e^(2niz)
* theta4(z) =      sum_n (-1)^n q^(n^2)       e^(2niz)

Fractional q powers always mean q^s := e^(i*pi*tau*s).

Evaluation domain: Im(tau) >= 0.05.  Below Im(tau) = 0.3 the kernel still
runs but accuracy degrades with the slowly decaying nome (the verifier
reports such contexts as inconclusive); there is no modular tau-reduction.

The quasi-periodicity ladder

    theta_k(z0 + j*pi + k*pi*tau) = sign * e^(-k^2*i*pi*tau - 2k*i*z0) * theta_k(z0)

is tracked with exact integer/rational bookkeeping (`ExactMultiplier`), so
repeated reductions accumulate no rounding in the multiplier itself.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, EvalOverflowError
from .exact import QQI_I, QQI_ONE, QQi, i_power

MIN_IM_TAU = 0.05
ACCURATE_IM_TAU = 0.3  # documented warning band below this
SERIES_EPS = 1e-18
_MAX_TERMS = 2000
_EXP_LIMIT = 700.0  # ln of largest representable double, with margin

THETA_KINDS = (1, 2, 3, 4)

HALF_PI = "pi/2"
HALF_PITAU = "pitau/2"
HALF_BOTH = "pi/2+pitau/2"
HALF_SHIFTS = (HALF_PI, HALF_PITAU, HALF_BOTH)


@dataclass(frozen=True)
class TauNome:
    """Validated tau in the upper half-plane together with its nome."""

    tau: complex
    q: complex

    @staticmethod
    def from_tau(tau: complex) -> "TauNome":
        tau = complex(tau)
        if not (tau.imag > 0):
            raise DomainError(f"tau={tau} must lie in the upper half-plane")
        if tau.imag < MIN_IM_TAU:
            raise DomainError(
                f"Im(tau)={tau.imag} below the supported bound {MIN_IM_TAU}; "
                "tau-reduction is out of scope"
            )
        return TauNome(tau, cmath.exp(1j * math.pi * tau))

    @property
    def low_accuracy(self) -> bool:
        return self.tau.imag < ACCURATE_IM_TAU


@dataclass(frozen=True)
class ExactMultiplier:
    """sign * e^(c_pi*i*pi + c_tau*i*pi*tau + c_z*i*z) with exact coefficients.

    `z` refers to the (reduced) argument the multiplier is paired with.
    Composition multiplies signs and adds exponents exactly.
    """

    sign: QQi
    c_pi: Fraction
    c_tau: Fraction
    c_z: Fraction

    @staticmethod
    def identity() -> "ExactMultiplier":
        return ExactMultiplier(QQI_ONE, Fraction(0), Fraction(0), Fraction(0))

    def compose(self, other: "ExactMultiplier") -> "ExactMultiplier":
        return ExactMultiplier(
            self.sign * other.sign,
            self.c_pi + other.c_pi,
            self.c_tau + other.c_tau,
            self.c_z + other.c_z,
        )

    def exponent(self, z: complex, tn: TauNome) -> complex:
        return (
            1j * math.pi * float(self.c_pi)
            + 1j * math.pi * tn.tau * float(self.c_tau)
            + 1j * z * float(self.c_z)
        )

    def value(self, z: complex, tn: TauNome) -> complex:
        e = self.exponent(z, tn)
        if abs(e.real) > _EXP_LIMIT:
            raise EvalOverflowError(f"multiplier exponent {e.real:.1f} overflows double range")
        return complex(self.sign) * cmath.exp(e)


def _check_finite(value: complex, what: str) -> complex:
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise EvalOverflowError(f"{what} overflowed double precision")
    return value


def theta_series(kind: int, z: complex, tn: TauNome, pad: int = 0) -> complex:
    """Raw defining series, summed symmetrically without argument reduction.

    Truncation: terms are added in pairs (n, -n) resp. (n, -n-1) until the
    Gaussian tail bound |q|^((n+1/2)^2) drops below 1e-18 times the running
    maximum term, plus `pad` extra pairs (the stability tests use `pad`).
    Intended for reduced arguments; for large |Im z| this is the caller's
    slow-but-honest oracle and may overflow.
    """
    if kind not in THETA_KINDS:
        raise DomainError(f"theta kind must be 1..4, got {kind}")
    q = tn.q
    absq = abs(q)
    log_absq = math.log(absq)
    u = cmath.exp(1j * z)

    if kind in (3, 4):
        w = u * u  # e^(2iz)
        winv = 1 / w
        acc = 1 + 0j
        runmax = 1.0
        qpow = 1 + 0j  # q^(n^2)
        qstep = q  # q^(2n-1) at next n
        wp, wm = 1 + 0j, 1 + 0j
        extra = pad
        n = 0
        while True:
            n += 1
            if n > _MAX_TERMS:
                raise EvalOverflowError(
                    f"theta{kind} series did not converge within {_MAX_TERMS} terms"
                )
            qpow *= qstep
            qstep *= q * q
            wp *= w
            wm *= winv
            pair = qpow * (wp + wm)
            if kind == 4 and n % 2 == 1:
                pair = -pair
            acc += pair
            mag = abs(pair)
            runmax = max(runmax, mag)
            tail = math.exp(((n + 1.5) ** 2) * log_absq)
            if tail < SERIES_EPS * runmax and mag < SERIES_EPS * runmax:
                if extra <= 0:
                    break
                extra -= 1
        return _check_finite(acc, f"theta{kind} series")

    # kinds 1 and 2: half-integer exponents, q^((n+1/2)^2) = q4 * q^(n(n+1))
    q4 = cmath.exp(1j * math.pi * tn.tau / 4)
    acc = 0j
    runmax = 0.0
    qpow = 1 + 0j  # q^(n(n+1))
    upow = u  # e^((2n+1)iz)
    uinv = 1 / u
    uneg = uinv  # e^(-(2n+1)iz)
    extra = pad
    n = 0
    while True:
        if n > _MAX_TERMS:
            raise EvalOverflowError(
                f"theta{kind} series did not converge within {_MAX_TERMS} terms"
            )
        if kind == 1:
            pair = qpow * (upow - uneg) * (-1j)
            if n % 2 == 1:
                pair = -pair
        else:
            pair = qpow * (upow + uneg)
        acc += pair
        mag = abs(pair)
        runmax = max(runmax, mag, 1e-300)
        tail = math.exp(((n + 1.5) ** 2) * log_absq)
        if n >= 1 and tail < SERIES_EPS * runmax and mag < SERIES_EPS * runmax:
            if extra <= 0:
                break
            extra -= 1
        qpow *= q ** (2 * n + 2)
        upow *= u * u
        uneg *= uinv * uinv
        n += 1
    return _check_finite(q4 * acc, f"theta{kind} series")


def _lemma1_sign(kind: int, j: int, k: int) -> QQi:
    if kind == 1:
        s = j + k
    elif kind == 2:
        s = j
    elif kind == 4:
        s = k
    else:
        s = 0
    return i_power(2 * s)  # (-1)^s


def lemma1_multiplier(kind: int, j: int, k: int) -> ExactMultiplier:
    """Exact multiplier m with theta_kind(z + j*pi + k*pi*tau) = m.value(z) * theta_kind(z)."""
    return ExactMultiplier(
        _lemma1_sign(kind, j, k), Fraction(0), Fraction(-k * k), Fraction(-2 * k)
    )


def reduce_argument(kind: int, z: complex, tn: TauNome) -> tuple[complex, ExactMultiplier]:
    """Split z = z0 + j*pi + k*pi*tau with |Re z0| <= pi/2, |Im z0| <= pi*Im(tau)/2.

    Returns (z0, m) with theta_kind(z) = m.value(z0) * theta_kind(z0); the
    integers j, k are tracked exactly so repeated reduction cannot drift.
    """
    if kind not in THETA_KINDS:
        raise DomainError(f"theta kind must be 1..4, got {kind}")
    z = complex(z)
    k = round(z.imag / (math.pi * tn.tau.imag))
    z1 = z - k * math.pi * tn.tau
    j = round(z1.real / math.pi)
    z0 = z1 - j * math.pi
    return z0, lemma1_multiplier(kind, j, k)


def theta_eval(kind: int, z: complex, tn: TauNome) -> complex:
    """theta_kind(z, tau) after exact argument reduction."""
    z0, m = reduce_argument(kind, z, tn)
    return m.value(z0, tn) * theta_series(kind, z0, tn)


@dataclass(frozen=True)
class Nullwerte:
    theta2: complex
    theta3: complex
    theta4: complex
    theta1_prime: complex


def _theta1_deriv_series(tn: TauNome, power: int) -> complex:
    """Term-wise z-derivatives of theta1 at 0: sum of (2n+1)^power coefficients.

    power=1 gives theta1'(0) = 2 sum (-1)^n (2n+1) q^((n+1/2)^2);
    power=3 gives -theta1'''(0) up to sign handled by the caller.
    """
    q = tn.q
    log_absq = math.log(abs(q))
    q4 = cmath.exp(1j * math.pi * tn.tau / 4)
    acc = 0j
    runmax = 0.0
    qpow = 1 + 0j
    n = 0
    while n < _MAX_TERMS:
        term = qpow * (2 * n + 1) ** power
        if n % 2 == 1:
            term = -term
        acc += term
        mag = abs(term)
        runmax = max(runmax, mag, 1e-300)
        tail = math.exp(((n + 1.5) ** 2) * log_absq)
        if n >= 1 and tail < SERIES_EPS * runmax and mag < SERIES_EPS * runmax:
            break
        qpow *= q ** (2 * n + 2)
        n += 1
    return 2 * q4 * acc


def theta1_prime0(tn: TauNome) -> complex:
    return _theta1_deriv_series(tn, 1)


def theta1_triple_prime0(tn: TauNome) -> complex:
    return -_theta1_deriv_series(tn, 3)


def theta_nullwerte(tn: TauNome) -> Nullwerte:
    """(theta2, theta3, theta4, theta1') at z = 0."""
    return Nullwerte(
        theta_series(2, 0j, tn),
        theta_series(3, 0j, tn),
        theta_series(4, 0j, tn),
        theta1_prime0(tn),
    )


# theta_kind(z + shift) = sign * q^(c_tau) * e^(c_z*i*z) * theta_newkind(z),
# inverted from the classical half-period transformation table.
_MQ = Fraction(-1, 4)
_HALF_PERIOD_TABLE: dict[tuple[int, str], tuple[int, QQi, Fraction, Fraction]] = {
    (1, HALF_PI): (2, QQI_ONE, Fraction(0), Fraction(0)),
    (2, HALF_PI): (1, -QQI_ONE, Fraction(0), Fraction(0)),
    (3, HALF_PI): (4, QQI_ONE, Fraction(0), Fraction(0)),
    (4, HALF_PI): (3, QQI_ONE, Fraction(0), Fraction(0)),
    (1, HALF_PITAU): (4, QQI_I, _MQ, Fraction(-1)),
    (2, HALF_PITAU): (3, QQI_ONE, _MQ, Fraction(-1)),
    (3, HALF_PITAU): (2, QQI_ONE, _MQ, Fraction(-1)),
    (4, HALF_PITAU): (1, QQI_I, _MQ, Fraction(-1)),
    (1, HALF_BOTH): (3, QQI_ONE, _MQ, Fraction(-1)),
    (2, HALF_BOTH): (4, -QQI_I, _MQ, Fraction(-1)),
    (3, HALF_BOTH): (1, QQI_I, _MQ, Fraction(-1)),
    (4, HALF_BOTH): (2, QQI_ONE, _MQ, Fraction(-1)),
}


def half_period_rewrite(kind: int, shift: str) -> tuple[int, ExactMultiplier]:
    """Rewrite theta_kind(z + shift) as m.value(z) * theta_newkind(z), exactly.

    `shift` is one of 'pi/2', 'pitau/2', 'pi/2+pitau/2'.
    """
    try:
        new_kind, sign, c_tau, c_z = _HALF_PERIOD_TABLE[(kind, shift)]
    except KeyError:
        raise DomainError(f"unsupported half-period rewrite ({kind}, {shift!r})") from None
    return new_kind, ExactMultiplier(sign, Fraction(0), c_tau, c_z)
