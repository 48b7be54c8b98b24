"""Exact coefficient arithmetic: Gaussian rationals and formal linear forms.

Everything symbolic in the package (multiplier inference, zero counting,
cancellation checks) runs over these types; floating point only enters when a
form is finally evaluated against a concrete lattice.

Monomial conventions for exponent forms (`ExpLin`):

* a monomial is a pair ``(left, right)`` standing for the product of the two
  symbols, e.g. ``('eta1', 'w3')`` is eta1*omega3 and ``('i', 'z')`` is i*z;
* ``left`` is one of ``'i'``, ``'eta1'``, ``'eta3'`` (eta2 is eliminated on
  entry via eta2 = -eta1 - eta3);
* ``right`` is a declared symbol, a half-period token (``w1``/``w3``; ``w2``
  is eliminated via w2 = -w1 - w3), ``pi``, ``pitau``, or ``'1'``;
* the Legendre relation eta1*w3 - eta3*w1 = i*pi/2 is applied as the rewrite
  eta3*w1 -> eta1*w3 - (1/2) i*pi, so ``('eta3', 'w1')`` never survives
  normalization.

A ``UnitExp`` is a unit scalar (fourth root of unity times a rational) times
e^(form); folding moves integer multiples of i*pi/2 from the form into the
unit, which makes multipliers comparable modulo 2*pi*i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

Rat = Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class QQi:
    """Gaussian rational re + im*i with exact Fraction parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re=0, im=0) -> "QQi":
        return QQi(_frac(re), _frac(im))

    def __add__(self, other: "QQi") -> "QQi":
        return QQi(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "QQi") -> "QQi":
        return QQi(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "QQi") -> "QQi":
        return QQi(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "QQi":
        return QQi(-self.re, -self.im)

    def inverse(self) -> "QQi":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of 0 Gaussian rational")
        return QQi(self.re / n, -self.im / n)

    def __truediv__(self, other: "QQi") -> "QQi":
        return self * other.inverse()

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{_imag_str(abs(self.im))})"


def _imag_str(im: Fraction) -> str:
    if im.denominator == 1:
        head = "" if abs(im.numerator) == 1 else str(abs(im.numerator))
        return f"-{head}i" if im < 0 else f"{head}i"
    num = abs(im.numerator)
    body = f"i/{im.denominator}" if num == 1 else f"{num}i/{im.denominator}"
    return f"-{body}" if im < 0 else body


QQI_ZERO = QQi.of(0)
QQI_ONE = QQi.of(1)
QQI_I = QQi.of(0, 1)
# i^k for k mod 4
_I_POWERS = (QQI_ONE, QQI_I, QQi.of(-1), QQi.of(0, -1))


def i_power(k: int) -> QQi:
    return _I_POWERS[k % 4]


@dataclass(frozen=True)
class LinForm:
    """Exact Q-linear form over string symbols (no constant part)."""

    coeffs: tuple[tuple[str, Fraction], ...]

    @staticmethod
    def make(items: Mapping[str, Fraction] | Iterable[tuple[str, Fraction]]) -> "LinForm":
        acc: dict[str, Fraction] = {}
        pairs = items.items() if isinstance(items, Mapping) else items
        for sym, c in pairs:
            c = _frac(c)
            if c == 0:
                continue
            acc[sym] = acc.get(sym, Fraction(0)) + c
        return LinForm(tuple(sorted((s, c) for s, c in acc.items() if c != 0)))

    @staticmethod
    def symbol(sym: str, c=1) -> "LinForm":
        return LinForm.make({sym: _frac(c)})

    @staticmethod
    def zero() -> "LinForm":
        return LinForm(())

    def coeff(self, sym: str) -> Fraction:
        for s, c in self.coeffs:
            if s == sym:
                return c
        return Fraction(0)

    def __add__(self, other: "LinForm") -> "LinForm":
        return LinForm.make(list(self.coeffs) + list(other.coeffs))

    def __sub__(self, other: "LinForm") -> "LinForm":
        return self + (-other)

    def __neg__(self) -> "LinForm":
        return LinForm(tuple((s, -c) for s, c in self.coeffs))

    def scale(self, k) -> "LinForm":
        k = _frac(k)
        if k == 0:
            return LinForm.zero()
        return LinForm(tuple((s, c * k) for s, c in self.coeffs))

    def subs(self, mapping: Mapping[str, "LinForm"]) -> "LinForm":
        out: list[tuple[str, Fraction]] = []
        for s, c in self.coeffs:
            if s in mapping:
                out.extend((s2, c * c2) for s2, c2 in mapping[s].coeffs)
            else:
                out.append((s, c))
        return LinForm.make(out)

    def drop(self, syms: set[str]) -> "LinForm":
        return LinForm(tuple((s, c) for s, c in self.coeffs if s not in syms))

    def restrict(self, syms: set[str]) -> "LinForm":
        return LinForm(tuple((s, c) for s, c in self.coeffs if s in syms))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def symbols(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.coeffs)

    def leading(self, order: Callable[[str], object] = lambda s: s) -> tuple[str, Fraction] | None:
        """Symbol/coefficient pair minimal under `order` (lexicographic default)."""
        if not self.coeffs:
            return None
        return min(self.coeffs, key=lambda sc: order(sc[0]))

    def value(self, env: Mapping[str, complex]) -> complex:
        total = 0j
        for s, c in self.coeffs:
            total += float(c) * env[s]
        return total

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for s, c in self.coeffs:
            parts.append(_coeff_sym_str(c, s, first=not parts))
        return "".join(parts)


def _coeff_sym_str(c: Fraction, sym: str, first: bool) -> str:
    sign = "-" if c < 0 else ("" if first else "+")
    c = abs(c)
    if c == 1:
        body = sym
    elif c.denominator == 1:
        body = f"{c.numerator}*{sym}"
    elif c.numerator == 1:
        body = f"{sym}/{c.denominator}"
    else:
        body = f"{c.numerator}*{sym}/{c.denominator}"
    return sign + body


Mono = tuple[str, str]

_ETA2_EXPANSION = (("eta1", Fraction(-1)), ("eta3", Fraction(-1)))
_W2_EXPANSION = (("w1", Fraction(-1)), ("w3", Fraction(-1)))


def _normalize_mono(left: str, right: str, c: Fraction) -> list[tuple[Mono, Fraction]]:
    """Expand eta2/w2 and apply the Legendre rewrite eta3*w1 -> eta1*w3 - i*pi/2."""
    lefts = _ETA2_EXPANSION if left == "eta2" else ((left, Fraction(1)),)
    rights = _W2_EXPANSION if right == "w2" else ((right, Fraction(1)),)
    out: list[tuple[Mono, Fraction]] = []
    for l, cl in lefts:
        for r, cr in rights:
            cc = c * cl * cr
            if l == "eta3" and r == "w1":
                out.append((("eta1", "w3"), cc))
                out.append((("i", "pi"), -cc / 2))
            else:
                out.append(((l, r), cc))
    return out


@dataclass(frozen=True)
class ExpLin:
    """Exact linear form over (left, right) monomials, in normal form."""

    coeffs: tuple[tuple[Mono, Fraction], ...]

    @staticmethod
    def make(items: Iterable[tuple[Mono, Fraction]]) -> "ExpLin":
        acc: dict[Mono, Fraction] = {}
        for (left, right), c in items:
            for mono, cc in _normalize_mono(left, right, _frac(c)):
                acc[mono] = acc.get(mono, Fraction(0)) + cc
        return ExpLin(tuple(sorted((m, c) for m, c in acc.items() if c != 0)))

    @staticmethod
    def zero() -> "ExpLin":
        return ExpLin(())

    @staticmethod
    def times(left: str, arg: LinForm, scale=1) -> "ExpLin":
        """scale * left * arg, e.g. times('eta1', z+a, 2) = 2*eta1*z + 2*eta1*a."""
        k = _frac(scale)
        return ExpLin.make([((left, s), c * k) for s, c in arg.coeffs])

    @staticmethod
    def mono(left: str, right: str, c=1) -> "ExpLin":
        return ExpLin.make([((left, right), _frac(c))])

    def coeff(self, mono: Mono) -> Fraction:
        for m, c in self.coeffs:
            if m == mono:
                return c
        return Fraction(0)

    def __add__(self, other: "ExpLin") -> "ExpLin":
        return ExpLin.make(list(self.coeffs) + list(other.coeffs))

    def __sub__(self, other: "ExpLin") -> "ExpLin":
        return self + (-other)

    def __neg__(self) -> "ExpLin":
        return ExpLin(tuple((m, -c) for m, c in self.coeffs))

    def scale(self, k) -> "ExpLin":
        k = _frac(k)
        if k == 0:
            return ExpLin.zero()
        return ExpLin(tuple((m, c * k) for m, c in self.coeffs))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def split(self, pred: Callable[[Mono], bool]) -> tuple["ExpLin", "ExpLin"]:
        hit = tuple((m, c) for m, c in self.coeffs if pred(m))
        miss = tuple((m, c) for m, c in self.coeffs if not pred(m))
        return ExpLin(hit), ExpLin(miss)

    def replace(self, mono: Mono, c: Fraction) -> "ExpLin":
        rest = tuple((m, cc) for m, cc in self.coeffs if m != mono)
        if c != 0:
            rest = tuple(sorted(rest + ((mono, c),)))
        return ExpLin(rest)

    def value(self, left_env: Mapping[str, complex], right_env: Mapping[str, complex]) -> complex:
        total = 0j
        for (l, r), c in self.coeffs:
            total += float(c) * left_env[l] * right_env[r]
        return total

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for (l, r), c in self.coeffs:
            sym = l if r == "1" else (r if l == "1" else f"{l}*{r}")
            parts.append(_coeff_sym_str(c, sym, first=not parts))
        return "".join(parts)


@dataclass(frozen=True)
class UnitExp:
    """unit * e^(exp), with i*pi half-integer multiples folded into the unit."""

    unit: QQi
    exp: ExpLin

    @staticmethod
    def identity() -> "UnitExp":
        return UnitExp(QQI_ONE, ExpLin.zero())

    @staticmethod
    def of(unit: QQi = QQI_ONE, exp: ExpLin | None = None) -> "UnitExp":
        return UnitExp(unit, exp if exp is not None else ExpLin.zero()).folded()

    def folded(self) -> "UnitExp":
        """Move integer multiples of i*pi/2 in exp into the unit scalar."""
        c = self.exp.coeff(("i", "pi"))
        if c == 0:
            return self
        halves = math.floor(c / Fraction(1, 2))
        rem = c - Fraction(halves, 2)
        if halves == 0:
            return self
        return UnitExp(self.unit * i_power(halves), self.exp.replace(("i", "pi"), rem))

    def __mul__(self, other: "UnitExp") -> "UnitExp":
        return UnitExp(self.unit * other.unit, self.exp + other.exp).folded()

    def inverse(self) -> "UnitExp":
        return UnitExp(self.unit.inverse(), -self.exp).folded()

    @property
    def is_zero(self) -> bool:
        return self.unit.is_zero

    def value(self, left_env: Mapping[str, complex], right_env: Mapping[str, complex]) -> complex:
        from cmath import exp as cexp

        return complex(self.unit) * cexp(self.exp.value(left_env, right_env))

    def __str__(self) -> str:
        if self.exp.is_zero:
            return str(self.unit)
        core = f"e^({self.exp})"
        if self.unit == QQI_ONE:
            return core
        return f"{self.unit}*{core}"


UNIT_EXP_ONE = UnitExp.identity()
