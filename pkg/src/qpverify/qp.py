"""Quasi-periodicity algebra: exact multipliers and predicted zero counts.

The central computation: for an expression phi built from sigma/theta
factors and a lattice generator lambda, find the exact multiplier
(alpha, beta) with

    phi(z + lambda) = e^(alpha*z + beta) * phi(z)

and from a generator pair the exact zero count

    N = (alpha1*lambda2 - alpha2*lambda1) / (2*pi*i),

which the Legendre relation reduces to a rational number.

Everything here is exact: coefficients are Gaussian rationals over the
formal monomials {eta1, eta3, i} x {symbols, w1, w3, pi, pitau}; floating
point never enters the inference.  Shifting a factor's argument by full
periods applies the sigma/theta quasi-periodicity ladders; shifting a theta
argument by a half period rewrites the factor to another theta kind, which
is how terms of an expression permute under the shift (the fundamental
theta identity needs exactly this).  Term matching after the shift is
multiset matching on canonical factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .dsl import (
    Expr,
    Factor,
    Term,
    parity_normalize,
    print_expr,
    print_linform,
    require_single_family,
    substitute,
    symbol_sort_key,
)
from .errors import (
    DomainError,
    IrreducibleMonomialError,
    MultiplierMismatchError,
    NonPeriodShiftError,
)
from .exact import ExpLin, LinForm, QQI_ONE, QQi, UnitExp, i_power
from .lattice import Lattice
from .theta import HALF_BOTH, HALF_PI, HALF_PITAU, TauNome, half_period_rewrite

_W2_SUB = {"w2": LinForm.make({"w1": Fraction(-1), "w3": Fraction(-1)})}
_HALF = Fraction(1, 2)

GENERATOR_TOKENS = {
    "2w1": ("sigma", LinForm.make({"w1": Fraction(2)})),
    "2w3": ("sigma", LinForm.make({"w3": Fraction(2)})),
    "4w1": ("sigma", LinForm.make({"w1": Fraction(4)})),
    "4w3": ("sigma", LinForm.make({"w3": Fraction(4)})),
    "pi": ("theta", LinForm.make({"pi": Fraction(1)})),
    "pitau": ("theta", LinForm.make({"pitau": Fraction(1)})),
}


def generator_form(token: str) -> tuple[str, LinForm]:
    try:
        return GENERATOR_TOKENS[token]
    except KeyError:
        raise DomainError(
            f"unknown generator token {token!r}; expected one of {sorted(GENERATOR_TOKENS)}"
        ) from None


# --------------------------------------------------------- canonical factors

_SIGMA_INDEX = {"sigma1": 1, "sigma2": 2, "sigma3": 3}
_SIGMA_POINT_INDEX = {
    (("w1", Fraction(1)),): 1,
    (("w1", Fraction(1)), ("w3", Fraction(1))): 2,
    (("w3", Fraction(1)),): 3,
}

_ZERO = object()  # sentinel: the factor is identically zero
_ONE = object()  # sentinel: the factor collapsed to 1


def _theta_sign(kind: int, j: int, k: int) -> QQi:
    if kind == 1:
        return i_power(2 * (j + k))
    if kind == 2:
        return i_power(2 * j)
    if kind == 4:
        return i_power(2 * k)
    return QQI_ONE


def _canonical_theta(kind: int, arg: LinForm, unit: UnitExp):
    """Fold pi/pitau parts of `arg` into kind changes and an exact multiplier."""
    p_pi, p_tau = arg.coeff("pi"), arg.coeff("pitau")
    m, n = math.floor(p_pi), math.floor(p_tau)
    r_pi, r_tau = p_pi - m, p_tau - n
    if r_pi not in (0, _HALF) or r_tau not in (0, _HALF):
        raise NonPeriodShiftError(
            f"theta argument shift {print_linform(arg)} is not a multiple of half periods"
        )
    if m or n:
        v = arg - LinForm.make({"pi": Fraction(m), "pitau": Fraction(n)})
        exp = ExpLin.mono("i", "pitau", -n * n) + ExpLin.times("i", v, -2 * n)
        unit = unit * UnitExp.of(_theta_sign(kind, m, n), exp)
        arg = v
    if r_pi or r_tau:
        shift = {(True, False): HALF_PI, (False, True): HALF_PITAU, (True, True): HALF_BOTH}[
            (r_pi == _HALF, r_tau == _HALF)
        ]
        w = arg - LinForm.make({"pi": r_pi, "pitau": r_tau})
        kind, em = half_period_rewrite(kind, shift)
        exp = ExpLin.mono("i", "pitau", em.c_tau) + ExpLin.times("i", w, em.c_z)
        unit = unit * UnitExp.of(em.sign, exp)
        arg = w
    if arg.is_zero:
        if kind == 1:
            return unit, _ZERO
        return unit, Factor(f"theta{kind}_0")
    return unit, Factor(f"theta{kind}", arg)


def _canonical_sigma(kind: str, arg: LinForm, unit: UnitExp):
    """Reduce w1/w3 parts of `arg` modulo full periods with exact multipliers."""
    idx = _SIGMA_INDEX.get(kind)
    c1, c3 = arg.coeff("w1"), arg.coeff("w3")
    m1, m3 = math.floor(c1 / 2), math.floor(c3 / 2)
    if (c1 - 2 * m1) not in (0, 1) or (c3 - 2 * m3) not in (0, 1):
        raise NonPeriodShiftError(
            f"sigma argument shift {print_linform(arg)} is not a multiple of half periods"
        )
    for j, steps in ((1, m1), (3, m3)):
        eps = 1 if steps > 0 else -1
        for _ in range(abs(steps)):
            v = arg - LinForm.symbol(f"w{j}", 2 * eps)
            exp = ExpLin.times(f"eta{j}", v, 2 * eps) + ExpLin.mono(f"eta{j}", f"w{j}", 2)
            if idx is not None:
                exp = exp + ExpLin.mono(f"eta{j}", f"w{idx}", 2 * eps)
                exp = exp - ExpLin.mono(f"eta{idx}", f"w{j}", 2 * eps)
            unit = unit * UnitExp.of(QQi.of(-1), exp)
            arg = v
    if idx is None:
        if arg.is_zero:
            return unit, _ZERO
        return unit, Factor("sigma", arg)
    if arg.is_zero:
        return unit, _ONE  # sigma_j(0) = 1
    if _SIGMA_POINT_INDEX.get(arg.coeffs) == idx:
        return unit, _ZERO  # sigma_j(omega_j) = 0
    return unit, Factor(kind, arg)


def canonicalize_factor(f: Factor, variable: str | None):
    """(unit-exponential multiplier, canonical factor | _ZERO | _ONE).

    The canonical argument has no w2, a positive leading coefficient (the
    variable, then parameters, deciding before half-period tokens), w1/w3
    coefficients in {0, 1} and pi/pitau coefficients in {0, 1/2}; every
    reduction that achieves this is hoisted into the returned multiplier.
    """
    unit = UnitExp.identity()
    if f.kind == "ediff":
        k, l = f.indices
        if k == l:
            return unit, _ZERO
        if k > l:
            return UnitExp.of(QQi.of(-1)), Factor("ediff", indices=(l, k))
        return unit, f
    if f.arg is None:
        return unit, f
    arg = f.arg.subs(_W2_SUB)
    lead = arg.leading(lambda s: symbol_sort_key(s, variable))
    if lead and lead[1] < 0:
        arg = -arg
        if f.is_odd:
            unit = UnitExp.of(QQi.of(-1))
    if f.family == "theta":
        return _canonical_theta(int(f.kind[-1]), arg, unit)
    return _canonical_sigma(f.kind, arg, unit)


@dataclass(frozen=True)
class CanonTerm:
    """scalar * e^(exp) * product(factors), all exact."""

    scalar: QQi
    exp: ExpLin
    factors: tuple[Factor, ...]

    @property
    def factors_key(self):
        return tuple(f.key() for f in self.factors)


def canonicalize_term(t: Term, variable: str | None) -> CanonTerm | None:
    unit = UnitExp.identity()
    kept: list[Factor] = []
    for f in t.factors:
        u, nf = canonicalize_factor(f, variable)
        if nf is _ZERO:
            return None
        unit = unit * u
        if nf is _ONE:
            continue
        kept.append(nf)
    kept.sort(key=lambda f: f.key())
    unit = unit.folded()
    return CanonTerm(t.coeff * unit.unit, unit.exp, tuple(kept))


# --------------------------------------------------------------- multipliers


@dataclass(frozen=True)
class Multiplier:
    """Exact quasi-periodicity multiplier unit * e^(exp) for one generator.

    `exp` monomials with the distinguished variable on the right form the
    alpha part (printed per unit of the variable); the remainder is beta.
    `permuted` records whether the expression's terms permuted under the
    shift (identity map when False).
    """

    variable: str
    unit: QQi
    exp: ExpLin
    permuted: bool = False

    def _split(self):
        return self.exp.split(lambda mono: mono[1] == self.variable)

    @property
    def alpha(self) -> ExpLin:
        """Coefficient of the variable in the exponent, as a form over {eta1, eta3, i}."""
        avar, _ = self._split()
        return ExpLin(tuple(((l, "1"), c) for (l, _), c in avar.coeffs))

    @property
    def beta(self) -> ExpLin:
        return self._split()[1]

    def compose(self, other: "Multiplier") -> "Multiplier":
        u = UnitExp.of(self.unit * other.unit, self.exp + other.exp)
        return Multiplier(self.variable, u.unit, u.exp, self.permuted or other.permuted)

    def value(self, z: complex, ctx: Lattice | TauNome, bindings: Mapping[str, complex]) -> complex:
        left, right = multiplier_envs(ctx, bindings)
        right = dict(right)
        right[self.variable] = z
        return UnitExp(self.unit, self.exp).value(left, right)

    def describe(self) -> str:
        alpha, beta = self._split()
        alpha_txt = str(self.alpha) if not alpha.is_zero else "0"
        return f"unit={self.unit} alpha={alpha_txt} beta={self.beta}"


def multiplier_envs(ctx: Lattice | TauNome, bindings: Mapping[str, complex]):
    left = {"i": 1j, "1": 1 + 0j}
    if isinstance(ctx, Lattice):
        left["eta1"] = ctx.eta1
        left["eta3"] = ctx.eta3
        tau = ctx.tau
        right = {"1": 1 + 0j, "w1": ctx.omega1, "w3": ctx.omega3}
    else:
        tau = ctx.tau
        right = {"1": 1 + 0j}
    right["pi"] = math.pi + 0j
    right["pitau"] = math.pi * tau
    right.update(bindings)
    return left, right


def _shift_term(t: Term, var: str, gen: LinForm) -> Term:
    factors = []
    for f in t.factors:
        if f.arg is not None:
            eps = f.arg.coeff(var)
            if eps != 0:
                factors.append(Factor(f.kind, f.arg + gen.scale(eps), f.indices))
                continue
        factors.append(f)
    return Term(t.coeff, tuple(factors))


def term_multiplier(t: Term, var: str, generator: str) -> tuple[Multiplier, tuple | None]:
    """Multiplier of a single term under var -> var + generator.

    Returns (multiplier, maps_to): `maps_to` is None when the term maps to
    itself (full-period shifts) and otherwise names the canonical factor
    multiset the term maps onto, which expression-level matching resolves.
    Raises NonPeriodShiftError when a factor shifts by a non-lattice amount
    (pick a larger generator, e.g. 4w1 instead of 2w1).
    """
    family, gen = generator_form(generator)
    base = canonicalize_term(t, var)
    if base is None:
        raise DomainError("term is identically zero after normalization")
    image = canonicalize_term(_shift_term(t, var, gen), var)
    if image is None:
        raise DomainError("term image collapsed to zero; malformed input")
    u = UnitExp.of(image.scalar / base.scalar, image.exp - base.exp)
    maps_to = None if image.factors_key == base.factors_key else image.factors_key
    if maps_to is not None and family == "sigma":
        raise NonPeriodShiftError(
            "sigma factors shift by a half period under this generator; "
            "use the doubled generator (4w1/4w3)"
        )
    return Multiplier(var, u.unit, u.exp, permuted=maps_to is not None), maps_to


def expr_multiplier(e: Expr, var: str, generator: str) -> Multiplier:
    """Common multiplier of the whole expression under var -> var + generator.

    Terms may permute under the shift; the induced map on canonical factor
    multisets must be a bijection and every orbit must carry the same
    multiplier, which is returned.  A mismatch means the candidate is not
    quasi-periodic as a whole and raises MultiplierMismatchError.
    """
    family, gen = generator_form(generator)
    if require_single_family(e) != family:
        raise DomainError(f"generator {generator!r} does not match the expression's family")
    e = parity_normalize(e)
    if not e.terms:
        raise DomainError("empty expression has no multiplier")
    bases: dict[tuple, CanonTerm] = {}
    for t in e.terms:
        ct = canonicalize_term(t, var)
        if ct is None:
            continue
        if ct.factors_key in bases:
            raise MultiplierMismatchError(
                "two terms share a canonical factor multiset after reduction"
            )
        bases[ct.factors_key] = ct
    multipliers: list[tuple[str, Multiplier]] = []
    hit: dict[tuple, int] = {}
    for t in e.terms:
        image = canonicalize_term(_shift_term(t, var, gen), var)
        if image is None:
            continue
        target = bases.get(image.factors_key)
        if target is None:
            if family == "sigma":
                raise NonPeriodShiftError(
                    f"term {print_expr(Expr((t,), e.variable, e.parameters))!r} shifts "
                    "by a non-period amount; use the doubled generator"
                )
            raise MultiplierMismatchError(
                f"shifted term {print_expr(Expr((t,), e.variable, e.parameters))!r} "
                "matches no term of the expression"
            )
        hit[image.factors_key] = hit.get(image.factors_key, 0) + 1
        u = UnitExp.of(image.scalar / target.scalar, image.exp - target.exp)
        permuted = image.factors_key != canonicalize_term(t, var).factors_key
        multipliers.append(
            (print_expr(Expr((t,), e.variable, e.parameters)), Multiplier(var, u.unit, u.exp, permuted))
        )
    if not multipliers:
        raise DomainError("expression vanished identically under normalization")
    if any(c != 1 for c in hit.values()) or len(hit) != len(bases):
        raise MultiplierMismatchError("term map under the shift is not a bijection")
    first = multipliers[0][1]
    offenders = [
        name
        for name, m in multipliers
        if m.unit != first.unit or m.exp != first.exp
    ]
    if offenders:
        raise MultiplierMismatchError(
            "terms do not share a common multiplier; the candidate is not "
            "quasi-periodic as a whole",
            offenders=offenders,
        )
    permuted = any(m.permuted for _, m in multipliers)
    return Multiplier(var, first.unit, first.exp, permuted)


# ---------------------------------------------------------------- zero count


def predicted_zero_count(m1: Multiplier, m2: Multiplier, lambda1: str, lambda2: str) -> Fraction:
    """Exact zero count (alpha1*lambda2 - alpha2*lambda1) / (2*pi*i).

    The symbolic expansion must reduce, via the Legendre relation and the
    eta/omega sum rules, to a rational multiple of i*pi; anything else
    raises IrreducibleMonomialError.  Integrality is the caller's check.
    """
    fam1, l1 = generator_form(lambda1)
    fam2, l2 = generator_form(lambda2)
    if fam1 != fam2:
        raise DomainError("generator pair mixes sigma and theta periods")
    if fam1 == "sigma":
        if l1.coeff("w1") == 0 or l2.coeff("w3") == 0:
            raise DomainError("generator pair must be (w1-based, w3-based) for Im(l2/l1) > 0")
    elif lambda1 != "pi" or lambda2 != "pitau":
        raise DomainError("theta generator pair must be (pi, pitau)")

    def alpha_times(m: Multiplier, lam: LinForm) -> ExpLin:
        out = ExpLin.zero()
        for (left, right), c in m.exp.coeffs:
            if right != m.variable:
                continue
            for sym, g in lam.coeffs:
                out = out + ExpLin.mono(left, sym, c * g)
        return out

    total = alpha_times(m1, l2) - alpha_times(m2, l1)
    leftovers = [mono for mono, c in total.coeffs if mono != ("i", "pi")]
    if leftovers:
        raise IrreducibleMonomialError(
            f"zero-count expansion left non-reducible monomials: {leftovers}"
        )
    # total = c * i*pi; N = c*i*pi / (2*pi*i) = c / 2
    return total.coeff(("i", "pi")) / 2


# ------------------------------------------------------- symbolic zero check

_PURE_POINT_SYMS = {"w1", "w3"}


def _apply_e_diff_pairs(ct: CanonTerm) -> CanonTerm:
    """Rewrite squared constant factors sigma_j(P)^2 -> (e_m - e_j) sigma(P)^2.

    P runs over the half-period points; m is the index of P.  This encodes
    sqrt(wp(z) - e_j) = sigma_j(z)/sigma(z) at z = omega_m, the one relation
    beyond parity and zero factors that the mixed sigma identity needs.
    """
    factors = list(ct.factors)
    scalar = ct.scalar
    changed = True
    while changed:
        changed = False
        counts: dict[tuple, int] = {}
        for f in factors:
            if (
                f.kind in _SIGMA_INDEX
                and f.arg is not None
                and set(f.arg.symbols()) <= _PURE_POINT_SYMS
                and f.arg.coeffs in _SIGMA_POINT_INDEX
            ):
                counts[f.key()] = counts.get(f.key(), 0) + 1
        for key, count in counts.items():
            if count < 2:
                continue
            kind, arg_coeffs, _ = key
            j = _SIGMA_INDEX[kind]
            m = _SIGMA_POINT_INDEX[arg_coeffs]
            point = LinForm(arg_coeffs)
            removed = 0
            keep = []
            for f in factors:
                if removed < 2 and f.key() == key:
                    removed += 1
                    continue
                keep.append(f)
            k, l = min(m, j), max(m, j)
            if (m, j) != (k, l):
                scalar = scalar * QQi.of(-1)
            keep.append(Factor("ediff", indices=(k, l)))
            keep.append(Factor("sigma", point))
            keep.append(Factor("sigma", point))
            factors = sorted(keep, key=lambda f: f.key())
            changed = True
            break
    return CanonTerm(scalar, ct.exp, tuple(factors))


def check_zero_symbolic(e: Expr, binding: LinForm) -> bool:
    """True iff substituting the variable forces the expression to vanish.

    Pipeline: substitute, canonicalize every factor (parity signs, full- and
    half-period folding with exact multiplier bookkeeping, zero factors
    sigma(0) / sigma_j(omega_j) / theta zeros, nullwert collapse), apply the
    sigma_j(P)^2 rewrite, then group terms by factor multiset and exact
    exponential prefactor and check that all coefficient sums cancel.

    Sound but deliberately incomplete: a cancellation that needs relations
    beyond the above returns False, never a wrong True.
    """
    e2 = substitute(e, e.variable, binding)
    groups: dict[tuple, QQi] = {}
    for t in e2.terms:
        try:
            ct = canonicalize_term(t, None)
        except NonPeriodShiftError:
            return False
        if ct is None:
            continue
        ct = _apply_e_diff_pairs(ct)
        key = (ct.factors_key, ct.exp.coeffs)
        groups[key] = groups.get(key, QQi.of(0)) + ct.scalar
    return all(c.is_zero for c in groups.values())
