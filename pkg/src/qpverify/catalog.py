"""Built-in catalog of verifiable identities and base relations.

Two entry flavors:

* expression identities -- a DSL expression (LHS minus RHS) that must vanish
  identically, with a distinguished variable, a generator pair, and the
  candidate zeros that can be exhibited symbolically.  These run the full
  pipeline: multiplier inference, exact zero count, symbolic/numeric zero
  exhibition, residual sampling.
* relation suites -- families of pointwise transformation/quasi-periodicity
  relations (and the Legendre relation) that the expression pipeline itself
  relies on.  These are checked by independent residual sampling only: the
  theta relations compare raw series against the exact multipliers, the
  sigma<->theta transformations compare the production evaluator against
  the unreduced direct formula, and the Legendre relation recomputes both
  eta constants from the truncated lattice product.

Candidate zero lists are only populated where an explicit list is part of
the identity's classical derivation; the four-variable fundamental
identities ship without candidates and are covered by the other layers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .dsl import Expr, parse
from .errors import DomainError
from .lattice import Lattice
from .sigma import eta_product_oracle, sigma_eval
from .theta import (
    HALF_BOTH,
    HALF_PI,
    HALF_PITAU,
    TauNome,
    half_period_rewrite,
    lemma1_multiplier,
    theta_series,
)

Context = Lattice | TauNome


@dataclass(frozen=True)
class RelationCheck:
    """One pointwise relation; `residual_at` returns a relative residual.

    `flipped=True` evaluates the single-sign mutation of the relation (the
    right-hand side negated), which the mutation sweep must falsify.
    `pointwise=False` marks relations with no free point (Legendre).
    """

    name: str
    residual_at: Callable[[Context, complex | None, bool], float]
    pointwise: bool = True


@dataclass(frozen=True)
class IdentitySpec:
    """Catalog entry: either an expression identity or a relation suite."""

    name: str
    family: str  # 'sigma' | 'theta'
    kind: str  # 'expr' | 'relations'
    dsl: str | None = None
    variable: str | None = None
    parameters: tuple[str, ...] = ()
    generators: tuple[str, str] | None = None
    candidates: tuple[str, ...] = ()
    exclusions: tuple[str, ...] = ()
    relations: tuple[RelationCheck, ...] = ()
    expected_n: int | None = None
    zero_excess_expected: bool = False
    zero_excess_note: str = ""
    default_tol: float | None = None
    expr_override: Expr | None = field(default=None, compare=False)

    def expr(self) -> Expr:
        if self.expr_override is not None:
            return self.expr_override
        if self.dsl is None:
            raise DomainError(f"catalog entry {self.name} has no expression")
        return parse(self.dsl, variable=self.variable, parameters=self.parameters)


def _require_lattice(ctx: Context) -> Lattice:
    if not isinstance(ctx, Lattice):
        raise DomainError("this entry requires a lattice context")
    return ctx


def _tn(ctx: Context) -> TauNome:
    return ctx.tn if isinstance(ctx, Lattice) else ctx


def _rel_err(lhs: complex, rhs: complex) -> float:
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale


def _lemma1_relation(kind: int, j: int, k: int) -> RelationCheck:
    label = "pi" if j else "pitau"

    def residual(ctx: Context, z: complex | None, flipped: bool) -> float:
        tn = _tn(ctx)
        shift = j * math.pi + k * math.pi * tn.tau
        lhs = theta_series(kind, z + shift, tn)
        rhs = lemma1_multiplier(kind, j, k).value(z, tn) * theta_series(kind, z, tn)
        return _rel_err(lhs, -rhs if flipped else rhs)

    return RelationCheck(f"theta{kind}+{label}", residual)


def _lemma2_relation(kind: int, shift_name: str) -> RelationCheck:
    def residual(ctx: Context, z: complex | None, flipped: bool) -> float:
        tn = _tn(ctx)
        shift = {
            HALF_PI: math.pi / 2,
            HALF_PITAU: math.pi * tn.tau / 2,
            HALF_BOTH: math.pi / 2 + math.pi * tn.tau / 2,
        }[shift_name]
        new_kind, m = half_period_rewrite(kind, shift_name)
        lhs = theta_series(kind, z + shift, tn)
        rhs = m.value(z, tn) * theta_series(new_kind, z, tn)
        return _rel_err(lhs, -rhs if flipped else rhs)

    return RelationCheck(f"theta{kind}+{shift_name}", residual)


_SIGMA_THETA_PAIRING = {"sigma": 1, "sigma1": 2, "sigma2": 3, "sigma3": 4}


def _sigma_theta_relation(kind: str) -> RelationCheck:
    def residual(ctx: Context, z: complex | None, flipped: bool) -> float:
        lat = _require_lattice(ctx)
        tk = _SIGMA_THETA_PAIRING[kind]
        u = math.pi * z / (2 * lat.omega1)
        nw = lat.nullwerte
        front = {
            "sigma": 2 * lat.omega1 / (math.pi * nw.theta1_prime),
            "sigma1": 1 / nw.theta2,
            "sigma2": 1 / nw.theta3,
            "sigma3": 1 / nw.theta4,
        }[kind]
        import cmath

        direct = front * cmath.exp(lat.eta1 * z * z / (2 * lat.omega1)) * theta_series(tk, u, lat.tn)
        lhs = sigma_eval(kind, z, lat)
        return _rel_err(lhs, -direct if flipped else direct)

    return RelationCheck(f"{kind}-theta{_SIGMA_THETA_PAIRING[kind]}", residual)


_LEGENDRE_CUTOFF = 60


def _legendre_relation() -> RelationCheck:
    def residual(ctx: Context, z: complex | None, flipped: bool) -> float:
        lat = _require_lattice(ctx)
        key = ("legendre_oracle", _LEGENDRE_CUTOFF)
        etas = lat._cache.get(key)
        if etas is None:
            etas = (
                eta_product_oracle(lat, 1, _LEGENDRE_CUTOFF),
                eta_product_oracle(lat, 3, _LEGENDRE_CUTOFF),
            )
            lat._cache[key] = etas
        eta1, eta3 = etas
        target = 1j * math.pi / 2
        if flipped:
            target = -target
        return abs(eta1 * lat.omega3 - eta3 * lat.omega1 - target) / abs(target)

    return RelationCheck("eta1*w3-eta3*w1=i*pi/2", residual, pointwise=False)


_PHI1 = (
    "sigma(z+a)*sigma(z-a)*sigma(b+c)*sigma(b-c)"
    " + sigma(z+b)*sigma(z-b)*sigma(c+a)*sigma(c-a)"
    " + sigma(z+c)*sigma(z-c)*sigma(a+b)*sigma(a-b)"
)

_PHI2 = (
    "sigma(a)*sigma(b)*sigma(c)*sigma(d)"
    " + sigma(a/2+b/2+c/2+d/2)*sigma(a/2+b/2-c/2-d/2)"
    "*sigma(a/2-b/2+c/2-d/2)*sigma(-a/2+b/2+c/2-d/2)"
    " + sigma(a/2+b/2+c/2-d/2)*sigma(a/2+b/2-c/2+d/2)"
    "*sigma(a/2-b/2+c/2+d/2)*sigma(a/2-b/2-c/2-d/2)"
)

_PHI3 = "sigma1(z)*sigma1(z) - sigma3(z)*sigma3(z) + ediff(1,3)*sigma(z)*sigma(z)"

_PSI1 = (
    "theta3(a+b)*theta3(a-b)*theta3_0*theta3_0"
    " - theta3(a)*theta3(a)*theta3(b)*theta3(b)"
    " - theta1(a)*theta1(a)*theta1(b)*theta1(b)"
)

_PSI2 = (
    "theta1(a+b)*theta2(a-b)*theta3_0*theta4_0"
    " - theta1(a)*theta2(a)*theta3(b)*theta4(b)"
    " - theta1(b)*theta2(b)*theta3(a)*theta4(a)"
)


def _quad(kind: int, args: tuple[str, str, str, str]) -> str:
    return "*".join(f"theta{kind}({a})" for a in args)


_PLAIN = ("a", "b", "c", "d")
_STAR = ("-a/2+b/2+c/2+d/2", "a/2-b/2+c/2+d/2", "a/2+b/2-c/2+d/2", "a/2+b/2+c/2-d/2")

_PSI3 = (
    f"2*{_quad(3, _PLAIN)} + {_quad(1, _STAR)} - {_quad(2, _STAR)}"
    f" - {_quad(3, _STAR)} - {_quad(4, _STAR)}"
)

_NO_CANDIDATE_NOTE = (
    "no closed candidate-zero list is part of this identity's derivation; "
    "verification rests on the multiplier, zero-count and residual layers"
)


def builtin_catalog() -> list[IdentitySpec]:
    """All built-in identities, in the fixed order reports use."""
    return [
        IdentitySpec(
            name="weierstrass-3term",
            family="sigma",
            kind="expr",
            dsl=_PHI1,
            variable="z",
            parameters=("a", "b", "c"),
            generators=("2w1", "2w3"),
            candidates=("a", "b", "c"),
            exclusions=("a-b", "b-c", "c-a"),
            expected_n=2,
            zero_excess_expected=True,
        ),
        IdentitySpec(
            name="weierstrass-fundamental",
            family="sigma",
            kind="expr",
            dsl=_PHI2,
            variable="a",
            parameters=("b", "c", "d"),
            generators=("4w1", "4w3"),
            expected_n=4,
            zero_excess_expected=False,
            zero_excess_note=_NO_CANDIDATE_NOTE,
        ),
        IdentitySpec(
            name="sigma-mixed",
            family="sigma",
            kind="expr",
            dsl=_PHI3,
            variable="z",
            parameters=(),
            generators=("2w1", "2w3"),
            candidates=("0", "w1", "w3"),
            expected_n=2,
            zero_excess_expected=True,
        ),
        IdentitySpec(
            name="jacobi-add-theta3",
            family="theta",
            kind="expr",
            dsl=_PSI1,
            variable="a",
            parameters=("b",),
            generators=("pi", "pitau"),
            candidates=("0", "pi/2+pitau/2", "b+pi/2+pitau/2"),
            exclusions=("b", "b-pi/2-pitau/2"),
            expected_n=2,
            zero_excess_expected=True,
        ),
        IdentitySpec(
            name="jacobi-add-mixed",
            family="theta",
            kind="expr",
            dsl=_PSI2,
            variable="a",
            parameters=("b",),
            generators=("pi", "pitau"),
            candidates=("0", "-b", "pi/2"),
            exclusions=("b", "b-pi/2"),
            expected_n=2,
            zero_excess_expected=True,
        ),
        IdentitySpec(
            name="jacobi-fundamental",
            family="theta",
            kind="expr",
            dsl=_PSI3,
            variable="a",
            parameters=("b", "c", "d"),
            generators=("pi", "pitau"),
            expected_n=1,
            zero_excess_expected=False,
            zero_excess_note=_NO_CANDIDATE_NOTE,
        ),
        IdentitySpec(
            name="legendre-relation",
            family="sigma",
            kind="relations",
            relations=(_legendre_relation(),),
            default_tol=1e-4,
        ),
        IdentitySpec(
            name="lemma1-qp",
            family="theta",
            kind="relations",
            relations=tuple(
                _lemma1_relation(kind, j, k)
                for kind in (1, 2, 3, 4)
                for j, k in ((1, 0), (0, 1))
            ),
        ),
        IdentitySpec(
            name="lemma2-transforms",
            family="theta",
            kind="relations",
            relations=tuple(
                _lemma2_relation(kind, shift)
                for kind in (1, 2, 3, 4)
                for shift in (HALF_PI, HALF_PITAU, HALF_BOTH)
            ),
        ),
        IdentitySpec(
            name="sigma-theta-transforms",
            family="sigma",
            kind="relations",
            relations=tuple(
                _sigma_theta_relation(kind) for kind in ("sigma", "sigma1", "sigma2", "sigma3")
            ),
        ),
    ]


def catalog_entry(name: str) -> IdentitySpec:
    for spec in builtin_catalog():
        if spec.name == name:
            return spec
    raise DomainError(f"no built-in identity named {name!r}")
