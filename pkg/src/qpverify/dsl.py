"""Expression language for sums of products of sigma/theta factors.

Grammar (informal):

    expr   := ['-'] term (('+'|'-') term)*
    term   := atom ('*'? atom)*
    atom   := literal | func '(' arg ')' | const | 'ediff' '(' k ',' l ')'
    func   := sigma | sigma1 | sigma2 | sigma3 | theta1 | theta2 | theta3 | theta4
    const  := theta1p0 | theta2_0 | theta3_0 | theta4_0
    literal:= Gaussian rational: "2", "-1", "1/2", "3i/4", "i"
    arg    := rational-coefficient linear combination of declared symbols,
              the distinguished variable, and the half-period tokens
              w1 w2 w3 (sigma family) / pi pitau (theta family);
              e.g. "z-a", "a/2+b/2", "pi/2", "(a+b+c+d)/2", "2*b".

The distinguished variable may carry coefficient 0, +-1/2 or +-1 only;
other dilations change the period lattice and are rejected at parse time.
Bare numbers are not allowed inside arguments (half-period tokens are the
only constants with a place in an argument).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import (
    DomainError,
    FamilyMixError,
    ParseError,
    UndeclaredSymbolError,
    UnknownFunctionError,
)
from .exact import QQI_ONE, LinForm, QQi
from .lattice import Lattice, e_diff
from .theta import TauNome, theta_eval, theta_nullwerte

SIGMA_FUNCS = ("sigma", "sigma1", "sigma2", "sigma3")
THETA_FUNCS = ("theta1", "theta2", "theta3", "theta4")
FUNCTIONS = SIGMA_FUNCS + THETA_FUNCS
CONST_NAMES = ("theta1p0", "theta2_0", "theta3_0", "theta4_0")
W_TOKENS = ("w1", "w2", "w3")
PI_TOKENS = ("pi", "pitau")
HALF_PERIOD_TOKENS = W_TOKENS + PI_TOKENS

_ALLOWED_EPS = {Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2)}


@dataclass(frozen=True)
class Factor:
    """One multiplicative factor: a sigma/theta call, or a named constant."""

    kind: str
    arg: LinForm | None = None
    indices: tuple[int, int] | None = None

    def key(self):
        return (
            self.kind,
            self.arg.coeffs if self.arg is not None else (),
            self.indices or (),
        )

    @property
    def family(self) -> str | None:
        if self.kind in SIGMA_FUNCS:
            return "sigma"
        if self.kind in THETA_FUNCS:
            return "theta"
        return None

    @property
    def is_odd(self) -> bool:
        return self.kind in ("sigma", "theta1")


@dataclass(frozen=True)
class Term:
    coeff: QQi
    factors: tuple[Factor, ...]

    def key(self):
        return tuple(sorted(f.key() for f in self.factors))


@dataclass(frozen=True)
class Expr:
    terms: tuple[Term, ...]
    variable: str
    parameters: tuple[str, ...]

    def symbols(self) -> tuple[str, ...]:
        return (self.variable,) + self.parameters


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([-+*/(),]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            break
        num, name, op = m.groups()
        at = m.start(1) if num else (m.start(2) if name else m.start(3))
        if num:
            tokens.append(("num", num, at))
        elif name:
            tokens.append(("name", name, at))
        else:
            tokens.append(("op", op, at))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset=0):
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}", pos)

    # ---- expression level ----

    def parse_expr(self) -> list[tuple[QQi, list[Factor]]]:
        terms = []
        sign = QQI_ONE
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.next()
            if val == "-":
                sign = QQi.of(-1)
        terms.append(self.parse_term(sign))
        while True:
            kind, val, pos = self.peek()
            if kind is None:
                break
            if kind != "op" or val not in "+-":
                raise ParseError(f"expected '+' or '-' between terms, found {val!r}", pos)
            self.next()
            sign = QQi.of(-1) if val == "-" else QQI_ONE
            terms.append(self.parse_term(sign))
        return terms

    def parse_term(self, sign: QQi) -> tuple[QQi, list[Factor]]:
        coeff = sign
        factors: list[Factor] = []
        first = True
        while True:
            kind, val, pos = self.peek()
            if not first:
                if kind == "op" and val == "*":
                    self.next()
                elif kind not in ("num", "name"):
                    break  # end of term
            first = False
            kind, val, pos = self.peek()
            if kind == "num" or (kind == "name" and val == "i"):
                coeff = coeff * self.parse_literal()
            elif kind == "name":
                factors.append(self.parse_factor())
            else:
                raise ParseError(f"expected a factor, found {val!r}", pos)
            kind, val, _ = self.peek()
            if kind is None or (kind == "op" and val in "+-"):
                break
        return coeff, factors

    def parse_literal(self) -> QQi:
        kind, val, pos = self.next()
        if kind == "num":
            num = int(val)
            imag = False
            k2, v2, _ = self.peek()
            if k2 == "name" and v2 == "i":
                self.next()
                imag = True
        elif kind == "name" and val == "i":
            num, imag = 1, True
        else:
            raise ParseError(f"expected a number, found {val!r}", pos)
        den = 1
        k2, v2, _ = self.peek()
        if k2 == "op" and v2 == "/":
            k3, v3, _ = self.peek(1)
            if k3 == "num":
                self.next()
                den = int(self.next()[1])
        frac = Fraction(num, den)
        return QQi.of(0, frac) if imag else QQi.of(frac)

    def parse_factor(self) -> Factor:
        kind, name, pos = self.next()
        nkind, nval, _ = self.peek()
        if not (nkind == "op" and nval == "("):
            if name in CONST_NAMES:
                return Factor(name)
            raise UnknownFunctionError(f"unknown constant or function {name!r}", pos)
        if name == "ediff":
            self.expect_op("(")
            k = self._parse_index()
            self.expect_op(",")
            l = self._parse_index()
            self.expect_op(")")
            return Factor("ediff", indices=(k, l))
        if name not in FUNCTIONS:
            raise UnknownFunctionError(f"unknown function {name!r}", pos)
        self.expect_op("(")
        arg = self.parse_arg()
        self.expect_op(")")
        return Factor(name, arg)

    def _parse_index(self) -> int:
        kind, val, pos = self.next()
        if kind != "num" or int(val) not in (1, 2, 3):
            raise ParseError(f"ediff index must be 1, 2 or 3, found {val!r}", pos)
        return int(val)

    # ---- argument level: exact linear combinations ----

    def parse_arg(self) -> LinForm:
        total = self._parse_arg_item(self._leading_sign())
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                sgn = Fraction(-1) if val == "-" else Fraction(1)
                total = total + self._parse_arg_item(sgn)
            else:
                return total

    def _leading_sign(self) -> Fraction:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.next()
            return Fraction(-1) if val == "-" else Fraction(1)
        return Fraction(1)

    def _parse_arg_item(self, sign: Fraction) -> LinForm:
        kind, val, pos = self.peek()
        coeff = sign
        if kind == "num":
            self.next()
            num = int(val)
            den = 1
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/" and self.peek(1)[0] == "num":
                self.next()
                den = int(self.next()[1])
            coeff = sign * Fraction(num, den)
            k2, v2, pos2 = self.peek()
            if k2 == "op" and v2 == "*":
                self.next()
                k2, v2, pos2 = self.peek()
            if not (k2 == "name" or (k2 == "op" and v2 == "(")):
                raise ParseError("bare numbers are not allowed in arguments", pos)
            kind, val, pos = k2, v2, pos2
        if kind == "op" and val == "(":
            self.next()
            inner = self.parse_arg()
            self.expect_op(")")
            inner = inner.scale(coeff)
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/" and self.peek(1)[0] == "num":
                self.next()
                inner = inner.scale(Fraction(1, int(self.next()[1])))
            return inner
        if kind != "name":
            raise ParseError(f"expected a symbol in argument, found {val!r}", pos)
        self.next()
        if val == "i":
            raise ParseError("symbol 'i' is reserved for the imaginary unit", pos)
        k2, v2, _ = self.peek()
        if k2 == "op" and v2 == "/" and self.peek(1)[0] == "num":
            self.next()
            coeff = coeff / int(self.next()[1])
        return LinForm.symbol(val, coeff)


def parse_linear_form(text: str, allowed: set[str] | None = None) -> LinForm:
    """Parse a bare linear form such as "b+pi/2+pitau/2" or "0"."""
    text = text.strip()
    if text == "0":
        return LinForm.zero()
    p = _Parser(text)
    form = p.parse_arg()
    if p.peek()[0] is not None:
        raise ParseError("trailing input after linear form", p.peek()[2])
    if allowed is not None:
        for sym in form.symbols():
            if sym not in allowed and sym not in HALF_PERIOD_TOKENS:
                raise UndeclaredSymbolError(f"symbol {sym!r} not declared", None)
    return form


def parse(text: str, variable: str = "z", parameters: tuple[str, ...] | None = None) -> Expr:
    """Parse DSL text into an Expr with normalized affine arguments.

    If `parameters` is None, every non-half-period symbol other than the
    variable is collected as a parameter; otherwise unknown symbols raise.
    """
    p = _Parser(text)
    raw_terms = p.parse_expr()
    seen: set[str] = set()
    terms = []
    for coeff, factors in raw_terms:
        if coeff.is_zero:
            continue
        for f in factors:
            if f.arg is None:
                continue
            eps = f.arg.coeff(variable)
            if eps not in _ALLOWED_EPS:
                raise ParseError(
                    f"coefficient {eps} of variable {variable!r} not supported "
                    "(only 0, +-1/2, +-1; argument dilation changes the lattice)"
                )
            for sym in f.arg.symbols():
                if sym in HALF_PERIOD_TOKENS:
                    if f.family == "theta" and sym in W_TOKENS:
                        raise ParseError(f"half-period token {sym!r} in a theta argument")
                    if f.family == "sigma" and sym in PI_TOKENS:
                        raise ParseError(f"half-period token {sym!r} in a sigma argument")
                else:
                    seen.add(sym)
        terms.append(Term(coeff, tuple(factors)))
    seen.discard(variable)
    if parameters is None:
        parameters = tuple(sorted(seen))
    else:
        undeclared = seen - set(parameters)
        if undeclared:
            raise UndeclaredSymbolError(f"undeclared symbols: {sorted(undeclared)}", None)
        parameters = tuple(parameters)
    return Expr(tuple(terms), variable, parameters)


# ---------------------------------------------------------------- printing


def symbol_sort_key(sym: str, variable: str | None = None):
    if variable is not None and sym == variable:
        return (0, sym)
    if sym in HALF_PERIOD_TOKENS:
        return (2, sym)
    return (1, sym)


def print_linform(form: LinForm, variable: str | None = None) -> str:
    if form.is_zero:
        return "0"
    items = sorted(form.coeffs, key=lambda sc: symbol_sort_key(sc[0], variable))
    out = []
    for sym, c in items:
        sign = "-" if c < 0 else ("" if not out else "+")
        c = abs(c)
        if c == 1:
            body = sym
        elif c.denominator == 1:
            body = f"{c.numerator}*{sym}"
        elif c.numerator == 1:
            body = f"{sym}/{c.denominator}"
        else:
            body = f"{c.numerator}*{sym}/{c.denominator}"
        out.append(sign + body)
    return "".join(out)


def _print_factor(f: Factor, variable: str | None) -> str:
    if f.kind == "ediff":
        return f"ediff({f.indices[0]},{f.indices[1]})"
    if f.arg is None:
        return f.kind
    return f"{f.kind}({print_linform(f.arg, variable)})"


def _coeff_text(c: QQi) -> str | None:
    """Literal text for a pure-real or pure-imaginary coefficient magnitude."""
    if c.im == 0:
        mag = abs(c.re)
        return None if mag == 1 else str(mag)
    mag = abs(c.im)
    if mag.denominator == 1:
        head = "" if mag.numerator == 1 else str(mag.numerator)
        return f"{head}i"
    head = "" if mag.numerator == 1 else str(mag.numerator)
    return f"{head}i/{mag.denominator}"


def print_expr(e: Expr) -> str:
    """Canonical text; parse(print_expr(e)) round-trips on normal forms."""
    chunks: list[str] = []
    for t in e.terms:
        pieces = _split_pure(t.coeff)
        for coeff in pieces:
            neg = (coeff.im == 0 and coeff.re < 0) or (coeff.re == 0 and coeff.im < 0)
            text = _coeff_text(coeff)
            body = "*".join(_print_factor(f, e.variable) for f in t.factors)
            if text is not None:
                body = f"{text}*{body}" if body else text
            elif not body:
                body = "1"
            if not chunks:
                chunks.append(f"-{body}" if neg else body)
            else:
                chunks.append(f" - {body}" if neg else f" + {body}")
    return "".join(chunks) if chunks else "0"


def _split_pure(c: QQi) -> list[QQi]:
    if c.re != 0 and c.im != 0:
        return [QQi.of(c.re), QQi.of(0, c.im)]
    return [c]


# ------------------------------------------------------- parity normal form

# literal zero points recognized by the mechanical normal form
_THETA_LITERAL_ZEROS = {
    ("theta1", ()),
    ("theta2", (("pi", Fraction(1, 2)),)),
    ("theta3", (("pi", Fraction(1, 2)), ("pitau", Fraction(1, 2)))),
    ("theta4", (("pitau", Fraction(1, 2)),)),
}
_SIGMA_J_ZERO_ARGS = {
    "sigma1": {(("w1", Fraction(1)),)},
    "sigma2": {(("w2", Fraction(1)),), (("w1", Fraction(1)), ("w3", Fraction(1)))},
    "sigma3": {(("w3", Fraction(1)),)},
}


def _normalize_factor_sign(f: Factor) -> tuple[QQi, Factor]:
    """Mechanical sign hoisting: lexicographically smallest symbol positive."""
    if f.arg is None or f.arg.is_zero:
        return QQI_ONE, f
    lead = f.arg.leading()
    if lead[1] < 0:
        sign = QQi.of(-1) if f.is_odd else QQI_ONE
        return sign, Factor(f.kind, -f.arg, f.indices)
    return QQI_ONE, f


def parity_normalize(e: Expr) -> Expr:
    """Canonical sign form, zero-factor elimination, and merging.

    Factor arguments get the lexicographically smallest symbol with positive
    coefficient (parity sign hoisted into the term coefficient); factors that
    are literally one of the known zeros (sigma(0), sigma_j(omega_j),
    theta1(0), theta2(pi/2), theta3(pi/2+pitau/2), theta4(pitau/2)) kill
    their term; theta_k(0) for k >= 2 and sigma_j(0) collapse to the nullwert
    constant resp. to 1; identical factor multisets merge by summing
    coefficients.
    """
    merged: dict[tuple, QQi] = {}
    rep: dict[tuple, tuple[Factor, ...]] = {}
    for t in e.terms:
        coeff = t.coeff
        kept: list[Factor] = []
        dead = False
        for f in t.factors:
            if f.kind == "ediff":
                k, l = f.indices
                if k == l:
                    dead = True
                    break
                if k > l:
                    coeff = coeff * QQi.of(-1)
                    f = Factor("ediff", indices=(l, k))
                kept.append(f)
                continue
            if f.arg is None:
                kept.append(f)
                continue
            sign, f = _normalize_factor_sign(f)
            coeff = coeff * sign
            akey = f.arg.coeffs
            if (f.kind, akey) in _THETA_LITERAL_ZEROS or (f.kind == "sigma" and f.arg.is_zero):
                dead = True
                break
            if f.kind in _SIGMA_J_ZERO_ARGS:
                if f.arg.is_zero:
                    continue  # sigma_j(0) = 1
                if akey in _SIGMA_J_ZERO_ARGS[f.kind]:
                    dead = True
                    break
            if f.kind in THETA_FUNCS and f.arg.is_zero:
                if f.kind == "theta1":
                    dead = True
                    break
                kept.append(Factor(f"{f.kind}_0"))
                continue
            kept.append(f)
        if dead or coeff.is_zero:
            continue
        kept.sort(key=lambda fc: fc.key())
        key = tuple(fc.key() for fc in kept)
        merged[key] = merged.get(key, QQi.of(0)) + coeff
        rep[key] = tuple(kept)
    terms = tuple(
        Term(c, rep[k]) for k, c in sorted(merged.items(), key=lambda kv: kv[0]) if not c.is_zero
    )
    return Expr(terms, e.variable, e.parameters)


def substitute(e: Expr, var: str, replacement: LinForm) -> Expr:
    """Replace the distinguished variable by a linear form in the parameters."""
    mapping = {var: replacement}
    terms = []
    for t in e.terms:
        factors = tuple(
            Factor(f.kind, f.arg.subs(mapping), f.indices) if f.arg is not None else f
            for f in t.factors
        )
        terms.append(Term(t.coeff, factors))
    return Expr(tuple(terms), e.variable, e.parameters)


# ------------------------------------------------------------- evaluation


@dataclass(frozen=True)
class EvalResult:
    value: complex
    scale: float


def _symbol_env(ctx: Lattice | TauNome, bindings: Mapping[str, complex]) -> dict[str, complex]:
    import math

    env = dict(bindings)
    if isinstance(ctx, Lattice):
        env.setdefault("w1", ctx.omega1)
        env.setdefault("w2", ctx.omega2)
        env.setdefault("w3", ctx.omega3)
        env.setdefault("pi", math.pi + 0j)
        env.setdefault("pitau", math.pi * ctx.tau)
    else:
        env.setdefault("pi", math.pi + 0j)
        env.setdefault("pitau", math.pi * ctx.tau)
    return env


def _factor_value(f: Factor, env: Mapping[str, complex], ctx: Lattice | TauNome) -> complex:
    from .sigma import sigma_eval

    lat = ctx if isinstance(ctx, Lattice) else None
    tn = ctx.tn if isinstance(ctx, Lattice) else ctx
    if f.kind in SIGMA_FUNCS:
        if lat is None:
            raise DomainError("sigma factors require a lattice context")
        return sigma_eval(f.kind, f.arg.value(env), lat)
    if f.kind in THETA_FUNCS:
        return theta_eval(int(f.kind[-1]), f.arg.value(env), tn)
    if f.kind == "ediff":
        if lat is None:
            raise DomainError("ediff requires a lattice context")
        return e_diff(lat, *f.indices).value
    nw = theta_nullwerte(tn)
    return {
        "theta1p0": nw.theta1_prime,
        "theta2_0": nw.theta2,
        "theta3_0": nw.theta3,
        "theta4_0": nw.theta4,
    }[f.kind]


def eval_expr(
    e: Expr, bindings: Mapping[str, complex], ctx: Lattice | TauNome
) -> EvalResult:
    """Numeric value of the expression plus the max-|term| scale.

    All of the expression's symbols must be bound; the scale is the natural
    reference for relative residuals of identities that cancel to zero.
    """
    for sym in e.symbols():
        if sym not in bindings and any(
            f.arg is not None and f.arg.coeff(sym) != 0 for t in e.terms for f in t.factors
        ):
            raise DomainError(f"symbol {sym!r} is not bound")
    env = _symbol_env(ctx, bindings)
    total = 0j
    scale = 0.0
    for ti, t in enumerate(e.terms):
        v = complex(t.coeff)
        for fi, f in enumerate(t.factors):
            try:
                v *= _factor_value(f, env, ctx)
            except (DomainError, OverflowError) as exc:
                raise type(exc)(f"term {ti}, factor {fi} ({f.kind}): {exc}") from exc
        total += v
        scale = max(scale, abs(v))
    return EvalResult(total, scale)


def expr_families(e: Expr) -> set[str]:
    return {f.family for t in e.terms for f in t.factors if f.family is not None}


def require_single_family(e: Expr) -> str:
    fams = expr_families(e)
    if len(fams) != 1:
        raise FamilyMixError(
            f"expression mixes factor families {sorted(fams)}; "
            "quasi-period inference needs a single period lattice"
        )
    return next(iter(fams))
