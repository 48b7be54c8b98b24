"""End-to-end verification: multipliers, zero counts, zero exhibition, residuals.

For an expression identity the layers run in order:

1. symbolic multiplier inference on both generators (exact);
2. exact predicted zero count with integrality check;
3. symbolic zero check for each cataloged candidate, plus the numeric
   residual of the substituted expression at seeded random parameter draws;
4. residual sampling of the full expression at seeded random draws of all
   variables (degenerate draws near the excluded set are rejected and
   counted);
5. verdict: `verified` needs multiplier matches on both generators, an
   integer count, and max relative residual below tolerance; `falsified`
   needs a residual above 1000x tolerance that survives a confirmation
   pass at doubled sampling effort on a derived seed; contexts in the
   low-accuracy nome band report `inconclusive` rather than false
   confidence.

`zero_excess` is set when more candidate zeros verify than the predicted
count allows, which is the contradiction that proves the identity.

Relation-suite entries run layer 4 only, against their independent
residual evaluators.

All randomness flows from one fixed 64-bit LCG; a fixed seed gives a
byte-identical JSON report.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .catalog import Context, IdentitySpec, builtin_catalog
from .contour import (
    Parallelogram,
    WindingOptions,
    choose_admissible_base,
    locate_zeros,
    winding_count,
)
from .dsl import Expr, Term, eval_expr, parse_linear_form, substitute
from .errors import (
    DomainError,
    FamilyMixError,
    IrreducibleMonomialError,
    MultiplierMismatchError,
    NonPeriodShiftError,
    QPVerifyError,
)
from .exact import QQi
from .lattice import Lattice, lattice_new
from .qp import Multiplier, expr_multiplier, generator_form, predicted_zero_count
from .qp import check_zero_symbolic
from .rng import Lcg

DEFAULT_TOL = {"sigma": 1e-9, "theta": 1e-10}
FALSIFY_FACTOR = 1e3
_EXCLUSION_DISTANCE = 1e-3
_TINY = 1e-300


@dataclass(frozen=True)
class VerifyParams:
    seed: int = 42
    samples: int = 200
    tol: float | None = None


def default_contexts() -> list[Lattice]:
    return [
        lattice_new(math.pi / 2, 1j * math.pi / 2),
        lattice_new(1.0, 0.3 + 0.9j),
        lattice_new(1 + 0.2j, -0.4 + 1.1j),
    ]


def _tolerance(spec: IdentitySpec, params: VerifyParams) -> float:
    if params.tol is not None:
        return params.tol
    if spec.default_tol is not None:
        return spec.default_tol
    return DEFAULT_TOL[spec.family]


def _entry_rng(spec_name: str, params: VerifyParams, salt: int) -> Lcg:
    return Lcg(params.seed).derive(zlib.crc32(spec_name.encode()) ^ salt)


def _numeric_periods(spec: IdentitySpec, ctx: Context) -> tuple[complex, complex]:
    if spec.generators is not None:
        toks = spec.generators
    else:
        toks = ("2w1", "2w3") if spec.family == "sigma" else ("pi", "pitau")
    return _period_value(toks[0], ctx), _period_value(toks[1], ctx)


def _period_value(token: str, ctx: Context) -> complex:
    family, form = generator_form(token)
    if family == "sigma":
        if not isinstance(ctx, Lattice):
            raise DomainError("sigma-family generators require a lattice context")
        return form.coeff("w1") * ctx.omega1 + form.coeff("w3") * ctx.omega3
    tau = ctx.tau if isinstance(ctx, Lattice) else ctx.tau
    return complex(form.coeff("pi")) * math.pi + complex(form.coeff("pitau")) * math.pi * tau


def _cell_distance(w: complex, l1: complex, l2: complex) -> float:
    det = l1.real * l2.imag - l1.imag * l2.real
    u = (w.real * l2.imag - w.imag * l2.real) / det
    v = (l1.real * w.imag - l1.imag * w.real) / det
    return max(abs(u - round(u)), abs(v - round(v)))


def _token_env(ctx: Context) -> dict[str, complex]:
    env: dict[str, complex] = {"pi": math.pi + 0j}
    if isinstance(ctx, Lattice):
        env.update(w1=ctx.omega1, w2=ctx.omega2, w3=ctx.omega3, pitau=math.pi * ctx.tau)
    else:
        env["pitau"] = math.pi * ctx.tau
    return env


class _Sampler:
    """Seeded draws of symbol bindings with excluded-set rejection."""

    def __init__(self, spec: IdentitySpec, ctx: Context, rng: Lcg):
        self.ctx = ctx
        self.rng = rng
        self.l1, self.l2 = _numeric_periods(spec, ctx)
        self.exclusions = [parse_linear_form(t) for t in spec.exclusions]
        self.token_env = _token_env(ctx)
        self.rejected = 0

    def point(self, centered: bool = False) -> complex:
        u = self.rng.uniform_in(0.05, 0.95)
        v = self.rng.uniform_in(0.05, 0.95)
        if centered:
            u, v = u - 0.5, v - 0.5
        return u * self.l1 + v * self.l2

    def bindings(self, symbols: Iterable[str]) -> dict[str, complex]:
        symbols = list(symbols)
        for _ in range(500):
            draw = {s: self.point() for s in symbols}
            if self._admissible(draw):
                return draw
            self.rejected += 1
        raise DomainError("could not draw parameters clear of the excluded set")

    def _admissible(self, draw: Mapping[str, complex]) -> bool:
        if not self.exclusions:
            return True
        env = dict(self.token_env)
        env.update(draw)
        for form in self.exclusions:
            if any(sym not in env for sym in form.symbols()):
                continue
            w = form.value(env)
            if _cell_distance(w, self.l1, self.l2) < _EXCLUSION_DISTANCE:
                return False
        return True


# ------------------------------------------------------------------- report


def _cnum(z: complex | None) -> list[float] | None:
    return None if z is None else [z.real, z.imag]


@dataclass
class MultiplierEvidence:
    generator: str
    alpha: str
    beta: str
    matched: bool
    detail: str = ""

    def to_dict(self) -> dict:
        d = {
            "generator": self.generator,
            "alpha": self.alpha,
            "beta": self.beta,
            "matched": self.matched,
        }
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass
class ZeroEvidence:
    candidate: str
    symbolic: bool
    residual: float

    def to_dict(self) -> dict:
        return {"candidate": self.candidate, "symbolic": self.symbolic, "residual": self.residual}


@dataclass
class VerificationReport:
    identity: str
    context: dict
    multipliers: list[MultiplierEvidence]
    predicted_n: Fraction | None
    zeros: list[ZeroEvidence]
    samples: int
    seed: int
    max_rel_residual: float | None
    rejected_draws: int
    zero_excess: bool
    verdict: str
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "context": self.context,
            "multipliers": [m.to_dict() for m in self.multipliers],
            "predicted_N": (
                None
                if self.predicted_n is None
                else {"num": self.predicted_n.numerator, "den": self.predicted_n.denominator}
            ),
            "zeros": [z.to_dict() for z in self.zeros],
            "residuals": {
                "samples": self.samples,
                "seed": self.seed,
                "max_rel": self.max_rel_residual,
                "rejected": self.rejected_draws,
            },
            "zero_excess": self.zero_excess,
            "verdict": self.verdict,
            "notes": self.notes,
        }


def _context_dict(ctx: Context) -> dict:
    if isinstance(ctx, Lattice):
        return {
            "omega1": _cnum(ctx.omega1),
            "omega3": _cnum(ctx.omega3),
            "tau": _cnum(ctx.tau),
            "q": _cnum(ctx.tn.q),
        }
    return {"omega1": None, "omega3": None, "tau": _cnum(ctx.tau), "q": _cnum(ctx.q)}


def to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, allow_nan=False)


# -------------------------------------------------------------------- verify


def _expr_residual_layer(
    e: Expr, sampler: _Sampler, ctx: Context, samples: int
) -> float:
    worst = 0.0
    syms = list(e.symbols())
    for _ in range(samples):
        draw = sampler.bindings(syms)
        r = eval_expr(e, draw, ctx)
        worst = max(worst, abs(r.value) / max(r.scale, _TINY))
    return worst


def _relation_residual_layer(
    spec: IdentitySpec, sampler: _Sampler, ctx: Context, samples: int, flip: int | None
) -> float:
    worst = 0.0
    for idx, rel in enumerate(spec.relations):
        flipped = flip == idx
        if not rel.pointwise:
            worst = max(worst, rel.residual_at(ctx, None, flipped))
            continue
        for _ in range(samples):
            z = sampler.point(centered=True)
            worst = max(worst, rel.residual_at(ctx, z, flipped))
    return worst


def verify(
    spec: IdentitySpec,
    ctx: Context,
    params: VerifyParams = VerifyParams(),
    _flip_relation: int | None = None,
) -> VerificationReport:
    """Run the verification layers for one catalog entry in one context."""
    tol = _tolerance(spec, params)
    notes: list[str] = []
    multipliers: list[MultiplierEvidence] = []
    zeros: list[ZeroEvidence] = []
    predicted: Fraction | None = None
    mismatch = False
    low_accuracy = (ctx.tn if isinstance(ctx, Lattice) else ctx).low_accuracy

    if spec.kind == "expr":
        e = spec.expr()
        inferred: list[Multiplier | None] = []
        for gen in spec.generators:
            try:
                m = expr_multiplier(e, e.variable, gen)
                multipliers.append(
                    MultiplierEvidence(gen, str(m.alpha), str(m.beta), True)
                )
                inferred.append(m)
            except (MultiplierMismatchError, NonPeriodShiftError, FamilyMixError) as exc:
                multipliers.append(MultiplierEvidence(gen, "", "", False, detail=str(exc)))
                inferred.append(None)
                mismatch = True
        if not mismatch:
            try:
                predicted = predicted_zero_count(
                    inferred[0], inferred[1], spec.generators[0], spec.generators[1]
                )
                if predicted.denominator != 1:
                    notes.append(f"predicted zero count {predicted} is not an integer")
            except IrreducibleMonomialError as exc:
                notes.append(str(exc))

        cand_rng = _entry_rng(spec.name, params, 0xC0FFEE)
        cand_sampler = _Sampler(spec, ctx, cand_rng)
        for cand in spec.candidates:
            form = parse_linear_form(cand)
            symbolic = check_zero_symbolic(e, form)
            sub = substitute(e, e.variable, form)
            worst = 0.0
            syms = [s for s in e.parameters]
            for _ in range(params.samples):
                draw = cand_sampler.bindings(syms)
                r = eval_expr(sub, draw, ctx)
                worst = max(worst, abs(r.value) / max(r.scale, _TINY))
            zeros.append(ZeroEvidence(cand, symbolic, worst))

        res_rng = _entry_rng(spec.name, params, 0x5A5A5A)
        sampler = _Sampler(spec, ctx, res_rng)
        max_rel = _expr_residual_layer(e, sampler, ctx, params.samples)
        rejected = sampler.rejected + cand_sampler.rejected

        def rerun(factor: int) -> float:
            s2 = _Sampler(spec, ctx, _entry_rng(spec.name, params, 0xD0_0B1E))
            return _expr_residual_layer(e, s2, ctx, params.samples * factor)

    else:
        res_rng = _entry_rng(spec.name, params, 0x5A5A5A)
        sampler = _Sampler(spec, ctx, res_rng)
        max_rel = _relation_residual_layer(spec, sampler, ctx, params.samples, _flip_relation)
        rejected = sampler.rejected

        def rerun(factor: int) -> float:
            s2 = _Sampler(spec, ctx, _entry_rng(spec.name, params, 0xD0_0B1E))
            return _relation_residual_layer(spec, s2, ctx, params.samples * factor, _flip_relation)

    verified_candidates = sum(1 for z in zeros if z.symbolic or z.residual < tol)
    zero_excess = (
        predicted is not None
        and predicted.denominator == 1
        and verified_candidates > predicted
    )
    if spec.kind == "expr" and not spec.candidates and spec.zero_excess_note:
        notes.append(f"zero_excess=false: {spec.zero_excess_note}")

    if mismatch:
        verdict = "falsified"
    elif max_rel > FALSIFY_FACTOR * tol and rerun(2) > FALSIFY_FACTOR * tol:
        verdict = "falsified"
    elif low_accuracy:
        verdict = "inconclusive"
        notes.append("context lies in the low-accuracy nome band (Im tau < 0.3)")
    elif max_rel >= tol:
        verdict = "inconclusive"
    elif spec.kind == "expr" and (predicted is None or predicted.denominator != 1):
        verdict = "inconclusive"
    else:
        verdict = "verified"

    return VerificationReport(
        identity=spec.name,
        context=_context_dict(ctx),
        multipliers=multipliers,
        predicted_n=predicted,
        zeros=zeros,
        samples=params.samples,
        seed=params.seed,
        max_rel_residual=max_rel,
        rejected_draws=rejected,
        zero_excess=zero_excess,
        verdict=verdict,
        notes=notes,
    )


# --------------------------------------------------------------------- suite


@dataclass
class SuiteReport:
    results: list[VerificationReport]

    @property
    def counts(self) -> dict[str, int]:
        c = {"verified": 0, "falsified": 0, "inconclusive": 0}
        for r in self.results:
            c[r.verdict] += 1
        return c

    @property
    def exit_code(self) -> int:
        c = self.counts
        if c["falsified"]:
            return 1
        if c["inconclusive"]:
            return 2
        return 0

    def to_dict(self) -> dict:
        return {
            "results": [r.to_dict() for r in self.results],
            "summary": self.counts,
            "exit_code": self.exit_code,
        }


def run_suite(
    ctxs: list[Context] | None = None, params: VerifyParams = VerifyParams()
) -> SuiteReport:
    """Verify every catalog entry over every context; errors propagate per entry."""
    if ctxs is None:
        ctxs = default_contexts()
    results = []
    for spec in builtin_catalog():
        for ctx in ctxs:
            try:
                results.append(verify(spec, ctx, params))
            except QPVerifyError as exc:
                results.append(
                    VerificationReport(
                        identity=spec.name,
                        context=_context_dict(ctx),
                        multipliers=[],
                        predicted_n=None,
                        zeros=[],
                        samples=params.samples,
                        seed=params.seed,
                        max_rel_residual=None,
                        rejected_draws=0,
                        zero_excess=False,
                        verdict="inconclusive",
                        notes=[f"error: {exc}"],
                    )
                )
    return SuiteReport(results)


# ----------------------------------------------------------------- mutations


@dataclass(frozen=True)
class Mutation:
    label: str
    spec: IdentitySpec
    flip_relation: int | None = None


def mutations(spec: IdentitySpec) -> list[Mutation]:
    """Every single-sign mutation of the entry (one per term or relation)."""
    out = []
    if spec.kind == "expr":
        e = spec.expr()
        for i, t in enumerate(e.terms):
            terms = list(e.terms)
            terms[i] = Term(t.coeff * QQi.of(-1), t.factors)
            mutated = Expr(tuple(terms), e.variable, e.parameters)
            out.append(
                Mutation(
                    f"{spec.name}:term{i}-sign",
                    IdentitySpec(
                        name=f"{spec.name}[term{i}-flipped]",
                        family=spec.family,
                        kind="expr",
                        variable=spec.variable,
                        parameters=spec.parameters,
                        generators=spec.generators,
                        candidates=(),
                        exclusions=spec.exclusions,
                        expected_n=spec.expected_n,
                        default_tol=spec.default_tol,
                        expr_override=mutated,
                    ),
                )
            )
    else:
        for i, rel in enumerate(spec.relations):
            out.append(Mutation(f"{spec.name}:{rel.name}-sign", spec, flip_relation=i))
    return out


def mutation_sweep(
    ctx: Context | None = None, params: VerifyParams = VerifyParams(samples=60)
) -> list[tuple[str, str]]:
    """(mutation label, verdict) for every single-sign mutation of every entry."""
    if ctx is None:
        ctx = default_contexts()[0]
    out = []
    for spec in builtin_catalog():
        for mut in mutations(spec):
            report = verify(mut.spec, ctx, params, _flip_relation=mut.flip_relation)
            out.append((mut.label, report.verdict))
    return out


# -------------------------------------------------------- expression helpers


@dataclass
class ZeroSearchResult:
    base: complex
    winding: int
    min_abs_on_boundary: float
    max_phase_step: float
    samples_used: int
    zeros: list[tuple[complex, int]]

    def to_dict(self) -> dict:
        return {
            "base": _cnum(self.base),
            "winding": self.winding,
            "certificate": {
                "min_abs_on_boundary": self.min_abs_on_boundary,
                "max_phase_step": self.max_phase_step,
                "samples_used": self.samples_used,
            },
            "zeros": [{"zero": _cnum(z), "multiplicity": m} for z, m in self.zeros],
        }


def locate_expression_zeros(
    e: Expr,
    bindings: Mapping[str, complex],
    ctx: Context,
    gen1: str,
    gen2: str,
    base: complex | None = None,
    seed: int = 1,
    tol: float = 1e-8,
    opts: WindingOptions = WindingOptions(),
) -> ZeroSearchResult:
    """Count and locate the zeros of an expression in one period cell.

    `base=None` picks an admissible base deterministically from the seed;
    the absolute floor passed to the base search flags expressions that are
    numerically identically zero (verified identities have no zeros to
    count).
    """
    l1 = _period_value(gen1, ctx)
    l2 = _period_value(gen2, ctx)
    var = e.variable

    def f(z: complex) -> complex:
        b = dict(bindings)
        b[var] = z
        return eval_expr(e, b, ctx).value

    center_scale = eval_expr(e, {**bindings, var: 0.31 * l1 + 0.23 * l2}, ctx).scale
    if base is None:
        base = choose_admissible_base(f, l1, l2, seed, abs_floor=1e-9 * center_scale)
    cell = Parallelogram(base, l1, l2)
    cert = winding_count(f, cell, opts)
    located = locate_zeros(f, cell, cert.winding, tol, opts)
    return ZeroSearchResult(
        base=base,
        winding=cert.winding,
        min_abs_on_boundary=cert.min_abs_on_boundary,
        max_phase_step=cert.max_phase_step,
        samples_used=cert.samples_used,
        zeros=[(z.zero, z.multiplicity) for z in located],
    )
