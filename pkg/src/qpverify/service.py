"""HTTP verification service wrapping the core package.

Endpoints mirror the CLI subcommands; complex numbers travel as [re, im]
pairs (string literals like "0.5+1.2i" are accepted on input).  Reports use
the same JSON schema the CLI writes with --json.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .catalog import IdentitySpec, builtin_catalog, catalog_entry
from .complexfmt import parse_complex
from .dsl import eval_expr, parse, require_single_family
from .errors import BudgetExceededError, NoAdmissibleBaseError, QPVerifyError
from .lattice import lattice_new
from .theta import TauNome
from .verifier import VerifyParams, locate_expression_zeros, run_suite, verify

ComplexIn = float | str | list[float] | tuple[float, float]


class ContextIn(BaseModel):
    """Either both half-periods, or tau alone for theta-only work."""

    omega1: ComplexIn | None = None
    omega3: ComplexIn | None = None
    tau: ComplexIn | None = None

    def resolve(self):
        if self.tau is not None:
            if self.omega1 is not None or self.omega3 is not None:
                raise QPVerifyError("give either tau or omega1/omega3, not both")
            return TauNome.from_tau(parse_complex(self.tau))
        if self.omega1 is None or self.omega3 is None:
            raise QPVerifyError("context requires tau or both omega1 and omega3")
        return lattice_new(parse_complex(self.omega1), parse_complex(self.omega3))


class EvalRequest(BaseModel):
    expr: str
    variable: str = "z"
    context: ContextIn
    bindings: dict[str, ComplexIn] = Field(default_factory=dict)


class EvalResponse(BaseModel):
    value: list[float]
    scale: float


class VerifyRequest(BaseModel):
    builtin: str | None = None
    expr: str | None = None
    variable: str = "z"
    gen1: str | None = None
    gen2: str | None = None
    candidates: list[str] = Field(default_factory=list)
    context: ContextIn
    seed: int = 42
    samples: int = 200
    tol: float | None = None


class ZerosRequest(BaseModel):
    expr: str
    variable: str = "z"
    gen1: str
    gen2: str
    base: ComplexIn | None = None  # None means automatic base selection
    bindings: dict[str, ComplexIn] = Field(default_factory=dict)
    context: ContextIn
    seed: int = 1
    tol: float = 1e-8


class SuiteRequest(BaseModel):
    contexts: list[ContextIn] = Field(default_factory=list)
    seed: int = 42
    samples: int = 200


class CatalogEntryOut(BaseModel):
    name: str
    family: str
    kind: str
    generators: tuple[str, str] | None
    candidates: list[str]
    relations: int
    expected_n: int | None


def _http_error(exc: QPVerifyError, code: int = 422) -> HTTPException:
    return HTTPException(status_code=code, detail=str(exc))


def create_app() -> FastAPI:
    app = FastAPI(
        title="qpverify",
        description=(
            "Evaluation of Weierstrass sigma / Jacobi theta functions and "
            "machine verification of quasi-periodic functional equations"
        ),
    )

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    @app.get("/catalog", response_model=list[CatalogEntryOut])
    def catalog() -> list[CatalogEntryOut]:
        return [
            CatalogEntryOut(
                name=s.name,
                family=s.family,
                kind=s.kind,
                generators=s.generators,
                candidates=list(s.candidates),
                relations=len(s.relations),
                expected_n=s.expected_n,
            )
            for s in builtin_catalog()
        ]

    @app.post("/eval", response_model=EvalResponse)
    def eval_endpoint(req: EvalRequest) -> EvalResponse:
        try:
            ctx = req.context.resolve()
            e = parse(req.expr, variable=req.variable)
            bindings = {k: parse_complex(v) for k, v in req.bindings.items()}
            r = eval_expr(e, bindings, ctx)
        except QPVerifyError as exc:
            raise _http_error(exc)
        return EvalResponse(value=[r.value.real, r.value.imag], scale=r.scale)

    @app.post("/verify")
    def verify_endpoint(req: VerifyRequest) -> dict[str, Any]:
        try:
            ctx = req.context.resolve()
            if req.builtin is not None:
                spec = catalog_entry(req.builtin)
            else:
                if req.expr is None or req.gen1 is None or req.gen2 is None:
                    raise QPVerifyError("expr verification needs expr, gen1 and gen2")
                e = parse(req.expr, variable=req.variable)
                spec = IdentitySpec(
                    name="user-expr",
                    family=require_single_family(e),
                    kind="expr",
                    dsl=req.expr,
                    variable=req.variable,
                    parameters=e.parameters,
                    generators=(req.gen1, req.gen2),
                    candidates=tuple(req.candidates),
                )
            report = verify(spec, ctx, VerifyParams(seed=req.seed, samples=req.samples, tol=req.tol))
        except QPVerifyError as exc:
            raise _http_error(exc)
        return report.to_dict()

    @app.post("/zeros")
    def zeros_endpoint(req: ZerosRequest) -> dict[str, Any]:
        try:
            ctx = req.context.resolve()
            e = parse(req.expr, variable=req.variable)
            bindings = {k: parse_complex(v) for k, v in req.bindings.items()}
            base = None if req.base is None else parse_complex(req.base)
            result = locate_expression_zeros(
                e, bindings, ctx, req.gen1, req.gen2, base=base, seed=req.seed, tol=req.tol
            )
        except (NoAdmissibleBaseError, BudgetExceededError) as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except QPVerifyError as exc:
            raise _http_error(exc)
        return result.to_dict()

    @app.post("/suite")
    def suite_endpoint(req: SuiteRequest) -> dict[str, Any]:
        try:
            ctxs = [c.resolve() for c in req.contexts] or None
            report = run_suite(ctxs, VerifyParams(seed=req.seed, samples=req.samples))
        except QPVerifyError as exc:
            raise _http_error(exc)
        return report.to_dict()

    return app


app = create_app()
