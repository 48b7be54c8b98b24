"""Command-line interface: a thin client over the verification core.

Subcommands: eval, verify, zeros, suite, serve.
Exit codes: 0 verified/ok, 1 falsified, 2 inconclusive, 3 usage or domain
error.
"""

from __future__ import annotations

import sys

import click

from .catalog import IdentitySpec, builtin_catalog, catalog_entry
from .complexfmt import format_complex, parse_complex
from .dsl import eval_expr, parse, require_single_family
from .errors import BudgetExceededError, NoAdmissibleBaseError, QPVerifyError
from .lattice import lattice_new
from .theta import TauNome
from .verifier import (
    VerifyParams,
    locate_expression_zeros,
    run_suite,
    to_json,
    verify,
)

_VERDICT_EXIT = {"verified": 0, "falsified": 1, "inconclusive": 2}


def _fail(message: str) -> "NoReturn":  # noqa: F821 - doc only
    click.echo(f"error: {message}", err=True)
    sys.exit(3)


def _context(tau: str | None, omega1: str | None, omega3: str | None):
    try:
        if tau is not None:
            if omega1 or omega3:
                _fail("give either --tau or --omega1/--omega3, not both")
            return TauNome.from_tau(parse_complex(tau))
        if omega1 is None or omega3 is None:
            _fail("a context is required: --tau <c> or --omega1 <c> --omega3 <c>")
        return lattice_new(parse_complex(omega1), parse_complex(omega3))
    except QPVerifyError as exc:
        _fail(str(exc))


def _bindings(pairs: tuple[str, ...]) -> dict[str, complex]:
    out = {}
    for item in pairs:
        if "=" not in item:
            _fail(f"--bind needs <sym>=<complex>, got {item!r}")
        sym, _, val = item.partition("=")
        try:
            out[sym.strip()] = parse_complex(val)
        except QPVerifyError as exc:
            _fail(str(exc))
    return out


@click.group()
def main():
    """Evaluate sigma/theta expressions and verify quasi-periodic identities."""


@main.command("eval")
@click.option("--expr", "expr_text", required=True, help="expression in the DSL")
@click.option("--var", "variable", default="z", show_default=True)
@click.option("--tau", default=None, help="upper-half-plane tau (theta-only context)")
@click.option("--omega1", default=None, help="half-period omega1")
@click.option("--omega3", default=None, help="half-period omega3")
@click.option("--bind", "binds", multiple=True, help="symbol binding <sym>=<complex>")
def eval_cmd(expr_text, variable, tau, omega1, omega3, binds):
    """Evaluate an expression; prints its value and the max-|term| scale."""
    ctx = _context(tau, omega1, omega3)
    try:
        e = parse(expr_text, variable=variable)
        r = eval_expr(e, _bindings(binds), ctx)
    except QPVerifyError as exc:
        _fail(str(exc))
    click.echo(f"value = {format_complex(r.value)}")
    click.echo(f"scale = {r.scale!r}")


@main.command("verify")
@click.option("--builtin", default=None, help="name of a built-in identity")
@click.option("--expr", "expr_text", default=None, help="candidate identity in the DSL")
@click.option("--var", "variable", default="z", show_default=True)
@click.option("--gen1", default=None, help="first generator token (2w1/4w1/pi)")
@click.option("--gen2", default=None, help="second generator token (2w3/4w3/pitau)")
@click.option("--candidate", "candidates", multiple=True, help="candidate zero (linear form)")
@click.option("--tau", default=None)
@click.option("--omega1", default=None)
@click.option("--omega3", default=None)
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--samples", default=200, show_default=True, type=int)
@click.option("--tol", default=None, type=float, help="relative residual tolerance")
@click.option("--json", "json_path", default=None, type=click.Path(), help="write the JSON report here")
def verify_cmd(builtin, expr_text, variable, gen1, gen2, candidates, tau, omega1, omega3, seed, samples, tol, json_path):
    """Verify one identity; exit code encodes the verdict."""
    ctx = _context(tau, omega1, omega3)
    try:
        if builtin is not None:
            if expr_text is not None:
                _fail("give either --builtin or --expr, not both")
            spec = catalog_entry(builtin)
        else:
            if expr_text is None or gen1 is None or gen2 is None:
                _fail("--expr needs --gen1 and --gen2 (or use --builtin <name>)")
            e = parse(expr_text, variable=variable)
            spec = IdentitySpec(
                name="user-expr",
                family=require_single_family(e),
                kind="expr",
                dsl=expr_text,
                variable=variable,
                parameters=e.parameters,
                generators=(gen1, gen2),
                candidates=tuple(candidates),
            )
        report = verify(spec, ctx, VerifyParams(seed=seed, samples=samples, tol=tol))
    except QPVerifyError as exc:
        _fail(str(exc))
    payload = to_json(report.to_dict())
    if json_path:
        with open(json_path, "w") as fh:
            fh.write(payload + "\n")
    click.echo(f"identity   : {report.identity}")
    for m in report.multipliers:
        click.echo(f"multiplier : {m.generator}: alpha={m.alpha} beta={m.beta} matched={m.matched}")
    if report.predicted_n is not None:
        click.echo(f"predicted_N: {report.predicted_n}")
    for z in report.zeros:
        click.echo(f"zero       : {z.candidate}: symbolic={z.symbolic} residual={z.residual:.3e}")
    click.echo(f"residual   : max_rel={report.max_rel_residual:.3e} over {report.samples} samples (seed {report.seed})")
    click.echo(f"zero_excess: {report.zero_excess}")
    for note in report.notes:
        click.echo(f"note       : {note}")
    click.echo(f"verdict    : {report.verdict}")
    sys.exit(_VERDICT_EXIT[report.verdict])


@main.command("zeros")
@click.option("--expr", "expr_text", required=True)
@click.option("--var", "variable", default="z", show_default=True)
@click.option("--base", default="auto", show_default=True, help="'auto' or a complex base point")
@click.option("--gen1", required=True)
@click.option("--gen2", required=True)
@click.option("--bind", "binds", multiple=True)
@click.option("--tau", default=None)
@click.option("--omega1", default=None)
@click.option("--omega3", default=None)
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--tol", default=1e-8, show_default=True, type=float)
@click.option("--json", "json_path", default=None, type=click.Path())
def zeros_cmd(expr_text, variable, base, gen1, gen2, binds, tau, omega1, omega3, seed, tol, json_path):
    """Winding count and located zeros of an expression over one period cell."""
    ctx = _context(tau, omega1, omega3)
    try:
        e = parse(expr_text, variable=variable)
        base_pt = None if base == "auto" else parse_complex(base)
        result = locate_expression_zeros(
            e, _bindings(binds), ctx, gen1, gen2, base=base_pt, seed=seed, tol=tol
        )
    except NoAdmissibleBaseError as exc:
        click.echo(f"inconclusive: {exc}", err=True)
        sys.exit(2)
    except BudgetExceededError as exc:
        click.echo(f"inconclusive: {exc}", err=True)
        sys.exit(2)
    except QPVerifyError as exc:
        _fail(str(exc))
    if json_path:
        with open(json_path, "w") as fh:
            fh.write(to_json(result.to_dict()) + "\n")
    click.echo(f"base    : {format_complex(result.base)}")
    click.echo(f"winding : {result.winding}")
    for z, m in result.zeros:
        click.echo(f"zero    : {format_complex(z)} (multiplicity {m})")
    sys.exit(0)


@main.command("suite")
@click.option("--ctx", "ctxs", multiple=True, help="lattice context '<omega1>,<omega3>'")
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--samples", default=200, show_default=True, type=int)
@click.option("--json", "json_path", default=None, type=click.Path())
def suite_cmd(ctxs, seed, samples, json_path):
    """Verify every built-in identity over every context."""
    try:
        if ctxs:
            contexts = []
            for item in ctxs:
                left, _, right = item.partition(",")
                if not right:
                    _fail(f"--ctx needs '<omega1>,<omega3>', got {item!r}")
                contexts.append(lattice_new(parse_complex(left), parse_complex(right)))
        else:
            contexts = None
        report = run_suite(contexts, VerifyParams(seed=seed, samples=samples))
    except QPVerifyError as exc:
        _fail(str(exc))
    if json_path:
        with open(json_path, "w") as fh:
            fh.write(to_json(report.to_dict()) + "\n")
    for r in report.results:
        tau = r.context.get("tau")
        tag = format_complex(complex(tau[0], tau[1])) if tau else "?"
        rel = "n/a" if r.max_rel_residual is None else f"{r.max_rel_residual:.2e}"
        click.echo(f"{r.verdict:12s} {r.identity:28s} tau={tag} max_rel={rel}")
    counts = report.counts
    click.echo(
        f"summary: {counts['verified']} verified, {counts['falsified']} falsified, "
        f"{counts['inconclusive']} inconclusive"
    )
    sys.exit(report.exit_code)


@main.command("catalog")
def catalog_cmd():
    """List the built-in identity catalog."""
    for spec in builtin_catalog():
        extra = f" N={spec.expected_n}" if spec.expected_n is not None else ""
        kind = spec.kind if spec.kind == "expr" else f"relations[{len(spec.relations)}]"
        click.echo(f"{spec.name:28s} {spec.family:6s} {kind}{extra}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve_cmd(host, port):
    """Run the HTTP verification service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
