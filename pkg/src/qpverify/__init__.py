"""qpverify: verified numerics for quasi-periodic entire functions.

Evaluates Weierstrass sigma and Jacobi theta functions, infers exact
quasi-periodicity multipliers for expressions built from them, converts a
multiplier pair into an exact zero count, corroborates the count by contour
winding numbers, and bundles everything into an identity verifier with a
CLI and an HTTP service.
"""

from .catalog import IdentitySpec, RelationCheck, builtin_catalog, catalog_entry
from .contour import (
    LocatedZero,
    Parallelogram,
    WindingCertificate,
    WindingOptions,
    choose_admissible_base,
    locate_zeros,
    winding_count,
)
from .dsl import (
    EvalResult,
    Expr,
    Factor,
    Term,
    eval_expr,
    parity_normalize,
    parse,
    parse_linear_form,
    print_expr,
    substitute,
)
from .errors import QPVerifyError
from .lattice import EjDifference, Lattice, e_diff, e_values, lattice_new, wp_eval
from .qp import (
    Multiplier,
    check_zero_symbolic,
    expr_multiplier,
    predicted_zero_count,
    term_multiplier,
)
from .sigma import (
    eta_product_oracle,
    sigma_aux_consistency,
    sigma_eval,
    sigma_product_oracle,
)
from .theta import (
    ExactMultiplier,
    Nullwerte,
    TauNome,
    half_period_rewrite,
    lemma1_multiplier,
    reduce_argument,
    theta_eval,
    theta_nullwerte,
    theta_series,
)
from .verifier import (
    VerificationReport,
    VerifyParams,
    default_contexts,
    locate_expression_zeros,
    mutation_sweep,
    mutations,
    run_suite,
    to_json,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "EjDifference",
    "EvalResult",
    "ExactMultiplier",
    "Expr",
    "Factor",
    "IdentitySpec",
    "Lattice",
    "LocatedZero",
    "Multiplier",
    "Nullwerte",
    "Parallelogram",
    "QPVerifyError",
    "RelationCheck",
    "TauNome",
    "Term",
    "VerificationReport",
    "VerifyParams",
    "WindingCertificate",
    "WindingOptions",
    "builtin_catalog",
    "catalog_entry",
    "check_zero_symbolic",
    "choose_admissible_base",
    "default_contexts",
    "e_diff",
    "e_values",
    "eta_product_oracle",
    "eval_expr",
    "expr_multiplier",
    "half_period_rewrite",
    "lattice_new",
    "lemma1_multiplier",
    "locate_expression_zeros",
    "locate_zeros",
    "mutation_sweep",
    "mutations",
    "parity_normalize",
    "parse",
    "parse_linear_form",
    "predicted_zero_count",
    "print_expr",
    "reduce_argument",
    "run_suite",
    "sigma_aux_consistency",
    "sigma_eval",
    "sigma_product_oracle",
    "substitute",
    "term_multiplier",
    "theta_eval",
    "theta_nullwerte",
    "theta_series",
    "to_json",
    "verify",
    "wp_eval",
    "winding_count",
]
