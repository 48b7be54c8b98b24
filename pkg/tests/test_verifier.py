import json
import math

import pytest

from qpverify import (
    IdentitySpec,
    VerifyParams,
    builtin_catalog,
    catalog_entry,
    lattice_new,
    mutations,
    run_suite,
    to_json,
    verify,
)
from qpverify.errors import DomainError
from qpverify.verifier import locate_expression_zeros
from qpverify.dsl import parse


def test_catalog_contents():
    cat = builtin_catalog()
    names = [s.name for s in cat]
    assert len(cat) >= 10
    assert names == [
        "weierstrass-3term",
        "weierstrass-fundamental",
        "sigma-mixed",
        "jacobi-add-theta3",
        "jacobi-add-mixed",
        "jacobi-fundamental",
        "legendre-relation",
        "lemma1-qp",
        "lemma2-transforms",
        "sigma-theta-transforms",
    ]
    assert catalog_entry("weierstrass-3term").expected_n == 2
    assert len(catalog_entry("lemma1-qp").relations) == 8
    assert len(catalog_entry("lemma2-transforms").relations) == 12
    assert len(catalog_entry("sigma-theta-transforms").relations) == 4


def test_jacobi_fundamental_shape():
    e = catalog_entry("jacobi-fundamental").expr()
    assert len(e.terms) == 5
    coeffs = sorted((t.coeff.re, t.coeff.im) for t in e.terms)
    assert [c[0] for c in coeffs] == [-1, -1, -1, 1, 2]


def test_verify_three_term_spec_example(lat_square):
    spec = catalog_entry("weierstrass-3term")
    report = verify(spec, lat_square, VerifyParams(seed=42, samples=200, tol=1e-10))
    assert report.verdict == "verified"
    assert report.predicted_n == 2
    assert len(report.zeros) == 3
    assert all(z.symbolic for z in report.zeros)
    assert report.zero_excess
    assert all(m.matched for m in report.multipliers)


def test_verify_legendre_relation(lattices):
    spec = catalog_entry("legendre-relation")
    for lat in lattices:
        report = verify(spec, lat, VerifyParams(samples=1))
        assert report.verdict == "verified"
        assert report.max_rel_residual < 1e-5


def test_verify_falsified_mutation(lat_square):
    spec = catalog_entry("weierstrass-3term")
    mut = mutations(spec)[0]
    report = verify(mut.spec, lat_square, VerifyParams(samples=40))
    assert report.verdict == "falsified"


def test_verify_user_expression_falsified(lat_square):
    spec = IdentitySpec(
        name="user-wrong",
        family="sigma",
        kind="expr",
        dsl="sigma(z+a)*sigma(z-a) + sigma(z+b)*sigma(z-b)",
        variable="z",
        parameters=("a", "b"),
        generators=("2w1", "2w3"),
    )
    report = verify(spec, lat_square, VerifyParams(samples=40))
    assert report.verdict == "falsified"
    # multipliers do match for this non-identity; the residual layer kills it
    assert all(m.matched for m in report.multipliers)
    assert report.max_rel_residual > 1e-3


def test_verify_user_mixed_sigma_variant_with_omega2(lat_square):
    """The (k,l) = (2,1) variant of the mixed sigma relation, including the
    omega_2 candidate, through the public entry point."""
    spec = IdentitySpec(
        name="sigma-mixed-21",
        family="sigma",
        kind="expr",
        dsl="sigma2(z)*sigma2(z) - sigma1(z)*sigma1(z) + ediff(2,1)*sigma(z)*sigma(z)",
        variable="z",
        parameters=(),
        generators=("2w1", "2w3"),
        candidates=("0", "w2", "w1"),
    )
    report = verify(spec, lat_square, VerifyParams(samples=40))
    assert report.verdict == "verified"
    assert report.predicted_n == 2
    assert all(z.symbolic for z in report.zeros)
    assert report.zero_excess


def test_verify_inconclusive_near_domain_edge():
    lat = lattice_new(math.pi / 2, (0.1 + 0.2j) * math.pi / 2)
    report = verify(catalog_entry("weierstrass-3term"), lat, VerifyParams(samples=30))
    assert report.verdict == "inconclusive"
    assert any("low-accuracy" in n for n in report.notes)


def test_zero_excess_flags(lattices):
    lat = lattices[0]
    expectations = {
        "weierstrass-3term": True,
        "sigma-mixed": True,
        "jacobi-add-theta3": True,
        "jacobi-add-mixed": True,
        "weierstrass-fundamental": False,
        "jacobi-fundamental": False,
    }
    for name, flag in expectations.items():
        report = verify(catalog_entry(name), lat, VerifyParams(samples=30))
        assert report.zero_excess == flag, name
        if not flag:
            assert any("zero_excess=false" in n for n in report.notes)


def test_suite_default_contexts_all_verified():
    suite = run_suite(params=VerifyParams(samples=30))
    assert suite.counts == {"verified": 30, "falsified": 0, "inconclusive": 0}
    assert suite.exit_code == 0


def test_suite_empty_contexts():
    suite = run_suite([], VerifyParams(samples=10))
    assert suite.results == []
    assert suite.exit_code == 0


def test_suite_with_mutated_entry_exits_one(lat_square):
    """A suite containing a falsified result must carry exit code 1."""
    from qpverify.verifier import SuiteReport

    good = verify(catalog_entry("sigma-mixed"), lat_square, VerifyParams(samples=20))
    mut = mutations(catalog_entry("sigma-mixed"))[0]
    bad = verify(mut.spec, lat_square, VerifyParams(samples=20))
    assert bad.verdict == "falsified"
    suite = SuiteReport([good, bad])
    assert suite.exit_code == 1
    assert suite.counts["falsified"] == 1


def test_report_json_deterministic(lattices):
    spec = catalog_entry("jacobi-add-mixed")
    a = to_json(verify(spec, lattices[1], VerifyParams(seed=9, samples=25)).to_dict())
    b = to_json(verify(spec, lattices[1], VerifyParams(seed=9, samples=25)).to_dict())
    assert a == b
    payload = json.loads(a)
    assert payload["identity"] == "jacobi-add-mixed"
    assert set(payload) == {
        "identity",
        "context",
        "multipliers",
        "predicted_N",
        "zeros",
        "residuals",
        "zero_excess",
        "verdict",
        "notes",
    }
    assert payload["predicted_N"] == {"num": 2, "den": 1}
    assert payload["residuals"]["seed"] == 9
    assert isinstance(payload["context"]["q"], list)


def test_mutations_cover_terms_and_relations():
    assert len(mutations(catalog_entry("weierstrass-3term"))) == 3
    assert len(mutations(catalog_entry("jacobi-fundamental"))) == 5
    assert len(mutations(catalog_entry("lemma2-transforms"))) == 12


def test_sigma_entry_requires_lattice():
    from qpverify import TauNome

    with pytest.raises(DomainError):
        verify(catalog_entry("weierstrass-3term"), TauNome.from_tau(1j), VerifyParams(samples=5))


def test_locate_expression_zeros_identity_detected(lat_square):
    from qpverify.errors import NoAdmissibleBaseError

    e = parse(catalog_entry("weierstrass-3term").dsl, variable="z")
    with pytest.raises(NoAdmissibleBaseError):
        locate_expression_zeros(
            e,
            {"a": 0.3 + 0.1j, "b": -0.2 + 0.25j, "c": 0.15 - 0.2j},
            lat_square,
            "2w1",
            "2w3",
            seed=5,
        )


def test_locate_expression_zeros_pair(lat_square):
    e = parse("sigma(z+a)*sigma(z-a)", variable="z")
    a = 0.3 * lat_square.omega1 + 0.2 * lat_square.omega3
    result = locate_expression_zeros(e, {"a": a}, lat_square, "2w1", "2w3", seed=3, tol=1e-7)
    assert result.winding == 2
    assert sorted(m for _, m in result.zeros) == [1, 1]
