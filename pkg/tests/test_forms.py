import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import literal_form
from realroot.errors import ImaginaryResidueError, RealRootError, SchemaError, ZeroPolynomialError
from realroot.forms import (
    MAdicForm,
    build_form_exact,
    build_form_from_roots,
    compositions,
    evaluate,
    evaluate_batch,
    evaluate_via_powers,
    form_from_json,
    form_to_json,
    form_to_text,
    max_coefficient_discrepancy,
    monomial_table,
    root_route_magnitudes,
)
from realroot.harness import CorpusSpec, generate_corpus
from realroot.poly import Polynomial, RootSpectrum, numeric_roots, parse_polynomial, spectrum_from_roots

T2M1 = parse_polynomial("-1,0,1")
T2P = parse_polynomial("1,1,1")


def test_monomial_table_counts():
    for n in range(1, 6):
        for m in range(0, 6):
            table = monomial_table(n, m)
            assert len(table) == math.comb(n + m - 1, m)
            assert sum(mult for _, mult, _ in table) == n**m
    assert list(compositions(2, 2)) == [(2, 0), (1, 1), (0, 2)]


# ---------------------------------------------------------------- exact route


def test_build_exact_examples():
    assert build_form_exact(T2M1, 2).terms == {(2, 0): 2, (0, 2): 2}
    assert build_form_exact(T2P, 4).terms == {(4, 0): 2, (3, 1): -4, (2, 2): -6, (1, 3): 8, (0, 4): -1}
    for c in (-5, 0, Fraction(7, 3)):
        for m in (1, 2, 5):
            assert build_form_exact(Polynomial([-c, 1]), m).terms == {(m,): 1}


def test_build_exact_errors():
    with pytest.raises(ZeroPolynomialError):
        build_form_exact(Polynomial([]), 2)
    with pytest.raises(RealRootError):
        build_form_exact(T2M1, 0)


@pytest.mark.parametrize("roots", [[1, -1], [2, 2, -1], [0, 3, Fraction(1, 2)], [1, 1, 1, -2]])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_exact_route_equals_literal_sum(roots, m):
    f = Polynomial.from_roots(roots)
    expected = literal_form([Fraction(r) for r in roots], m, len(roots))
    assert build_form_exact(f, m).terms == expected


def test_exact_route_complex_roots_against_literal_sum():
    f = parse_polynomial("1,2,1,2")  # (t^2 + 1)(2t + 1)
    roots = [1j, -1j, -0.5]
    for m in (2, 3, 4):
        expected = literal_form(roots, m, 3)
        got = build_form_exact(f, m)
        for alpha in set(expected) | set(got.terms):
            assert float(got.coeff(alpha)) == pytest.approx(expected.get(alpha, 0).real, abs=1e-12)


def test_structure_of_constructed_forms():
    for f in generate_corpus(CorpusSpec(40, (1, 5), seed=9)):
        for m in (1, 2, 3, 4):
            form = build_form_exact(f, m)
            assert form.nvars == f.degree
            assert all(len(a) == f.degree and sum(a) == m for a in form.terms)
            assert all(c != 0 for c in form.terms.values())


# ----------------------------------------------------------------- root route


def test_build_from_roots_examples():
    form = build_form_from_roots(numeric_roots(T2M1), 2)
    assert form.terms == {(2, 0): 2, (0, 2): 2}

    form = build_form_from_roots(numeric_roots(T2P), 1)
    assert form.field == "double"
    assert form.coeff((1, 0)) == pytest.approx(2, abs=1e-14)
    assert form.coeff((0, 1)) == pytest.approx(-1, abs=1e-14)

    # oracle: 2 (x1 + x2)^2 expanded by the literal sum with the root 1 twice
    expected = literal_form([1, 1], 2, 2)
    assert expected == {(2, 0): 2, (1, 1): 4, (0, 2): 2}
    assert build_form_from_roots(spectrum_from_roots([(1, 2)]), 2).terms == expected


def test_build_from_roots_rejects_broken_symmetry():
    broken = RootSpectrum(((1j, 1), (-1j + 1e-3, 1)), 0.0, (None, None))
    with pytest.raises(ImaginaryResidueError):
        build_form_from_roots(broken, 3)
    with pytest.raises(RealRootError):
        build_form_from_roots(RootSpectrum((), 0.0), 2)


def test_routes_agree_on_small_corpus():
    for f in generate_corpus(CorpusSpec(60, (1, 6), seed=21)):
        sp = numeric_roots(f)
        for m in range(1, 7):
            exact = build_form_exact(f, m)
            root = build_form_from_roots(sp, m)
            if sp.is_exact:
                assert root == exact
            else:
                assert max_coefficient_discrepancy(root, exact, root_route_magnitudes(sp, m)) <= 1e-8


# ----------------------------------------------------------------- evaluation


def test_evaluate_examples():
    phi2 = build_form_exact(T2M1, 2)
    assert evaluate(phi2, [1, 1]) == 4
    assert evaluate(phi2, [Fraction(1, 2), Fraction(-1, 3)]) == Fraction(13, 18)
    for f in (T2M1, T2P, Polynomial.from_roots([1, 2, 3])):
        for m in (1, 2, 3):
            form = build_form_exact(f, m)
            assert evaluate(form, [0] * form.nvars) == 0
    s3 = math.sqrt(3)
    assert evaluate(build_form_exact(T2P, 2), [1 / s3, 2 / s3]) == pytest.approx(-2, abs=1e-14)


def test_evaluate_types_and_errors():
    phi = build_form_exact(T2P, 3)
    assert isinstance(evaluate(phi, [1, Fraction(2, 3)]), Fraction)
    assert isinstance(evaluate(phi, [1.0, 0.5]), float)
    with pytest.raises(RealRootError):
        evaluate(phi, [1, 2, 3])


def test_evaluate_batch_matches_scalar():
    phi = build_form_exact(Polynomial.from_roots([1, -2, 3, 0]), 4)
    xs = [[0.3, -1.2, 0.5, 2.0], [1.0, 0.0, 0.0, -1.0]]
    got = evaluate_batch(phi, xs)
    for row, v in zip(xs, got):
        assert v == pytest.approx(evaluate(phi, row), rel=1e-12)


def test_evaluate_via_powers_examples():
    sp = numeric_roots(T2M1)
    assert evaluate_via_powers(sp, [0, 1], 2).value == 2
    assert evaluate_via_powers(sp, [1, 1], 2).value == 4
    # p = 1, so the value is p_0 = n = 2; direct substitution into Phi_3
    assert evaluate(build_form_exact(T2P, 3), [1, 0]) == 2
    r = evaluate_via_powers(numeric_roots(T2P), [1, 0], 3)
    assert r.value == pytest.approx(2, abs=1e-14)
    assert r.imag_residue <= 1e-14


def test_evaluate_via_powers_errors():
    broken = RootSpectrum(((1j, 1), (-1j + 1e-3, 1)), 0.0, (None, None))
    with pytest.raises(ImaginaryResidueError):
        evaluate_via_powers(broken, [0, 1], 3)
    with pytest.raises(RealRootError):
        evaluate_via_powers(numeric_roots(T2M1), [1], 2)


def test_power_route_identity_on_random_points():
    rng = random.Random(2)
    for f in generate_corpus(CorpusSpec(25, (1, 6), seed=4)):
        sp = numeric_roots(f)
        for m in (1, 2, 3, 4, 5, 6):
            form = build_form_exact(f, m)
            for _ in range(20):
                x = [Fraction(rng.randint(-10, 10), rng.randint(1, 10)) for _ in range(f.degree)]
                direct = float(evaluate(form, x))
                via = evaluate_via_powers(sp, x, m)
                # absolute floor for points where every p(lambda) nearly vanishes
                assert abs(direct - via.value) <= 1e-6 * max(abs(direct), via.magnitude) + 1e-12


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(-5, 5), min_size=1, max_size=5),
    st.integers(1, 6),
    st.fractions(min_value=-5, max_value=5, max_denominator=7),
    st.data(),
)
def test_homogeneity(roots, m, s, data):
    form = build_form_exact(Polynomial.from_roots(roots) * Polynomial([1, 0, 1]), m)
    x = [data.draw(st.fractions(min_value=-3, max_value=3, max_denominator=5)) for _ in range(form.nvars)]
    assert evaluate(form, [s * v for v in x]) == s**m * evaluate(form, x)


# -------------------------------------------------------------- serialization


def test_json_round_trip():
    for form in (build_form_exact(T2M1, 2), build_form_exact(parse_polynomial("1/2,3,-2,5"), 4)):
        text = form_to_json(form)
        back = form_from_json(text)
        assert back == form
        assert form_to_json(back) == text
    dbl = build_form_from_roots(numeric_roots(T2P), 3)
    assert form_from_json(form_to_json(dbl)) == dbl


def test_json_schema_details():
    doc = json.loads(form_to_json(build_form_exact(T2P, 2)))
    assert doc["nvars"] == 2 and doc["degree"] == 2 and doc["coefficient_field"] == "rational"
    assert [t["exponents"] for t in doc["terms"]] == [[0, 2], [1, 1], [2, 0]]
    assert [t["coeff"] for t in doc["terms"]] == ["-1", "-2", "2"]
    empty = MAdicForm(2, 2, {})
    assert json.loads(form_to_json(empty))["terms"] == []
    assert form_from_json(form_to_json(empty)) == empty


@pytest.mark.parametrize(
    "doc",
    [
        {"nvars": 2, "degree": 2, "terms": [{"exponents": [2, 1], "coeff": "1"}]},
        {"nvars": 2, "degree": 2, "terms": [{"exponents": [2], "coeff": "1"}]},
        {"nvars": 2, "degree": 2, "terms": [{"exponents": [3, -1], "coeff": "1"}]},
        {"nvars": 2, "degree": 2, "terms": [{"exponents": [1, 1], "coeff": "x"}]},
        {"nvars": 2, "degree": 2, "coefficient_field": "complex", "terms": []},
        {"nvars": 2, "terms": []},
        {"nvars": 2, "degree": 2, "terms": [{"exponents": [1, 1], "coeff": "1"}, {"exponents": [1, 1], "coeff": "2"}]},
    ],
)
def test_json_schema_violations(doc):
    with pytest.raises(SchemaError):
        form_from_json(json.dumps(doc))


def test_text_format():
    assert form_to_text(build_form_exact(T2P, 4)) == "2x1^4 - 4x1^3x2 - 6x1^2x2^2 + 8x1x2^3 - x2^4"
    assert form_to_text(MAdicForm(2, 2, {(0, 2): -1, (1, 1): Fraction(1, 2)})) == "(1/2)x1x2 - x2^2"
    assert form_to_text(MAdicForm(1, 3, {})) == "0"
