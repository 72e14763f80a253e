"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import random
import time
from fractions import Fraction

import pytest

from oracles import parse_latex_binary_form
from realroot.cli import main
from realroot.forms import (
    build_form_exact,
    build_form_from_roots,
    evaluate,
    evaluate_via_powers,
    max_coefficient_discrepancy,
    root_route_magnitudes,
)
from realroot.harness import CorpusSpec, generate_corpus
from realroot.poly import numeric_roots, parse_polynomial, sturm_real_root_count
from realroot.psd import classify_real_rooted, estimate_min_on_sphere
from realroot.witness import negative_witness, psd_certificate, verify_certificate

GOLDEN = {
    "-1,0,1": [
        r"2x_1",
        r"2\left(  x_1^2+ x_2^2  \right)",
        r"2x_1 \left(  x_1^2+ 3 x_2^2  \right)",
        r"2 \left(   x_1^4 + 6 x_1^2  x_2^2 + x_2^4 \right)",
        r"2x_1 \left( x_1^4+ 10x_1^2 x_2^2+ 5x_2^4  \right)",
        r"2 \left(  x_1^6 + 15 x_1^4  x_2^2  + 15 x_1^2  x_2^4  + x_2^6 \right)",
    ],
    "1,1,1": [
        r"2x_1-x_2",
        r"2 x_1^2 - 2x_1x_2  - x_2^2",
        r"2x_1^3-3x_1^2x_2-3x_1x_2^2+2x_2^3",
        r"2x_1^4-4x_1^3x_2-6x_1^2x_2^2+8x_1x_2^3-x_2^4",
        r"2x_1^5-5x_1^4x_2-10x_1^3x_2^2+20x_1^2x_2^3-5x_1x_2^4-x_2^5",
        r"2x_1^6-6x_1^5x_2-15x_1^4x_2^2+40x_1^3x_2^3-15x_1^2x_2^4-6x_1x_2^5+2x_2^6",
    ],
}

MAIN_CORPUS = CorpusSpec(1000, (1, 8), (-9, 9), seed=0)
SMALL_CORPUS = CorpusSpec(300, (1, 6), (-9, 9), seed=1)


@pytest.fixture
def report(capsys):
    def emit(number, passed, detail):
        with capsys.disabled():
            print(f"\n[acceptance] criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")

    return emit


@pytest.fixture(scope="module")
def main_corpus():
    return generate_corpus(MAIN_CORPUS)


@pytest.fixture(scope="module")
def small_corpus():
    return [(f, numeric_roots(f)) for f in generate_corpus(SMALL_CORPUS)]


def test_criterion_1_golden_tables(report, capsys):
    t0 = time.perf_counter()
    bad = []
    for poly, table in GOLDEN.items():
        f = parse_polynomial(poly)
        for m, latex in enumerate(table, start=1):
            if build_form_exact(f, m).terms != parse_latex_binary_form(latex):
                bad.append((poly, m))
            # the CLI path prints the same form
            assert main(["form", poly, "--m", str(m), "--format", "json"]) == 0
    capsys.readouterr()
    elapsed = time.perf_counter() - t0
    passed = not bad and elapsed < 1.0
    report(1, passed, f"12 forms, {len(bad)} differ, {elapsed:.2f} s")
    assert not bad
    assert elapsed < 1.0


def test_criterion_2_dichotomy(report, main_corpus):
    t0 = time.perf_counter()
    mismatches = 0
    n_real = 0
    for f in main_corpus:
        real, total = sturm_real_root_count(f)
        hermite = classify_real_rooted(f)
        mismatches += hermite != (real == total)
        n_real += hermite
    elapsed = time.perf_counter() - t0
    passed = mismatches == 0 and elapsed < 60
    report(2, passed, f"{len(main_corpus)} polynomials, {n_real} real-rooted, {mismatches} mismatches, {elapsed:.1f} s")
    assert mismatches == 0
    assert elapsed < 60


def test_criterion_3_witness_value(report, main_corpus):
    cases = [f for f in main_corpus if not classify_real_rooted(f)]
    cases.append(parse_polynomial("1,0,1") ** 2)
    worst, failures, mu_two = 0.0, [], 0
    for f in cases:
        spectrum = numeric_roots(f)
        for m in (2, 4, 6, 8):
            w = negative_witness(f, m, spectrum=spectrum)
            # independent check: exact value of the exact form at the returned vector
            value = float(evaluate(build_form_exact(f, m), [Fraction(v) for v in w.x]))
            excess = abs(value + 2 * w.mu) / (1 + 2 * w.mu)
            worst = max(worst, excess)
            if not (value < 0 and excess <= 1e-6):
                failures.append((f.to_text(), m, value))
            mu_two += w.mu == 2
    last = negative_witness(cases[-1], 2)
    four = last.mu == 2 and abs(float(evaluate(build_form_exact(cases[-1], 2), [Fraction(v) for v in last.x])) + 4) <= 1e-6 * 5
    passed = not failures and four
    report(3, passed, f"{len(cases)} non-real-rooted x 4 values of m, max |value+2mu|/(1+2mu) = {worst:.2e}, mu=2 cases {mu_two}")
    assert not failures
    assert four


def test_criterion_4_route_equivalence(report, small_corpus):
    worst_rel, worst_abs, exact_cases, failures = 0.0, 0.0, 0, []
    for f, spectrum in small_corpus:
        for m in range(1, 7):
            exact = build_form_exact(f, m)
            root = build_form_from_roots(spectrum, m)
            if spectrum.is_exact:
                exact_cases += 1
                if root != exact:
                    failures.append((f.to_text(), m))
                continue
            rel = max_coefficient_discrepancy(root, exact, root_route_magnitudes(spectrum, m))
            worst_abs = max(worst_abs, max_coefficient_discrepancy(root, exact))
            worst_rel = max(worst_rel, rel)
            if rel > 1e-8:
                failures.append((f.to_text(), m))
    passed = not failures
    report(
        4,
        passed,
        f"{len(small_corpus)} polynomials x m=1..6, {exact_cases} exact-spectrum cases identical, "
        f"max scaled discrepancy {worst_rel:.2e} (max absolute {worst_abs:.2e})",
    )
    assert not failures


def test_criterion_5_psd_certificate(report, small_corpus):
    real = [(f, sp) for f, sp in small_corpus if classify_real_rooted(f)]
    worst_cert, lowest, failures = 0.0, float("inf"), []
    for i, (f, spectrum) in enumerate(real):
        for m in (2, 4, 6):
            cert = psd_certificate(f, m, spectrum=spectrum)
            check = verify_certificate(f, cert)
            worst_cert = max(worst_cert, check.residual)
            val, _ = estimate_min_on_sphere(build_form_exact(f, m), seed=i)
            lowest = min(lowest, val)
            if not check.passed or check.residual > 1e-8 or val < -1e-7:
                failures.append((f.to_text(), m, check.residual, val))
    passed = not failures
    report(5, passed, f"{len(real)} real-rooted x m in (2,4,6), max coefficient residual {worst_cert:.2e}, lowest sphere value {lowest:.3g}")
    assert not failures


def _abs_scale(spectrum, x, m):
    # sum_l mu_l (sum_j |x_j| |lambda_l|^j)^m: size of the cancelling terms, used where the exact value is 0
    return sum(mu * sum(abs(float(v)) * abs(z) ** j for j, v in enumerate(x)) ** m for z, mu in spectrum.distinct_roots)


def test_criterion_6_evaluation_identity(report, small_corpus):
    rng = random.Random(6)
    worst, count, failures = 0.0, 0, []
    for f, spectrum in small_corpus[:60]:
        for m in range(1, 7):
            form = build_form_exact(f, m)
            for _ in range(100):
                x = [Fraction(rng.randint(-20, 20), rng.randint(1, 20)) for _ in range(f.degree)]
                direct = float(evaluate(form, x))
                via = evaluate_via_powers(spectrum, x, m)
                if direct:
                    rel = abs(direct - via.value) / abs(direct)
                else:
                    scale = _abs_scale(spectrum, x, m)
                    rel = abs(via.value) / scale if scale else abs(via.value)
                worst = max(worst, rel)
                count += 1
                if rel > 1e-6:
                    failures.append((f.to_text(), m, x))
    passed = not failures
    report(6, passed, f"{count} points, max relative difference {worst:.2e}")
    assert not failures


def test_criterion_7_odd_antisymmetry(report, small_corpus):
    rng = random.Random(7)
    checked, failures = 0, []
    for f, _ in small_corpus[:100]:
        for m in (1, 3, 5, 7):
            form = build_form_exact(f, m)
            for _ in range(5):
                x = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(f.degree)]
                if evaluate(form, [-v for v in x]) != -evaluate(form, x):
                    failures.append((f.to_text(), m, x))
                checked += 1
    passed = not failures
    report(7, passed, f"{checked} exact evaluations")
    assert not failures
