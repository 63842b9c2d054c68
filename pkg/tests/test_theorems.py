import cmath
import json
import math

import numpy as np
import pytest

from entiredyn.corpus import corpus_pairs
from entiredyn.dynamics import CommutingPair
from entiredyn.theorems import (
    IdentityReport,
    PolynomialQ,
    check_commutativity,
    check_functional_equation,
    check_iterate_identity,
    check_q_hypothesis,
    check_q_recurrence,
    check_unimodular,
    eval_polynomial,
    geometric_sum_bound_check,
    sample_square,
    write_reports_json,
)

SAMPLES = sample_square(100, seed=42)


def consistent(report: IdentityReport, tol):
    assert report.samples_checked == report.passes + len(report.failures) + report.skipped_overflow
    assert all(err > tol for _, err in report.failures)


def test_samples_are_seeded():
    assert np.array_equal(sample_square(50, 7), sample_square(50, 7))
    assert not np.array_equal(sample_square(50, 7), sample_square(50, 8))
    z = sample_square(1000, 3)
    assert np.all(np.abs(z.real) <= 2) and np.all(np.abs(z.imag) <= 2)


def test_commutativity_odd_sine():
    r = check_commutativity("sin(z)", "-sin(z)", SAMPLES, 1e-12)
    assert r.max_relative_error <= 1e-12 and r.passed
    consistent(r, 1e-12)


def test_commutativity_reflected_sine():
    r = check_commutativity("1+sin(z-1)", "1-sin(z-1)", SAMPLES, 1e-12)
    assert r.max_relative_error <= 1e-12 and r.passed


def test_commutativity_sine_cosine_fails():
    # at z = 0: sin(cos 0) = sin 1 ~ 0.8415, cos(sin 0) = 1
    assert abs(math.sin(math.cos(0)) - math.cos(math.sin(0))) > 0.1
    r = check_commutativity("sin(z)", "cos(z)", np.array([0j]), 1e-8)
    assert r.failures and r.failures[0][1] == pytest.approx(
        (1 - math.sin(1)) / 2, rel=1e-12
    )
    r = check_commutativity("sin(z)", "cos(z)", SAMPLES, 1e-8)
    assert r.failures
    consistent(r, 1e-8)


def test_functional_equation_examples():
    assert check_functional_equation("1+sin(z-1)", -1, 2, SAMPLES, 1e-12).passed
    assert check_functional_equation("sin(z)", -1, 0, SAMPLES, 1e-12).passed
    # exp(-1) ~ 0.3679 against -exp(1)
    r = check_functional_equation("exp(z)", -1, 0, np.array([1 + 0j]), 1e-8)
    expected = abs(math.exp(-1) + math.e) / (1 + math.e)
    assert r.failures[0][1] == pytest.approx(expected, rel=1e-12)


def test_iterate_identity_examples():
    pair1 = CommutingPair("1+sin(z-1)", -1, 2, 1)
    assert check_iterate_identity(pair1, 6, SAMPLES, 1e-8).passed
    pair3 = CommutingPair("1+sin(z-1)", -1, 2, 3)
    assert check_iterate_identity(pair3, 4, SAMPLES, 1e-8).passed
    pair2 = CommutingPair("sin(z)", -1, 0, 2)
    r = check_iterate_identity(pair2, 1, np.array([0.3 + 0j]), 1e-14)
    assert pair2.g_function(0.3) == pytest.approx(-math.sin(math.sin(0.3)), abs=1e-16)
    assert r.passed and r.max_relative_error == 0


def test_iterate_identity_detects_a_wrong_partner():
    # f = exp, g = -exp does not commute; the closed form breaks at n = 2
    r = check_iterate_identity(CommutingPair("exp(z)", -1, 0, 1), 3, SAMPLES, 1e-8)
    assert r.failures
    consistent(r, 1e-8)


def test_overflowing_samples_are_skipped():
    r = check_commutativity("exp(z)", "exp(z)", np.array([0j, 800 + 0j]), 1e-8)
    assert r.skipped_overflow == 1 and r.passes == 1
    consistent(r, 1e-8)


@pytest.mark.parametrize(
    "coeffs, z, expected",
    [((1, 0, 1), 2j, -3), ((-1, 1), 1, 0), ((0, 3), 1j, 3j)],
)
def test_eval_polynomial(coeffs, z, expected):
    assert eval_polynomial(PolynomialQ(coeffs), z) == expected


def test_polynomial_validation():
    with pytest.raises(ValueError):
        PolynomialQ((3,))
    with pytest.raises(ValueError):
        PolynomialQ((1, 2, 0))


def test_polynomial_horner_matches_naive():
    Q = PolynomialQ((1 - 2j, 0.5, 3j, -1))
    for z in SAMPLES[:20]:
        naive = sum(c * z**k for k, c in enumerate(Q.coefficients))
        assert abs(Q(z) - naive) <= 1e-12 * (1 + abs(naive))


@pytest.mark.parametrize("Q, a, b", [((-1, 1), -1, 0), ((0, 1), -1, 2)])
def test_q_recurrence_reflected_sine(Q, a, b):
    Q = PolynomialQ(Q)
    r = check_q_recurrence("1+sin(z-1)", "1-sin(z-1)", Q, a, b, 6, SAMPLES, 1e-8)
    assert r.passed
    consistent(r, 1e-8)


def test_q_recurrence_brute_force_sides():
    # both sides computed by hand for n = 3 at one point
    z = 0.4 - 0.7j
    f = lambda w: 1 + cmath.sin(w - 1)
    g = lambda w: 1 - cmath.sin(w - 1)
    fz = gz = z
    for _ in range(3):
        fz, gz = f(fz), g(gz)
    lhs = gz - 1
    rhs = (-1) ** 3 * (fz - 1)
    assert abs(lhs - rhs) < 1e-13
    r = check_q_recurrence(
        "1+sin(z-1)", "1-sin(z-1)", PolynomialQ((-1, 1)), -1, 0, 3, np.array([z]), 1e-8
    )
    assert r.max_relative_error < 1e-13


def test_q_recurrence_first_step_equals_hypothesis():
    Q = PolynomialQ((0, 1))
    args = ("1+sin(z-1)", "1-sin(z-1)", Q, -1, 2)
    rec = check_q_recurrence(*args, 1, SAMPLES, 1e-8)
    hyp = check_q_hypothesis(*args, SAMPLES, 1e-8)
    assert rec.errors == hyp.errors
    assert rec.max_relative_error == hyp.max_relative_error


def test_q_recurrence_falsifiable():
    r = check_q_recurrence("1+sin(z-1)", "1-sin(z-1)", PolynomialQ((0, 1)), -1, 0, 3, SAMPLES, 1e-8)
    assert r.failures


@pytest.mark.parametrize("a, expected", [(-1, True), (1, False), (0.5, False), (1j, True)])
def test_check_unimodular(a, expected):
    assert check_unimodular(a, 1e-12) is expected


def brute_partial_sums(a, n_max):
    s, out = 0j, []
    for k in range(n_max):
        s += a**k
        out.append(abs(s))
    return out


@pytest.mark.parametrize("a, n_max", [(-1, 50), (1j, 50), (cmath.exp(0.1j), 200)])
def test_geometric_sum_bound(a, n_max):
    sums = brute_partial_sums(a, n_max)
    assert max(sums) <= 2 / abs(a - 1) + 1e-9
    assert geometric_sum_bound_check(a, n_max)


def test_geometric_sum_bound_values():
    assert brute_partial_sums(-1, 6) == [1, 0, 1, 0, 1, 0]
    assert 2 / abs(1j - 1) == pytest.approx(math.sqrt(2))


def test_geometric_sum_bound_rejects_non_unimodular():
    with pytest.raises(ValueError):
        geometric_sum_bound_check(0.5, 10)
    with pytest.raises(ValueError):
        geometric_sum_bound_check(1, 10)


def test_geometric_sum_bound_on_unit_circle():
    for theta in np.linspace(0.1, 2 * np.pi - 0.1, 20):
        assert geometric_sum_bound_check(cmath.exp(1j * theta), 200)


@pytest.mark.parametrize("name", sorted(corpus_pairs()))
def test_corpus_identities(name):
    pair = corpus_pairs()[name]
    z = sample_square(200, 42)
    for r in (
        check_commutativity(pair.f_function, pair.g_function, z, 1e-8),
        check_functional_equation(pair.f_function, pair.a, pair.b, z, 1e-8),
        check_iterate_identity(pair, 6, z, 1e-8),
    ):
        assert r.passed, (r.identity, r.failures[:3])
        consistent(r, 1e-8)


def test_report_json(tmp_path):
    r = check_functional_equation("exp(z)", -1, 0, np.array([1 + 0j, 2j]), 1e-8, seed=42)
    path = tmp_path / "r.json"
    write_reports_json([r], path)
    doc = json.loads(path.read_text())
    check = doc["checks"][0]
    assert list(check) == [
        "identity", "samples_checked", "max_relative_error", "failures",
        "skipped_overflow", "tolerance", "seed",
    ]
    assert check["failures"][0]["re"] == 1.0 and check["failures"][0]["im"] == 0.0
    assert check["seed"] == 42 and doc["all_passed"] is False
