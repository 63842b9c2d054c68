"""Randomised numerical checks of the functional identities linking f and g."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .dynamics import (
    CommutingPair,
    as_evaluator,
    iterate_direct,
)

# values above this are too large for a meaningful relative comparison
MAGNITUDE_CUTOFF = 1e8


@dataclass
class IdentityReport:
    identity: str
    tolerance: float
    samples_checked: int = 0
    max_relative_error: float = 0.0
    failures: list[tuple[complex, float]] = field(default_factory=list)
    skipped_overflow: int = 0
    # per-sample errors, nan for skipped samples
    errors: list[float] = field(default_factory=list, repr=False)
    seed: int | None = None

    @property
    def passes(self) -> int:
        return self.samples_checked - len(self.failures) - self.skipped_overflow

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "samples_checked": self.samples_checked,
            "max_relative_error": self.max_relative_error,
            "failures": [
                {"re": z.real, "im": z.imag, "error": err} for z, err in self.failures
            ],
            "skipped_overflow": self.skipped_overflow,
            "tolerance": self.tolerance,
            "seed": self.seed,
        }


def sample_square(n: int, seed: int = 42, half_width: float = 2.0) -> np.ndarray:
    """n seeded uniform points in the square [-w, w]^2."""
    rng = np.random.default_rng(seed)
    re = rng.uniform(-half_width, half_width, n)
    im = rng.uniform(-half_width, half_width, n)
    return re + 1j * im


def _comparable(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (
        np.isfinite(u)
        & np.isfinite(v)
        & (np.abs(u) <= MAGNITUDE_CUTOFF)
        & (np.abs(v) <= MAGNITUDE_CUTOFF)
    )


def relative_error(u, v):
    """|u - v| / (1 + max(|u|, |v|))."""
    with np.errstate(all="ignore"):
        return np.abs(u - v) / (1 + np.maximum(np.abs(u), np.abs(v)))


def _report(identity, samples, lhs_rhs_pairs, tol, seed=None) -> IdentityReport:
    """Fold one or more (lhs, rhs) array pairs into a report.

    A sample's error is the worst over the pairs where it is comparable; a
    sample comparable in none of them counts as skipped.
    """
    samples = np.asarray(samples, dtype=np.complex128).ravel()
    worst = np.full(samples.size, np.nan)
    for lhs, rhs in lhs_rhs_pairs:
        ok = _comparable(lhs, rhs)
        err = np.where(ok, relative_error(lhs, rhs), np.nan)
        worst = np.fmax(worst, err)
    report = IdentityReport(identity, tol, samples_checked=samples.size, seed=seed)
    skipped = np.isnan(worst)
    report.skipped_overflow = int(skipped.sum())
    report.errors = worst.tolist()
    if (~skipped).any():
        report.max_relative_error = float(np.max(worst[~skipped]))
    bad = np.flatnonzero(~skipped & (worst > tol))
    report.failures = [(complex(samples[i]), float(worst[i])) for i in bad]
    return report


def check_commutativity(f, g, samples, tol: float, seed=None) -> IdentityReport:
    if tol <= 0:
        raise ValueError("tol must be positive")
    f, g = as_evaluator(f), as_evaluator(g)
    z = np.asarray(samples, dtype=np.complex128).ravel()
    with np.errstate(all="ignore"):
        fg = f(g(z))
        gf = g(f(z))
    return _report("commutativity f(g(z)) = g(f(z))", z, [(fg, gf)], tol, seed)


def check_functional_equation(f, a: complex, b: complex, samples, tol: float, seed=None) -> IdentityReport:
    if a == 0:
        raise ValueError("a must be nonzero")
    f = as_evaluator(f)
    z = np.asarray(samples, dtype=np.complex128).ravel()
    with np.errstate(all="ignore"):
        lhs = f(a * z + b)
        rhs = a * f(z) + b
    return _report("functional equation f(az+b) = af(z)+b", z, [(lhs, rhs)], tol, seed)


def check_iterate_identity(pair: CommutingPair, n_max: int, samples, tol: float, seed=None) -> IdentityReport:
    """Direct g^n against a^n f^{np} + b(a^{n-1} + ... + 1) for n = 1..n_max."""
    z = np.asarray(samples, dtype=np.complex128).ravel()
    g = pair.g_function
    f = pair.f_function
    pairs = []
    gz = z
    fz = z
    geo = 0j
    an = 1 + 0j
    with np.errstate(all="ignore"):
        for n in range(1, n_max + 1):
            gz = g(gz)
            fz = iterate_direct(f, fz, pair.p)
            geo += an
            an *= pair.a
            pairs.append((gz, an * fz + pair.b * geo))
    return _report("iterate identity g^n = P^n o f^(np)", z, pairs, tol, seed)


@dataclass(frozen=True)
class PolynomialQ:
    """Non-constant polynomial, coefficients lowest degree first."""

    coefficients: tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) < 2:
            raise ValueError("Q must have degree >= 1")
        if coeffs[-1] == 0:
            raise ValueError("leading coefficient of Q must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z):
        return eval_polynomial(self, z)


def eval_polynomial(Q: PolynomialQ, z):
    acc = 0j
    for c in reversed(Q.coefficients):
        acc = acc * z + c
    return acc


def check_q_recurrence(f, g, Q: PolynomialQ, a: complex, b: complex, n_max: int, samples, tol: float, seed=None) -> IdentityReport:
    """Q(g^n(z)) against a^n Q(f^n(z)) + b(a^{n-1} + ... + 1) for n = 1..n_max."""
    if a == 0:
        raise ValueError("a must be nonzero")
    f, g = as_evaluator(f), as_evaluator(g)
    z = np.asarray(samples, dtype=np.complex128).ravel()
    pairs = []
    fz = gz = z
    geo = 0j
    an = 1 + 0j
    with np.errstate(all="ignore"):
        for n in range(1, n_max + 1):
            fz = f(fz)
            gz = g(gz)
            geo += an
            an *= a
            pairs.append((eval_polynomial(Q, gz), an * eval_polynomial(Q, fz) + b * geo))
    return _report("Q recurrence Q(g^n) = a^n Q(f^n) + b sum a^k", z, pairs, tol, seed)


def check_q_hypothesis(f, g, Q: PolynomialQ, a: complex, b: complex, samples, tol: float, seed=None) -> IdentityReport:
    """The single relation Q(g(z)) = a Q(f(z)) + b."""
    f, g = as_evaluator(f), as_evaluator(g)
    z = np.asarray(samples, dtype=np.complex128).ravel()
    with np.errstate(all="ignore"):
        lhs = eval_polynomial(Q, g(z))
        rhs = a * eval_polynomial(Q, f(z)) + b
    return _report("Q hypothesis Q(g) = aQ(f) + b", z, [(lhs, rhs)], tol, seed)


def check_unimodular(a: complex, tol: float = 1e-12) -> bool:
    return abs(abs(a) - 1) <= tol and abs(a - 1) > tol


def geometric_sum_bound_check(a: complex, n_max: int) -> bool:
    """Partial sums 1 + a + ... + a^{n-1} stay within 2/|a-1| for n <= n_max."""
    a = complex(a)
    if not check_unimodular(a, 1e-12):
        raise ValueError("geometric sum bound needs |a| = 1 and a != 1")
    bound = 2 / abs(a - 1) + 1e-9
    partial = 0j
    power = 1 + 0j
    for _ in range(n_max):
        partial += power
        power *= a
        if abs(partial) > bound:
            return False
    return True


def write_reports_json(reports: Sequence[IdentityReport], path, **extra) -> None:
    doc = dict(extra)
    doc["checks"] = [r.to_dict() for r in reports]
    doc["all_passed"] = all(r.passed for r in reports)
    try:
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
