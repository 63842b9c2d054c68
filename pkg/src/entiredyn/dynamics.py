"""Orbit iteration, affine maps and the four-way escape classifier.

All iteration runs on complex128 arrays; the scalar helpers wrap a single
point in a one-element array so their results match the raster kernel
exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .dsl import ExprFunction, ExprNode, evaluate_array, parse, to_source

Evaluator = Callable[[np.ndarray], np.ndarray]


class PointClass(enum.IntEnum):
    # integer values index the confusion matrix and the raster arrays
    Escaping = 0
    Bounded = 1
    Bungee = 2
    Undecided = 3


class Termination(enum.Enum):
    BUDGET_EXHAUSTED = "budget_exhausted"
    OVERFLOW = "overflow"


@dataclass(frozen=True)
class AffineMap:
    """P(z) = a*z + b with a != 0."""

    a: complex
    b: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if self.a == 0:
            raise ValueError("affine multiplier a must be nonzero")

    def __call__(self, z):
        return affine_apply(self, z)


def affine_apply(P: AffineMap, z):
    return P.a * z + P.b


def affine_iterate_closed_form(P: AffineMap, n: int, z):
    """n-fold iterate of P evaluated in closed form."""
    if n < 0:
        raise ValueError("iterate count must be nonnegative")
    if n == 0:
        return z
    if P.a == 1:
        return z + n * P.b
    an = P.a**n
    return an * z + P.b * (an - 1) / (P.a - 1)


def affine_inverse(P: AffineMap) -> AffineMap:
    if P.a == 0:
        raise ValueError("affine map with a = 0 is not invertible")
    return AffineMap(1 / P.a, -P.b / P.a)


def _as_expr(f) -> ExprNode:
    if isinstance(f, str):
        return parse(f)
    if isinstance(f, ExprFunction):
        return f.expr
    return f


@dataclass(frozen=True)
class CommutingPair:
    """f together with the partner g = a*f^p + b (f^p the p-fold iterate)."""

    f: ExprNode
    a: complex
    b: complex
    p: int = 1

    def __post_init__(self):
        object.__setattr__(self, "f", _as_expr(self.f))
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if self.a == 0 or self.a == 1:
            raise ValueError("pair hypothesis requires a != 0, 1")
        if int(self.p) != self.p or self.p < 1:
            raise ValueError("iterate exponent p must be a positive integer")

    @property
    def affine(self) -> AffineMap:
        return AffineMap(self.a, self.b)

    @property
    def f_function(self) -> ExprFunction:
        return ExprFunction(self.f)

    @property
    def g_function(self) -> "PartnerFunction":
        return PartnerFunction(self)

    def __str__(self):
        return f"f={to_source(self.f)}, a={self.a}, b={self.b}, p={self.p}"


class PartnerFunction:
    """Picklable evaluator of g = a*f^p + b; scalars or arrays."""

    def __init__(self, pair: CommutingPair):
        self.pair = pair

    def __call__(self, z):
        scalar = np.ndim(z) == 0
        w = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        with np.errstate(all="ignore"):
            for _ in range(self.pair.p):
                w = evaluate_array(self.pair.f, w)
            w = self.pair.a * w + self.pair.b
        return complex(w[0]) if scalar else w

    def __repr__(self):
        return f"PartnerFunction({self.pair})"


def pair_g_evaluate(pair: CommutingPair, z: complex) -> complex:
    return PartnerFunction(pair)(z)


def iterate_direct(fn: Evaluator, z, n: int):
    """Apply ``fn`` n times; non-finite values propagate."""
    scalar = np.ndim(z) == 0
    w = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    with np.errstate(all="ignore"):
        for _ in range(n):
            w = _call(fn, w)
    return complex(w[0]) if scalar else w


def _call(fn, w: np.ndarray) -> np.ndarray:
    if isinstance(fn, (ExprFunction, PartnerFunction)):
        return fn(w)
    if isinstance(fn, (str,)) or not callable(fn):
        return evaluate_array(_as_expr(fn), w)
    out = fn(w)
    return np.asarray(out, dtype=np.complex128)


def as_evaluator(f) -> Evaluator:
    """Accept DSL text, an expression tree, a pair (meaning its g), or a callable."""
    if isinstance(f, (ExprFunction, PartnerFunction)):
        return f
    if isinstance(f, CommutingPair):
        return PartnerFunction(f)
    if isinstance(f, str) or not callable(f):
        return ExprFunction(_as_expr(f))
    return f


@dataclass(frozen=True)
class ClassifierConfig:
    max_iter: int = 200
    escape_radius: float = 1e3
    bounded_radius: float = 1e2
    overflow_cap: float = 1e100
    confirm_steps: int = 3
    bungee_min_alternations: int = 2

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if not 0 < self.bounded_radius <= self.escape_radius < self.overflow_cap:
            raise ValueError("need 0 < bounded_radius <= escape_radius < overflow_cap")
        if not 1 <= self.confirm_steps < self.max_iter:
            raise ValueError("confirm_steps must be in [1, max_iter)")
        if self.bungee_min_alternations < 2:
            raise ValueError("bungee_min_alternations must be at least 2")

    def with_budget(self, max_iter: int) -> "ClassifierConfig":
        return ClassifierConfig(
            max_iter,
            self.escape_radius,
            self.bounded_radius,
            self.overflow_cap,
            self.confirm_steps,
            self.bungee_min_alternations,
        )


@dataclass
class OrbitRecord:
    initial: complex
    moduli: list[float]
    terminated_by: Termination
    iterations_used: int
    values: Optional[list[complex]] = field(default=None, repr=False)


def iterate_orbit(f, z0: complex, config: ClassifierConfig, record_values: bool = False) -> OrbitRecord:
    """Iterate f from z0, storing |f^n(z0)| for n = 1, 2, ...

    Stops after ``config.max_iter`` steps or at the first value that is
    non-finite or larger than ``config.overflow_cap``; that value's modulus
    (inf when non-finite) is the last entry.
    """
    fn = as_evaluator(f)
    w = np.array([z0], dtype=np.complex128)
    moduli = []
    values = [] if record_values else None
    terminated = Termination.BUDGET_EXHAUSTED
    with np.errstate(all="ignore"):
        for _ in range(config.max_iter):
            w = _call(fn, w)
            m = float(np.abs(w)[0])
            if record_values:
                values.append(complex(w[0]))
            if not np.isfinite(w[0]) or not m <= config.overflow_cap:
                moduli.append(m if np.isfinite(m) else float("inf"))
                terminated = Termination.OVERFLOW
                break
            moduli.append(m)
    return OrbitRecord(complex(z0), moduli, terminated, len(moduli), values)


def _count_alternations(moduli: Sequence[float], config: ClassifierConfig) -> tuple[int, int]:
    # (excursions above escape_radius, returns to <= bounded_radius after one)
    ups = downs = 0
    high = False
    for m in moduli:
        if not high and m > config.escape_radius:
            high = True
            ups += 1
        elif high and m <= config.bounded_radius:
            high = False
            downs += 1
    return ups, downs


def classify_moduli(moduli: Sequence[float], overflowed: bool, config: ClassifierConfig) -> PointClass:
    if overflowed:
        return PointClass.Escaping
    k = config.confirm_steps
    if len(moduli) >= k:
        tail = moduli[-k:]
        if all(m > config.escape_radius for m in tail) and all(
            x <= y for x, y in zip(tail, tail[1:])
        ):
            return PointClass.Escaping
    if all(m <= config.bounded_radius for m in moduli):
        return PointClass.Bounded
    ups, downs = _count_alternations(moduli, config)
    if min(ups, downs) >= config.bungee_min_alternations:
        return PointClass.Bungee
    return PointClass.Undecided


def classify_orbit(record: OrbitRecord, config: ClassifierConfig) -> PointClass:
    return classify_moduli(
        record.moduli, record.terminated_by is Termination.OVERFLOW, config
    )


def classify_point(f, z0: complex, config: ClassifierConfig) -> PointClass:
    return classify_orbit(iterate_orbit(f, z0, config), config)


def classify_points(f, points, config: ClassifierConfig) -> np.ndarray:
    """Vectorised classify_point over an array of starting points.

    Streams the orbit statistics the classifier needs instead of storing
    the moduli, and gives the same class per point as classify_point.
    """
    fn = as_evaluator(f)
    z = np.array(points, dtype=np.complex128).ravel()
    n = z.size
    k = config.confirm_steps
    overflowed = np.zeros(n, dtype=bool)
    all_bounded = np.ones(n, dtype=bool)
    high = np.zeros(n, dtype=bool)
    ups = np.zeros(n, dtype=np.int64)
    downs = np.zeros(n, dtype=np.int64)
    # rolling window of the last k moduli, oldest first
    tail = np.full((n, k), np.nan)
    steps = np.zeros(n, dtype=np.int64)

    active = np.arange(n)
    w = z.copy()
    with np.errstate(all="ignore"):
        for _ in range(config.max_iter):
            if active.size == 0:
                break
            w = _call(fn, w)
            m = np.abs(w)
            bad = ~np.isfinite(w) | ~(m <= config.overflow_cap)
            if bad.any():
                overflowed[active[bad]] = True
                keep = ~bad
                active, w, m = active[keep], w[keep], m[keep]
            steps[active] += 1
            all_bounded[active] &= m <= config.bounded_radius
            h = high[active]
            go_up = ~h & (m > config.escape_radius)
            go_down = h & (m <= config.bounded_radius)
            ups[active] += go_up
            downs[active] += go_down
            high[active] = (h | go_up) & ~go_down
            tail[active, :-1] = tail[active, 1:]
            tail[active, -1] = m

    classes = np.full(n, PointClass.Undecided, dtype=np.uint8)
    escaped_tail = (
        (steps >= k)
        & np.all(tail > config.escape_radius, axis=1)
        & np.all(tail[:, :-1] <= tail[:, 1:], axis=1)
    )
    bungee = np.minimum(ups, downs) >= config.bungee_min_alternations
    classes[bungee] = PointClass.Bungee
    classes[all_bounded] = PointClass.Bounded
    classes[escaped_tail | overflowed] = PointClass.Escaping
    return classes


def partner_orbit_via_identity(pair: CommutingPair, z0: complex, n: int, config: ClassifierConfig | None = None) -> complex:
    """g^n(z0) computed as P^n(f^{np}(z0)) with P(z) = a*z + b in closed form."""
    if n < 1:
        raise ValueError("n must be positive")
    if config is not None and n * pair.p > config.max_iter:
        raise ValueError("n*p exceeds the iteration budget")
    w = iterate_direct(pair.f_function, z0, n * pair.p)
    return complex(affine_iterate_closed_form(pair.affine, n, w))
