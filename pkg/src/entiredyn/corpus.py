"""Built-in commuting pairs: odd sine, its reflection about z = 1, and a
z*exp(z^2) variant, each paired with g = 2 - f^p (or -f^p for sin)."""

from __future__ import annotations

from .dsl import make_symmetric_from_odd, parse
from .dynamics import CommutingPair

SIN = "sin(z)"
SHIFTED_SIN = "1+sin(z-1)"
SHIFTED_ZEXP = "1+(z-1)*exp((z-1)^2)"

FUNCTIONS = {
    "sin": parse(SIN),
    "shifted_sin": make_symmetric_from_odd(parse("sin(z)"), 2),
    "shifted_zexp": make_symmetric_from_odd(parse("z*exp(z^2)"), 2),
}


def corpus_pairs() -> dict[str, CommutingPair]:
    pairs = {
        "sin/-sin": CommutingPair(FUNCTIONS["sin"], -1, 0, 1),
        "shifted_zexp/2-f": CommutingPair(FUNCTIONS["shifted_zexp"], -1, 2, 1),
    }
    for p in (1, 2, 3):
        pairs[f"shifted_sin/2-f^{p}"] = CommutingPair(FUNCTIONS["shifted_sin"], -1, 2, p)
    return pairs
