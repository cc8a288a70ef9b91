"""
Two-letter coin sequences for aperiodic quantum walks.

Every generator returns the first ``length`` letters of a word over the
alphabet {A, B}. For the substitution sequences this is a prefix of the
infinite fixed point of the rule:

- two-periodic : ABABAB...
- fibonacci    : A -> AB, B -> A
- thue-morse   : A -> AB, B -> BA
- rudin-shapiro: P -> PQ, Q -> PR, R -> SQ, S -> SR, then (P, Q) -> A and (R, S) -> B
- random       : i.i.d. letters from a SplitMix64 counter stream

Letter A maps to weight +1 and B to weight -1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "KINDS",
    "LetterString",
    "generate",
    "generate_two_periodic",
    "generate_fibonacci",
    "generate_thue_morse",
    "generate_rudin_shapiro",
    "generate_random",
    "splitmix64",
    "weight_function",
]

KINDS = ("two-periodic", "fibonacci", "thue-morse", "rudin-shapiro", "random")
APERIODIC = ("fibonacci", "thue-morse", "rudin-shapiro")

_FIBONACCI_RULE = {"A": "AB", "B": "A"}
_THUE_MORSE_RULE = {"A": "AB", "B": "BA"}
_RUDIN_SHAPIRO_RULE = {"P": "PQ", "Q": "PR", "R": "SQ", "S": "SR"}
_RUDIN_SHAPIRO_PROJECTION = str.maketrans("PQRS", "AABB")


@dataclass(frozen=True)
class LetterString:
    """A finite word over {A, B} together with the generator that produced it."""

    letters: str
    kind: str

    def __post_init__(self):
        if not self.letters:
            raise ValueError("LetterString must contain at least one letter.")
        if set(self.letters) - {"A", "B"}:
            raise ValueError(f"letters must be drawn from 'A'/'B', got {self.letters[:20]!r}...")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return self.letters

    def __getitem__(self, item):
        return self.letters[item]

    @property
    def length(self) -> int:
        return len(self.letters)

    def to_json(self) -> str:
        return json.dumps(list(self.letters))

    @classmethod
    def from_text(cls, text: str, kind: str = "custom") -> "LetterString":
        return cls(text.strip(), kind)

    @classmethod
    def from_json(cls, text: str, kind: str = "custom") -> "LetterString":
        return cls("".join(json.loads(text)), kind)


def _check_length(length: int) -> None:
    if isinstance(length, bool) or not isinstance(length, (int, np.integer)):
        raise TypeError(f"length must be an int, got {type(length).__name__}")
    if length < 1:
        raise ValueError(f"length must be >= 1 (got {length})")


def _iterate_substitution(seed: str, rule: dict[str, str], length: int) -> str:
    word = seed
    while len(word) < length:
        word = "".join(rule[c] for c in word)
    return word[:length]


def generate_two_periodic(length: int) -> LetterString:
    _check_length(length)
    return LetterString(("AB" * (length // 2 + 1))[:length], "two-periodic")


def generate_fibonacci(length: int) -> LetterString:
    """Prefix of the Fibonacci word via S_{k+1} = S_k S_{k-1}, S_1 = B, S_2 = A."""
    _check_length(length)
    prev, cur = "B", "A"
    while len(cur) < length:
        prev, cur = cur, cur + prev
    return LetterString(cur[:length], "fibonacci")


def generate_thue_morse(length: int) -> LetterString:
    """Prefix of the Thue-Morse word via S_{k+1} = S_k + complement(S_k), S_1 = A."""
    _check_length(length)
    word = "A"
    flip = str.maketrans("AB", "BA")
    while len(word) < length:
        word = word + word.translate(flip)
    return LetterString(word[:length], "thue-morse")


def generate_rudin_shapiro(length: int) -> LetterString:
    _check_length(length)
    word = _iterate_substitution("P", _RUDIN_SHAPIRO_RULE, length)
    return LetterString(word.translate(_RUDIN_SHAPIRO_PROJECTION), "rudin-shapiro")


_GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)


def splitmix64(seed: int, count: int) -> NDArray[np.uint64]:
    """
    Counter-based SplitMix64 stream.

    Output i is ``mix(seed + (i + 1) * 0x9E3779B97F4A7C15)`` with the standard
    finalizer (shifts 30, 27, 31; multipliers 0xBF58476D1CE4E5B9 and
    0x94D049BB133111EB), all arithmetic modulo 2**64.
    """
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must fit in an unsigned 64-bit integer (got {seed})")
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + np.arange(1, count + 1, dtype=np.uint64) * _GOLDEN_GAMMA
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return z


def generate_random(length: int, seed: int) -> LetterString:
    """
    Uniform random letters; letter i is B iff the top bit of SplitMix64 output i is set.
    """
    _check_length(length)
    bits = splitmix64(int(seed), length) >> np.uint64(63)
    return LetterString("".join("B" if b else "A" for b in bits.tolist()), "random")


_GENERATORS = {
    "two-periodic": generate_two_periodic,
    "fibonacci": generate_fibonacci,
    "thue-morse": generate_thue_morse,
    "rudin-shapiro": generate_rudin_shapiro,
}


def generate(kind: str, length: int, seed: int = 0) -> LetterString:
    """Dispatch on the generator name (one of ``KINDS``)."""
    if kind == "random":
        return generate_random(length, seed)
    try:
        return _GENERATORS[kind](length)
    except KeyError:
        raise ValueError(f"unknown sequence kind {kind!r}; expected one of {KINDS}") from None


def weight_function(s: LetterString | str) -> NDArray[np.int8]:
    """Map A -> +1 and B -> -1 elementwise."""
    letters = s.letters if isinstance(s, LetterString) else s
    codes = np.frombuffer(letters.encode("ascii"), dtype=np.uint8)
    return np.where(codes == ord("A"), 1, -1).astype(np.int8)
