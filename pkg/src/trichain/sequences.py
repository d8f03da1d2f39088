"""Exact integer sequences and the closed-form ground-state constants.

Lucas, Fibonacci, Pell and Pell-Lucas numbers via their two-term
recurrences (exact ints at any index), plus identification of enumerated
degeneracy sequences against affine reindexings of these families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "lucas",
    "fibonacci",
    "pell",
    "pell_lucas",
    "one_plus_pow3",
    "alt_plus_pow3",
    "SequenceMatch",
    "identify",
    "asymptotic_constants",
    "GOLDEN",
    "SILVER",
]

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
SILVER = 1.0 + math.sqrt(2.0)


def _two_term(n: int, a0: int, a1: int, c: int) -> int:
    # a_{k+1} = c*a_k + a_{k-1}
    if n < 0:
        raise ValueError(f"sequence index must be >= 0, got {n}")
    a, b = a0, a1
    for _ in range(n):
        a, b = b, c * b + a
    return a


def lucas(n: int) -> int:
    """L_0=2, L_1=1, L_{k+1}=L_k+L_{k-1}."""
    return _two_term(n, 2, 1, 1)


def fibonacci(n: int) -> int:
    """F_0=0, F_1=1, F_{k+1}=F_k+F_{k-1}."""
    return _two_term(n, 0, 1, 1)


def pell(n: int) -> int:
    """P_0=0, P_1=1, P_{k+1}=2*P_k+P_{k-1}."""
    return _two_term(n, 0, 1, 2)


def pell_lucas(n: int) -> int:
    """Q_0=2, Q_1=2, Q_{k+1}=2*Q_k+Q_{k-1}."""
    return _two_term(n, 2, 2, 2)


def one_plus_pow3(n: int) -> int:
    if n < 0:
        raise ValueError(f"sequence index must be >= 0, got {n}")
    return 1 + 3**n


def alt_plus_pow3(n: int) -> int:
    if n < 0:
        raise ValueError(f"sequence index must be >= 0, got {n}")
    return (-1) ** n + 3**n


_FAMILIES = {
    "lucas": lucas,
    "fibonacci": fibonacci,
    "pell": pell,
    "pell_lucas": pell_lucas,
    "one_plus_pow3": one_plus_pow3,
    "alt_plus_pow3": alt_plus_pow3,
}

# Closed forms, used for float asymptotics only (they lose integrality in
# floating point beyond n ~ 35).
_CLOSED_FORMS = {
    "lucas": lambda n: GOLDEN**n + (1.0 - GOLDEN) ** n,
    "fibonacci": lambda n: (GOLDEN**n - (1.0 - GOLDEN) ** n) / math.sqrt(5.0),
    "pell": lambda n: (SILVER**n - (2.0 - SILVER) ** n) / (2.0 * math.sqrt(2.0)),
    "pell_lucas": lambda n: SILVER**n + (2.0 - SILVER) ** n,
}


def closed_form(kind: str, n: int) -> float:
    """Float closed-form value of a family (asymptotics / sanity checks)."""
    try:
        return _CLOSED_FORMS[kind](n)
    except KeyError:
        raise ValueError(f"no closed form for sequence kind {kind!r}") from None


@dataclass(frozen=True)
class SequenceMatch:
    """seq[k] == scale * family(a*n + b) with n = k+1 (rings count from 1)."""

    kind: str
    a: int
    b: int
    scale: int

    def describe(self) -> str:
        if self.a == 0:
            idx = str(self.b)
        else:
            an = "n" if self.a == 1 else f"{self.a}n"
            idx = an if self.b == 0 else f"{an}{self.b:+d}"
        prefix = "" if self.scale == 1 else f"{self.scale}*"
        return f"{prefix}{self.kind}({idx})"

    def value(self, n: int) -> int:
        return self.scale * _FAMILIES[self.kind](self.a * n + self.b)


def identify(seq) -> list[SequenceMatch]:
    """All (family, affine index map, small prefactor) exact matches.

    Position k of `seq` is compared against scale*family(a*(k+1) + b) with
    |a| <= 3, |b| <= 5, scale in {1, 2, 3}.  Maps that produce a negative
    index anywhere in the range are skipped.  The bounded search is
    deliberate: an unbounded one invites accidental matches.
    """
    values = [int(v) for v in seq]
    if len(values) < 4:
        raise ValueError(f"need at least 4 terms to identify, got {len(values)}")
    positions = range(1, len(values) + 1)
    matches = []
    for kind, fn in _FAMILIES.items():
        for a in range(-3, 4):
            for b in range(-5, 6):
                idx = [a * n + b for n in positions]
                if min(idx) < 0:
                    continue
                for scale in (1, 2, 3):
                    if all(scale * fn(i) == v for i, v in zip(idx, values)):
                        matches.append(SequenceMatch(kind, a, b, scale))
    return matches


# Ground-state (entropy, magnetization) constants per reference case, at
# zero field (h -> +0) and at the critical field.
_ASYMPTOTIC = {
    ("a", "zero"): (math.log(3.0) / 3.0, 1.0 / 3.0),
    ("b", "zero"): (math.log(3.0) / 3.0, 1.0 / 3.0),
    ("c", "zero"): (0.0, 0.0),
    ("d", "zero"): (math.log(3.0) / 3.0, 1.0 / 3.0),
    ("a", "critical"): (2.0 / 3.0 * math.log(GOLDEN), (1.0 + 2.0 / math.sqrt(5.0)) / 3.0),
    ("b", "critical"): (math.log(SILVER) / 3.0, SILVER / (3.0 * math.sqrt(2.0))),
    ("c", "critical"): (math.log(GOLDEN) / 3.0, 1.0 / math.sqrt(5.0)),
    ("d", "critical"): (2.0 / 3.0 * math.log(GOLDEN), (1.0 + 2.0 / math.sqrt(5.0)) / 3.0),
}


def asymptotic_constants(case: str, field: str) -> tuple[float, float]:
    """(entropy, magnetization) per spin in the large-ring limit.

    `case` is one of "a".."d", `field` is "zero" (h -> +0) or "critical"
    (h = h_c).
    """
    try:
        return _ASYMPTOTIC[(case, field)]
    except KeyError:
        raise ValueError(f"unknown case/field combination ({case!r}, {field!r})") from None
