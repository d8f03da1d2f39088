"""Chain geometry, Hamiltonian, and exact energy evaluation.

The system is a periodic ring of ``n_cells`` spin triangles (3 Ising spins
per cell, values +1/-1).  Within cell ``i`` the spins are labelled
``S_1, S_2, S_3``; the couplings are

    H = -sum_i [ j_d*(S1_i*S2_i + S2_i*S3_i) + j*S1_i*S3_i
                 + j_t*S3_i*S1_{i+1} ]  -  h * sum of all spins,

with the cell index wrapping periodically.  Everything downstream (transfer
matrix, enumeration, Monte Carlo) is checked against the functions here.
Units are dimensionless (k_B = 1, moment = 1).
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "ExchangeConstants",
    "ChainSpec",
    "FieldPoint",
    "CASE_PRESETS",
    "exact_fraction",
    "energy",
    "energy_exact",
    "total_magnetization",
    "spins_from_bits",
    "bits_from_spins",
]


def exact_fraction(value) -> Fraction:
    """Convert a number to an exact Fraction, refusing ambiguous floats.

    Accepts int, Fraction, strings like "2/3" or "-1.5", and floats with an
    exact integer value.  Non-integral floats are rejected: float(2/3) is a
    binary approximation and silently using it would break exact ground-state
    tie comparisons.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("bool is not a valid coupling or field value")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        if math.isfinite(value) and value.is_integer():
            return Fraction(int(value))
        raise ValueError(
            f"cannot interpret float {value!r} as an exact rational; "
            "pass a Fraction or a string such as '2/3'"
        )
    raise ValueError(f"unsupported exact input of type {type(value).__name__}")


@dataclass(frozen=True)
class ExchangeConstants:
    """The coupling triple (j_d, j, j_t); any signs, dimensionless units."""

    j_d: float
    j: float
    j_t: float

    def __post_init__(self):
        for name in ("j_d", "j", "j_t"):
            v = getattr(self, name)
            if not math.isfinite(float(v)):
                raise ValueError(f"exchange constant {name}={v} must be finite")

    def as_fractions(self) -> tuple[Fraction, Fraction, Fraction]:
        """Exact rational view; refuses non-integral float couplings."""
        return (
            exact_fraction(self.j_d),
            exact_fraction(self.j),
            exact_fraction(self.j_t),
        )


# The four reference parameter sets used throughout: keys are the short case
# tags, values are (j_d, j, j_t).
CASE_PRESETS: dict[str, ExchangeConstants] = {
    "a": ExchangeConstants(-1.0, -1.0, -1.0),
    "b": ExchangeConstants(-1.0, -1.0, 1.0),
    "c": ExchangeConstants(1.0, 1.0, -1.0),
    "d": ExchangeConstants(1.0, -1.0, -1.0),
}


@dataclass(frozen=True)
class ChainSpec:
    """A ring of n_cells triangles, i.e. 3*n_cells spins."""

    n_cells: int
    exchange: ExchangeConstants

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError(f"n_cells must be >= 1, got {self.n_cells}")

    @property
    def n_spins(self) -> int:
        return 3 * self.n_cells


@dataclass(frozen=True)
class FieldPoint:
    """A (magnetic field, temperature) point; t > 0 always."""

    h: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.h) and math.isfinite(self.t)):
            raise ValueError(f"field point ({self.h}, {self.t}) must be finite")
        if self.t <= 0.0:
            raise ValueError(f"temperature must be positive, got t={self.t}")

    @property
    def beta(self) -> float:
        return 1.0 / self.t


def _checked_config(cfg, spec: ChainSpec) -> np.ndarray:
    arr = np.asarray(cfg)
    if arr.shape != (spec.n_spins,):
        raise ValueError(
            f"configuration has shape {arr.shape}, expected ({spec.n_spins},) "
            f"for n_cells={spec.n_cells}"
        )
    if not np.all(np.abs(arr) == 1):
        raise ValueError("configuration entries must be exactly -1 or +1")
    return arr


def energy(cfg, spec: ChainSpec, h: float) -> float:
    """Total energy of a configuration under field h (periodic ring)."""
    arr = _checked_config(cfg, spec)
    s1, s2, s3 = arr[0::3], arr[1::3], arr[2::3]
    ex = spec.exchange
    bonds = (
        ex.j_d * (s1 * s2 + s2 * s3)
        + ex.j * (s1 * s3)
        + ex.j_t * (s3 * np.roll(s1, -1))
    )
    return float(-np.sum(bonds) - h * np.sum(arr))


def energy_exact(cfg, spec: ChainSpec, h) -> Fraction:
    """Same value as `energy` but as an exact rational.

    Requires exactly-representable couplings and field (see exact_fraction);
    the result supports bit-exact tie comparisons.
    """
    arr = _checked_config(cfg, spec)
    j_d, j, j_t = spec.exchange.as_fractions()
    h_q = exact_fraction(h)
    n = spec.n_cells
    bond_sum = Fraction(0)
    for i in range(n):
        s1 = int(arr[3 * i])
        s2 = int(arr[3 * i + 1])
        s3 = int(arr[3 * i + 2])
        s1_next = int(arr[3 * ((i + 1) % n)])
        bond_sum += j_d * (s1 * s2 + s2 * s3) + j * (s1 * s3) + j_t * (s3 * s1_next)
    return -bond_sum - h_q * int(np.sum(arr))


def total_magnetization(cfg) -> int:
    """Sum of all spins; an integer with the parity of the spin count."""
    arr = np.asarray(cfg)
    if not np.all(np.abs(arr) == 1):
        raise ValueError("configuration entries must be exactly -1 or +1")
    return int(np.sum(arr))


def spins_from_bits(bits: int, n_cells: int) -> np.ndarray:
    """Unpack a bitmask into a spin array (bit=1 means spin +1).

    Bit k holds the spin with flat index k = 3*(cell) + (position in cell).
    """
    n = 3 * n_cells
    if bits < 0 or bits >> n:
        raise ValueError(f"bitmask {bits} out of range for {n} spins")
    k = np.arange(n)
    return np.where((bits >> k) & 1, 1, -1).astype(np.int8)


def bits_from_spins(cfg) -> int:
    """Pack a spin array into a bitmask (inverse of spins_from_bits)."""
    arr = np.asarray(cfg)
    if not np.all(np.abs(arr) == 1):
        raise ValueError("configuration entries must be exactly -1 or +1")
    bits = 0
    for k, s in enumerate(arr):
        if s == 1:
            bits |= 1 << k
    return bits
