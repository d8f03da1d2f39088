"""Exhaustive enumeration over all configurations of small rings.

This module is the oracle everything else is cross-checked against: exact
finite-ring partition functions, ground-state degeneracy counts, and
ground-state magnetization sums.  Configurations are 3*n_cells-bit integers
(bit=1 means spin +1); per-cell 16-entry bond tables turn the energy of a
chunk of configurations into a handful of vectorized table lookups.

Ground-state scans work on integer-scaled exact energies (a common
denominator over the rational couplings and field), so ties are resolved by
exact equality, never by float comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import ChainSpec, ExchangeConstants, FieldPoint, exact_fraction

__all__ = [
    "N_CELLS_GUARD",
    "GroundStateReport",
    "brute_partition",
    "ground_states",
    "ground_states_plus_zero",
    "omega_sequence",
    "residual_entropy_estimate",
    "zero_field_sector_minima",
]

# 2^27 configurations (n_cells = 9) is the largest scan that stays at desk
# scale; anything bigger is refused.
N_CELLS_GUARD = 9

_CHUNK_BITS = 22  # configurations per chunk: 4M * int64 = 32 MB scratch


@dataclass(frozen=True)
class GroundStateReport:
    """Minimal-energy census of one (exchange, field) point at fixed size."""

    n_cells: int
    e_min: Fraction  # total energy, exact
    omega: int  # number of minimal-energy configurations
    m_sum: int  # total magnetization summed over those configurations

    def as_dict(self) -> dict:
        return {
            "n_cells": self.n_cells,
            "e_min": f"{self.e_min.numerator}/{self.e_min.denominator}",
            "omega": str(self.omega),
            "m_sum": str(self.m_sum),
        }


def _check_guard(n_cells: int) -> None:
    if n_cells < 1:
        raise ValueError(f"n_cells must be >= 1, got {n_cells}")
    if n_cells > N_CELLS_GUARD:
        raise ValueError(
            f"n_cells={n_cells} exceeds the enumeration guard "
            f"({N_CELLS_GUARD}; 2^{3 * N_CELLS_GUARD} configurations)"
        )


def _cell_tables_exact(ex: ExchangeConstants, h) -> tuple[np.ndarray, np.ndarray, int]:
    """Integer-scaled per-cell energy and magnetization tables.

    Table index packs (s1, s2, s3, s1_next) as 4 bits.  Energies are exact
    integers once multiplied by the returned common denominator.
    """
    j_d, j, j_t = ex.as_fractions()
    h_q = exact_fraction(h)
    den = math.lcm(
        j_d.denominator, j.denominator, j_t.denominator, h_q.denominator
    )
    e_tab = np.empty(16, dtype=np.int64)
    m_tab = np.empty(16, dtype=np.int64)
    for idx in range(16):
        s1 = 1 if idx & 1 else -1
        s2 = 1 if idx & 2 else -1
        s3 = 1 if idx & 4 else -1
        s4 = 1 if idx & 8 else -1
        e = -(j_d * (s1 * s2 + s2 * s3) + j * (s1 * s3) + j_t * (s3 * s4))
        e -= h_q * (s1 + s2 + s3)
        scaled = e * den
        assert scaled.denominator == 1
        e_tab[idx] = scaled.numerator
        m_tab[idx] = s1 + s2 + s3
    return e_tab, m_tab, den


def _cell_table_float(ex: ExchangeConstants, h: float) -> np.ndarray:
    e_tab = np.empty(16, dtype=np.float64)
    for idx in range(16):
        s1 = 1 if idx & 1 else -1
        s2 = 1 if idx & 2 else -1
        s3 = 1 if idx & 4 else -1
        s4 = 1 if idx & 8 else -1
        e = -(ex.j_d * (s1 * s2 + s2 * s3) + ex.j * (s1 * s3) + ex.j_t * (s3 * s4))
        e_tab[idx] = e - h * (s1 + s2 + s3)
    return e_tab


def _chunk_values(configs: np.ndarray, n_cells: int, e_tab: np.ndarray,
                  m_tab: np.ndarray | None):
    """(energy, magnetization) arrays for a chunk of packed configurations."""
    e = np.zeros(configs.shape, dtype=e_tab.dtype)
    m = np.zeros(configs.shape, dtype=np.int64) if m_tab is not None else None
    for i in range(n_cells):
        idx = (configs >> (3 * i)) & 7
        idx |= ((configs >> (3 * ((i + 1) % n_cells))) & 1) << 3
        e += e_tab[idx]
        if m is not None:
            # magnetization needs each cell's own three spins only
            m += m_tab[idx & 7]
    return e, m


def _iter_chunks(n_cells: int):
    total = 1 << (3 * n_cells)
    step = 1 << _CHUNK_BITS
    for lo in range(0, total, step):
        hi = min(lo + step, total)
        yield np.arange(lo, hi, dtype=np.int64)


def brute_partition(ex: ExchangeConstants, pt: FieldPoint, n_cells: int) -> float:
    """log Z by direct summation over all 2^(3*n_cells) configurations."""
    _check_guard(n_cells)
    e_tab = _cell_table_float(ex, pt.h)
    beta = pt.beta
    partial = []
    for configs in _iter_chunks(n_cells):
        e, _ = _chunk_values(configs, n_cells, e_tab, None)
        x = -beta * e
        shift = x.max()
        partial.append(shift + math.log(np.exp(x - shift).sum()))
    return float(np.logaddexp.reduce(partial))


def ground_states(ex: ExchangeConstants, h, n_cells: int) -> GroundStateReport:
    """Exact census of minimal-energy configurations at rational field h."""
    _check_guard(n_cells)
    e_tab, m_tab, den = _cell_tables_exact(ex, h)
    best = None
    omega = 0
    m_sum = 0
    for configs in _iter_chunks(n_cells):
        e, m = _chunk_values(configs, n_cells, e_tab, m_tab)
        chunk_min = int(e.min())
        if best is None or chunk_min < best:
            best = chunk_min
            omega = 0
            m_sum = 0
        if chunk_min <= best:
            hit = e == best
            omega += int(np.count_nonzero(hit))
            m_sum += int(m[hit].sum())
    return GroundStateReport(n_cells, Fraction(best, den), omega, m_sum)


def ground_states_plus_zero(ex: ExchangeConstants, n_cells: int) -> GroundStateReport:
    """Census in the h -> +0 limit.

    Two-stage selection: minimize the zero-field energy exactly, then keep
    only the minimal states of maximal total magnetization.  Equivalent to
    ground_states(ex, eps, n_cells) for any eps > 0 below the level spacing.
    """
    _check_guard(n_cells)
    e_tab, m_tab, den = _cell_tables_exact(ex, 0)
    best = None
    m_max = None
    omega = 0
    for configs in _iter_chunks(n_cells):
        e, m = _chunk_values(configs, n_cells, e_tab, m_tab)
        chunk_min = int(e.min())
        if best is None or chunk_min < best:
            best = chunk_min
            m_max = None
            omega = 0
        if chunk_min <= best:
            hit = e == best
            chunk_m_max = int(m[hit].max())
            if m_max is None or chunk_m_max > m_max:
                m_max = chunk_m_max
                omega = 0
            if chunk_m_max >= m_max:
                omega += int(np.count_nonzero(hit & (m == m_max)))
    return GroundStateReport(n_cells, Fraction(best, den), omega, m_max * omega)


def omega_sequence(ex: ExchangeConstants, h, n_range, *, plus_zero: bool = False) -> list[int]:
    """Degeneracy counts over a range of ring sizes.

    With plus_zero=True the field argument is ignored and the h -> +0
    two-stage census is used instead.
    """
    out = []
    for n in n_range:
        if plus_zero:
            out.append(ground_states_plus_zero(ex, n).omega)
        else:
            out.append(ground_states(ex, h, n).omega)
    return out


def residual_entropy_estimate(seq) -> float:
    """Entropy per spin from the tail ratio of a degeneracy sequence.

    ln(omega_{n+1}/omega_n)/3 at the largest available n; the ratio form
    converges geometrically, much faster than ln(omega_n)/(3n).
    """
    values = [int(v) for v in seq]
    if len(values) < 3:
        raise ValueError(f"need at least 3 terms, got {len(values)}")
    if any(v <= 0 for v in values):
        raise ValueError("degeneracy counts must be positive")
    return (math.log(values[-1]) - math.log(values[-2])) / 3.0


def zero_field_sector_minima(ex: ExchangeConstants, n_cells: int) -> dict[int, Fraction]:
    """Minimal zero-field energy per total-magnetization sector.

    Keys are total magnetization values M (same parity as 3*n_cells); values
    are exact total energies.  This is the input for critical-field
    crossing arithmetic.
    """
    _check_guard(n_cells)
    e_tab, m_tab, den = _cell_tables_exact(ex, 0)
    n_spins = 3 * n_cells
    n_sectors = n_spins + 1
    acc = np.full(n_sectors, np.iinfo(np.int64).max, dtype=np.int64)
    for configs in _iter_chunks(n_cells):
        e, m = _chunk_values(configs, n_cells, e_tab, m_tab)
        np.minimum.at(acc, (m + n_spins) >> 1, e)
    out = {}
    for k in range(n_sectors):
        if acc[k] != np.iinfo(np.int64).max:
            out[2 * k - n_spins] = Fraction(int(acc[k]), den)
    return out
