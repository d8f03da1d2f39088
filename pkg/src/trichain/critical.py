"""Zero-temperature critical fields, plateaus, and residual magnetization.

At T = 0 the ground energy as a function of field is the lower envelope of
the per-sector lines E_0(M) - h*M, where E_0(M) is the minimal zero-field
energy in the total-magnetization sector M.  The envelope's kinks are the
critical fields, exact rationals h_c = dE/dM between consecutive vertices of
the lower convex hull of the (M, E_0(M)) points.  Degeneracy-weighted
entropies and magnetizations at each kink come from exact enumeration at
h = h_c.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .enumeration import (
    N_CELLS_GUARD,
    ground_states,
    ground_states_plus_zero,
    zero_field_sector_minima,
)
from .model import ExchangeConstants, FieldPoint
from . import transfer

__all__ = [
    "PhasePoint",
    "critical_fields",
    "residual_magnetization",
    "entropy_peak_scan",
]


@dataclass(frozen=True)
class PhasePoint:
    """One zero-temperature transition: field, flanking plateaus, and the
    degeneracy-weighted values exactly at the transition."""

    h_c: Fraction
    m_below: Fraction  # plateau magnetization per spin just below h_c
    m_above: Fraction  # and just above
    m_at: float  # degeneracy-weighted magnetization at h_c
    s_at: float  # residual entropy per spin at h_c

    def as_dict(self) -> dict:
        return {
            "h_c": f"{self.h_c.numerator}/{self.h_c.denominator}",
            "m_below": float(self.m_below),
            "m_above": float(self.m_above),
            "m_at": self.m_at,
            "s_at": self.s_at,
        }


def _envelope_slopes(ex: ExchangeConstants, n_cells: int) -> list[tuple[Fraction, Fraction, Fraction]]:
    """Kinks of the T=0 lower envelope for h > 0 at one ring size.

    Returns (h_c, m_below, m_above) triples with per-spin plateau values.
    Collinear sector points are not kinks; they only enlarge the degenerate
    manifold at the transition.
    """
    sector = zero_field_sector_minima(ex, n_cells)
    e_min = min(sector.values())
    m_start = max(m for m, e in sector.items() if e == e_min)
    points = sorted((m, e) for m, e in sector.items() if m >= m_start)
    # lower convex hull in (M, E): keep slopes strictly increasing
    hull: list[tuple[int, Fraction]] = []
    for m, e in points:
        while len(hull) >= 2:
            (m1, e1), (m2, e2) = hull[-2], hull[-1]
            # drop the middle point if it lies on or above the chord
            if (e2 - e1) * (m - m1) >= (e - e1) * (m2 - m1):
                hull.pop()
            else:
                break
        hull.append((m, e))
    n_spins = 3 * n_cells
    out = []
    for (m1, e1), (m2, e2) in zip(hull[:-1], hull[1:]):
        h_c = Fraction(e2 - e1, m2 - m1)
        if h_c > 0:
            out.append((h_c, Fraction(m1, n_spins), Fraction(m2, n_spins)))
    return out


def critical_fields(ex: ExchangeConstants, n_cells: int = 7) -> list[PhasePoint]:
    """All h > 0 zero-temperature transitions for one coupling set.

    Crossings are computed at the three largest ring sizes up to n_cells and
    must agree on the h_c values; a disagreement raises a finite-size
    warning.  Plateau magnetizations are reported from the largest even ring
    (odd rings of an inter-cell antiferromagnet carry a frustrated bond that
    shifts sector minima by a 1/n artifact).
    """
    if n_cells < 4:
        raise ValueError(f"need n_cells >= 4 for a finite-size check, got {n_cells}")
    n_cells = min(n_cells, 7)  # enumeration backend bound
    sizes = [n_cells - 2, n_cells - 1, n_cells]
    per_size = {n: _envelope_slopes(ex, n) for n in sizes}
    h_sets = {n: [hc for hc, _, _ in rows] for n, rows in per_size.items()}
    if any(h_sets[n] != h_sets[sizes[-1]] for n in sizes):
        warnings.warn(
            f"critical fields differ across ring sizes {sizes}: {h_sets}; "
            "reporting the largest even ring",
            stacklevel=2,
        )
    n_report = n_cells if n_cells % 2 == 0 else n_cells - 1
    points = []
    for h_c, m_below, m_above in per_size.get(n_report, per_size[sizes[-1]]):
        reports = [ground_states(ex, h_c, n) for n in (n_cells - 1, n_cells)]
        last = reports[-1]
        m_at = last.m_sum / (3 * last.n_cells * last.omega)
        s_at = (math.log(reports[-1].omega) - math.log(reports[-2].omega)) / 3.0
        points.append(PhasePoint(h_c, m_below, m_above, m_at, s_at))
    return points


def residual_magnetization(ex: ExchangeConstants, n_cells: int = 6) -> Fraction:
    """Magnetization per spin in the h -> +0, T = 0 limit, exact.

    Evaluated on even rings (the two largest even sizes up to n_cells must
    agree, otherwise a finite-size warning is raised and the larger ring
    wins).  Odd rings are skipped for the same frustrated-bond reason as in
    critical_fields.
    """
    n_even = min(n_cells, N_CELLS_GUARD)
    n_even -= n_even % 2
    if n_even < 2:
        raise ValueError(f"need n_cells >= 2, got {n_cells}")
    values = []
    for n in (n_even - 2, n_even):
        if n < 2:
            continue
        rep = ground_states_plus_zero(ex, n)
        values.append(Fraction(rep.m_sum, 3 * rep.n_cells * rep.omega))
    if len(values) == 2 and values[0] != values[1]:
        warnings.warn(
            f"residual magnetization not converged: {values[0]} at n={n_even - 2} "
            f"vs {values[1]} at n={n_even}",
            stacklevel=2,
        )
    return values[-1]


def entropy_peak_scan(ex: ExchangeConstants, t_low: float, h_grid) -> list[tuple[float, float]]:
    """Local maxima (h, s) of the entropy along a field grid at fixed T.

    Grid endpoints count as peaks when they exceed their single neighbour,
    so a grid starting at h = 0 picks up the zero-field degeneracy peak.
    A small absolute prominence (1e-9) filters out rounding ripple on the
    entropy floor of saturated regions.
    """
    if t_low <= 0.0:
        raise ValueError(f"t_low must be positive, got {t_low}")
    table = transfer.sweep(ex, h_grid, [t_low])
    h, s = table.h, table.s
    n = h.size
    if n == 0:
        return []
    if n == 1:
        return [(float(h[0]), float(s[0]))]
    eps = 1e-9
    peaks = []
    for i in range(n):
        left_ok = i == 0 or s[i] > s[i - 1] + eps
        right_ok = i == n - 1 or s[i] > s[i + 1] + eps
        if left_ok and right_ok:
            peaks.append((float(h[i]), float(s[i])))
    return peaks
