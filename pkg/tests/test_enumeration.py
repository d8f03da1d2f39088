import math
from fractions import Fraction

import numpy as np
import pytest

from trichain.enumeration import (
    GroundStateReport,
    N_CELLS_GUARD,
    brute_partition,
    ground_states,
    ground_states_plus_zero,
    omega_sequence,
    residual_entropy_estimate,
    zero_field_sector_minima,
)
from trichain.model import (
    CASE_PRESETS,
    ChainSpec,
    ExchangeConstants,
    FieldPoint,
    energy_exact,
    spins_from_bits,
    total_magnetization,
)
from trichain.transfer import partition_finite
from trichain.sequences import fibonacci, lucas, pell, pell_lucas


class TestBrutePartition:
    def test_free_spins(self):
        got = brute_partition(CASE_PRESETS["a"], FieldPoint(0.0, 1e8), 1)
        assert got == pytest.approx(3 * math.log(2), abs=1e-6)

    def test_matches_transfer_route(self):
        ex = CASE_PRESETS["a"]
        pt = FieldPoint(1.0, 0.5)
        a = brute_partition(ex, pt, 3)
        b = partition_finite(ex, pt, 3)
        assert abs(a - b) / abs(b) < 1e-10

    def test_field_reversal(self):
        ex = ExchangeConstants(0.5, -1.5, 0.75)
        for n in (1, 2, 3):
            zp = brute_partition(ex, FieldPoint(0.8, 0.7), n)
            zm = brute_partition(ex, FieldPoint(-0.8, 0.7), n)
            assert abs(zp - zm) < 1e-12

    def test_guard(self):
        with pytest.raises(ValueError, match="guard"):
            brute_partition(CASE_PRESETS["a"], FieldPoint(0.0, 1.0), N_CELLS_GUARD + 1)


class TestGroundStates:
    def test_case_a_at_critical_field(self):
        omegas = [ground_states(CASE_PRESETS["a"], 3, n).omega for n in range(1, 8)]
        assert omegas == [3, 7, 18, 47, 123, 322, 843]

    def test_case_b_at_critical_field(self):
        reports = [ground_states(CASE_PRESETS["b"], 2, n) for n in range(1, 8)]
        assert [r.omega for r in reports] == [2, 6, 14, 34, 82, 198, 478]
        # total magnetization sums follow twice-Pell: M = n * 2 * P(n+1)
        assert [r.m_sum for r in reports] == [2 * n * pell(n + 1) for n in range(1, 8)]

    def test_case_c_zero_field_even_ring(self):
        # two alternating-triangle states on even rings
        r = ground_states(CASE_PRESETS["c"], 0, 4)
        assert (r.omega, r.m_sum) == (2, 0)

    def test_case_c_zero_field_odd_ring(self):
        # an odd ring cannot alternate: one inter-triangle bond stays
        # frustrated and can sit anywhere, in either global orientation
        r = ground_states(CASE_PRESETS["c"], 0, 3)
        assert (r.omega, r.m_sum) == (6, 0)

    def test_exact_energy_agrees_with_model(self):
        ex = ExchangeConstants(1, -1, 1)
        spec = ChainSpec(2, ex)
        rep = ground_states(ex, Fraction(1, 2), 2)
        e_min = min(
            energy_exact(spins_from_bits(b, 2), spec, Fraction(1, 2)) for b in range(64)
        )
        assert rep.e_min == e_min

    def test_report_serialization(self):
        rep = GroundStateReport(2, Fraction(-10, 3), 7, -4)
        assert rep.as_dict() == {
            "n_cells": 2, "e_min": "-10/3", "omega": "7", "m_sum": "-4",
        }


class TestPlusZeroSelection:
    def test_equivalent_to_tiny_positive_field(self):
        eps = Fraction(1, 1000)
        for tag in "abcd":
            ex = CASE_PRESETS[tag]
            for n in range(1, 6):
                two_stage = ground_states_plus_zero(ex, n)
                tilted = ground_states(ex, eps, n)
                assert two_stage.omega == tilted.omega, (tag, n)
                assert two_stage.m_sum == tilted.m_sum, (tag, n)

    def test_polarized_chain_states(self):
        # cases a and d keep exactly the two uniform maximal-magnetization
        # chains; every survivor carries one up-triangle per cell
        for tag in ("a", "d"):
            for n in (2, 3, 4, 5):
                rep = ground_states_plus_zero(CASE_PRESETS[tag], n)
                assert (rep.omega, rep.m_sum) == (2, 2 * n), tag

    def test_case_b_lucas_family(self):
        reps = [ground_states_plus_zero(CASE_PRESETS["b"], n) for n in range(1, 7)]
        assert [r.omega for r in reps] == [lucas(n) for n in range(1, 7)]
        assert all(r.m_sum == r.n_cells * r.omega for r in reps)

    def test_case_c_even_rings(self):
        for n in (2, 4, 6):
            rep = ground_states_plus_zero(CASE_PRESETS["c"], n)
            assert (rep.omega, rep.m_sum) == (2, 0)

    def test_ferromagnet_unique(self):
        rep = ground_states_plus_zero(ExchangeConstants(1, 1, 1), 3)
        assert (rep.omega, rep.m_sum) == (1, 9)


class TestInvariants:
    def test_zero_field_magnetization_cancels(self):
        rng = np.random.default_rng(11)
        for _ in range(6):
            ex = ExchangeConstants(*(int(v) for v in rng.integers(-2, 3, 3)))
            rep = ground_states(ex, 0, 3)
            assert rep.m_sum == 0

    def test_minimal_set_closed_under_cell_shifts(self):
        ex = CASE_PRESETS["d"]
        spec = ChainSpec(3, ex)
        energies = {
            b: energy_exact(spins_from_bits(b, 3), spec, Fraction(1, 4))
            for b in range(512)
        }
        e_min = min(energies.values())
        minimal = {b for b, e in energies.items() if e == e_min}
        for b in minimal:
            cfg = spins_from_bits(b, 3)
            shifted = np.roll(cfg, 3)
            assert sum(
                (1 << k) for k, s in enumerate(shifted) if s == 1
            ) in minimal

    def test_low_temperature_free_energy_matches_census(self):
        # -T log Z / N -> (E_min - T ln Omega)/N once excited states freeze out
        h = Fraction(1, 2)  # away from every critical field
        t = 0.01
        for tag in "abcd":
            ex = CASE_PRESETS[tag]
            rep = ground_states(ex, h, 4)
            log_z = brute_partition(ex, FieldPoint(0.5, t), 4)
            lhs = -t * log_z / 12
            rhs = (float(rep.e_min) - t * math.log(rep.omega)) / 12
            assert abs(lhs - rhs) < 1e-6, tag


class TestOmegaSequence:
    def test_modes(self):
        ex = CASE_PRESETS["a"]
        assert omega_sequence(ex, 3, range(1, 5)) == [3, 7, 18, 47]
        assert omega_sequence(ex, 0, range(1, 5)) == [4, 10, 28, 82]
        assert omega_sequence(ex, 0, range(1, 5), plus_zero=True) == [2, 2, 2, 2]


class TestResidualEntropyEstimate:
    def test_even_lucas_converges_to_golden_rate(self):
        seq = [lucas(2 * n) for n in range(1, 8)]
        target = (2.0 / 3.0) * math.log((1 + math.sqrt(5)) / 2)
        assert abs(residual_entropy_estimate(seq) - target) < 1e-3

    def test_pow3_converges_to_log3_rate(self):
        seq = [1 + 3**n for n in range(1, 8)]
        assert abs(residual_entropy_estimate(seq) - math.log(3) / 3) < 1e-3

    def test_unique_ground_state(self):
        assert residual_entropy_estimate([1, 1, 1]) == 0.0

    def test_errors(self):
        with pytest.raises(ValueError):
            residual_entropy_estimate([2, 4])
        with pytest.raises(ValueError):
            residual_entropy_estimate([3, 0, 5])


class TestSectorMinima:
    def test_against_direct_scan(self):
        ex = CASE_PRESETS["c"]
        spec = ChainSpec(3, ex)
        direct = {}
        for b in range(512):
            cfg = spins_from_bits(b, 3)
            m = total_magnetization(cfg)
            e = energy_exact(cfg, spec, 0)
            if m not in direct or e < direct[m]:
                direct[m] = e
        assert zero_field_sector_minima(ex, 3) == direct
