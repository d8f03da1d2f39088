import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trichain.model import (
    CASE_PRESETS,
    ChainSpec,
    ExchangeConstants,
    FieldPoint,
    bits_from_spins,
    energy,
    energy_exact,
    exact_fraction,
    spins_from_bits,
    total_magnetization,
)


def spec(n_cells, j_d, j, j_t):
    return ChainSpec(n_cells, ExchangeConstants(j_d, j, j_t))


def all_configs(n_cells):
    for bits in range(1 << (3 * n_cells)):
        yield spins_from_bits(bits, n_cells)


class TestEnergy:
    def test_aligned_ferromagnet(self):
        cfg = np.ones(6, dtype=int)
        assert energy(cfg, spec(2, 1, 1, 1), 0.0) == -8.0

    def test_saturated_zeeman_shift(self):
        cfg = np.ones(9, dtype=int)
        s = spec(3, 0.3, -0.7, 1.2)
        assert energy(cfg, s, 0.9) - energy(cfg, s, 0.0) == pytest.approx(-9 * 0.9, abs=1e-12)

    def test_min_energy_per_spin_ferro_triangles_afm_link(self):
        # exhaustive minimum over all 64 two-cell configurations
        s = spec(2, 1, 1, -1)
        e_min = min(energy(cfg, s, 0.0) for cfg in all_configs(2))
        assert e_min / 6 == pytest.approx(-4.0 / 3.0, abs=1e-12)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="shape"):
            energy(np.ones(5, dtype=int), spec(2, 1, 1, 1), 0.0)

    def test_bad_spin_values_rejected(self):
        cfg = np.ones(6, dtype=int)
        cfg[2] = 0
        with pytest.raises(ValueError, match="-1 or \\+1"):
            energy(cfg, spec(2, 1, 1, 1), 0.0)


class TestEnergyExact:
    def test_matches_float_on_examples(self):
        s = spec(2, 1, 1, 1)
        cfg = np.ones(6, dtype=int)
        assert energy_exact(cfg, s, 0) == -8
        assert energy_exact(cfg, s, 1) == energy(cfg, s, 1.0)

    def test_exact_tie_at_rational_field(self):
        # two configurations with equal energy compare exactly equal
        s = spec(1, 1, 1, -1)
        h = Fraction(2, 3)
        e1 = energy_exact(spins_from_bits(0b011, 1), s, h)
        e2 = energy_exact(spins_from_bits(0b110, 1), s, h)
        assert e1 == e2

    def test_agreement_with_float_on_random_configs(self):
        rng = np.random.default_rng(7)
        s = spec(3, -1, 2, -3)
        for _ in range(1000):
            cfg = rng.choice([-1, 1], size=9)
            exact = energy_exact(cfg, s, Fraction(1, 2))
            approx = energy(cfg, s, 0.5)
            assert abs(float(exact) - approx) < 1e-12

    def test_rejects_inexact_float_field(self):
        with pytest.raises(ValueError, match="exact rational"):
            energy_exact(np.ones(3, dtype=int), spec(1, 1, 1, 1), 2 / 3)

    def test_string_fractions_accepted(self):
        got = energy_exact(np.ones(3, dtype=int), spec(1, 1, 1, 1), "2/3")
        assert got == -4 - Fraction(2, 3) * 3


class TestTotalMagnetization:
    def test_saturated(self):
        assert total_magnetization(np.ones(6, dtype=int)) == 6

    def test_opposite_triangles(self):
        assert total_magnetization(np.array([1, 1, 1, -1, -1, -1])) == 0

    def test_one_down_per_triangle(self):
        cfg = np.array([1, 1, -1] * 3)
        assert total_magnetization(cfg) == 3  # m = 1/3 per spin


config_strategy = st.integers(min_value=2, max_value=4).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.sampled_from([-1, 1]), min_size=3 * n, max_size=3 * n),
        st.tuples(*[st.integers(-3, 3) for _ in range(3)]),
    )
)


class TestInvariants:
    @given(config_strategy)
    @settings(max_examples=60, deadline=None)
    def test_global_flip_symmetry_at_zero_field(self, data):
        n, cfg, (j_d, j, j_t) = data
        s = spec(n, j_d, j, j_t)
        assert energy(np.array(cfg), s, 0.0) == pytest.approx(
            energy(-np.array(cfg), s, 0.0), abs=1e-12
        )

    @given(config_strategy, st.floats(-5, 5, allow_nan=False))
    @settings(max_examples=60, deadline=None)
    def test_zeeman_linearity(self, data, h):
        n, cfg, (j_d, j, j_t) = data
        s = spec(n, j_d, j, j_t)
        cfg = np.array(cfg)
        expected = energy(cfg, s, 0.0) - h * total_magnetization(cfg)
        assert energy(cfg, s, h) == pytest.approx(expected, abs=1e-9)

    @given(config_strategy)
    @settings(max_examples=60, deadline=None)
    def test_translation_invariance(self, data):
        n, cfg, (j_d, j, j_t) = data
        s = spec(n, j_d, j, j_t)
        cfg = np.array(cfg)
        shifted = np.roll(cfg, 3)
        assert energy(cfg, s, 0.7) == pytest.approx(energy(shifted, s, 0.7), abs=1e-12)

    @given(config_strategy)
    @settings(max_examples=60, deadline=None)
    def test_magnetization_parity(self, data):
        n, cfg, _ = data
        m = total_magnetization(np.array(cfg))
        assert abs(m) <= 3 * n
        assert (m - 3 * n) % 2 == 0


class TestTypes:
    def test_field_point_requires_positive_temperature(self):
        with pytest.raises(ValueError, match="positive"):
            FieldPoint(h=1.0, t=0.0)
        with pytest.raises(ValueError, match="positive"):
            FieldPoint(h=1.0, t=-2.0)

    def test_chain_spec_requires_cells(self):
        with pytest.raises(ValueError):
            ChainSpec(0, ExchangeConstants(1, 1, 1))

    def test_exchange_must_be_finite(self):
        with pytest.raises(ValueError, match="finite"):
            ExchangeConstants(math.inf, 0, 0)

    def test_presets(self):
        assert CASE_PRESETS["a"] == ExchangeConstants(-1.0, -1.0, -1.0)
        assert CASE_PRESETS["b"] == ExchangeConstants(-1.0, -1.0, 1.0)
        assert CASE_PRESETS["c"] == ExchangeConstants(1.0, 1.0, -1.0)
        assert CASE_PRESETS["d"] == ExchangeConstants(1.0, -1.0, -1.0)

    def test_exact_fraction_conversions(self):
        assert exact_fraction(3) == 3
        assert exact_fraction(Fraction(2, 3)) == Fraction(2, 3)
        assert exact_fraction("2/3") == Fraction(2, 3)
        assert exact_fraction(-1.0) == -1
        with pytest.raises(ValueError):
            exact_fraction(0.1 + 0.2)


class TestBitPacking:
    def test_round_trip(self):
        for bits in (0, 1, 0b101101, (1 << 9) - 1):
            assert bits_from_spins(spins_from_bits(bits, 3)) == bits

    def test_bit_convention(self):
        # bit = 1 means spin +1; bit k is flat index k = 3*cell + in-cell slot
        cfg = spins_from_bits(0b000001, 2)
        assert cfg[0] == 1 and np.all(cfg[1:] == -1)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            spins_from_bits(1 << 6, 2)
