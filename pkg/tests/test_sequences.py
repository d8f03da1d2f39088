import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trichain.sequences import (
    GOLDEN,
    SILVER,
    SequenceMatch,
    alt_plus_pow3,
    asymptotic_constants,
    closed_form,
    fibonacci,
    identify,
    lucas,
    one_plus_pow3,
    pell,
    pell_lucas,
)


class TestValues:
    def test_lucas(self):
        assert [lucas(n) for n in range(1, 11)] == [1, 3, 4, 7, 11, 18, 29, 47, 76, 123]
        assert lucas(0) == 2

    def test_fibonacci(self):
        assert [fibonacci(n) for n in range(1, 11)] == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55]
        assert fibonacci(0) == 0

    def test_pell(self):
        assert [pell(n) for n in range(7)] == [0, 1, 2, 5, 12, 29, 70]

    def test_pell_lucas(self):
        assert [pell_lucas(n) for n in range(1, 5)] == [2, 6, 14, 34]
        assert pell_lucas(0) == 2

    def test_pow3_families(self):
        assert [one_plus_pow3(n) for n in range(1, 7)] == [4, 10, 28, 82, 244, 730]
        assert [alt_plus_pow3(n) for n in range(1, 7)] == [2, 10, 26, 82, 242, 730]

    def test_negative_index_rejected(self):
        for fn in (lucas, fibonacci, pell, pell_lucas, one_plus_pow3, alt_plus_pow3):
            with pytest.raises(ValueError):
                fn(-1)

    def test_lucas_fibonacci_identity(self):
        for n in range(1, 51):
            assert lucas(n) == fibonacci(n - 1) + fibonacci(n + 1)


class TestClosedForms:
    @pytest.mark.parametrize("kind,fn", [
        ("lucas", lucas), ("fibonacci", fibonacci), ("pell", pell), ("pell_lucas", pell_lucas),
    ])
    def test_recurrence_matches_closed_form(self, kind, fn):
        for n in range(41):
            exact = fn(n)
            approx = closed_form(kind, n)
            assert abs(approx - exact) <= 1e-9 * max(1, exact)

    def test_ratio_limits(self):
        lucas_ratios = [lucas(n + 1) / lucas(n) for n in range(5, 40)]
        assert abs(lucas_ratios[-1] - GOLDEN) < 1e-12
        gaps = [abs(r - GOLDEN) for r in lucas_ratios]
        assert all(a >= b for a, b in zip(gaps, gaps[1:]))
        q_ratios = [pell_lucas(n + 1) / pell_lucas(n) for n in range(5, 30)]
        assert abs(q_ratios[-1] - SILVER) < 1e-12

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            closed_form("one_plus_pow3", 3)


class TestIdentify:
    def test_even_lucas(self):
        matches = identify([3, 7, 18, 47, 123, 322, 843])
        assert SequenceMatch("lucas", 2, 0, 1) in matches

    def test_odd_fibonacci(self):
        matches = identify([5, 13, 34, 89, 233, 610, 1597])
        assert SequenceMatch("fibonacci", 2, 3, 1) in matches

    def test_twice_pell(self):
        matches = identify([4, 10, 24, 58, 140, 338])
        assert SequenceMatch("pell", 1, 1, 2) in matches

    def test_no_match(self):
        assert identify([1, 4, 9, 16, 25]) == []

    def test_short_input_rejected(self):
        with pytest.raises(ValueError):
            identify([1, 2, 3])

    def test_describe(self):
        assert SequenceMatch("lucas", 2, 0, 1).describe() == "lucas(2n)"
        assert SequenceMatch("pell", 1, 1, 2).describe() == "2*pell(n+1)"
        assert SequenceMatch("fibonacci", 2, 3, 1).describe() == "fibonacci(2n+3)"

    @given(
        st.sampled_from(["lucas", "fibonacci", "pell", "pell_lucas"]),
        st.integers(1, 2),
        st.integers(0, 3),
        st.sampled_from([1, 2, 3]),
        st.integers(4, 7),
    )
    @settings(max_examples=40, deadline=None)
    def test_round_trip(self, kind, a, b, scale, length):
        match = SequenceMatch(kind, a, b, scale)
        seq = [match.value(n) for n in range(1, length + 1)]
        assert match in identify(seq)


class TestAsymptoticConstants:
    def test_values(self):
        ln3_3 = math.log(3.0) / 3.0
        assert asymptotic_constants("a", "zero") == pytest.approx((ln3_3, 1 / 3))
        assert asymptotic_constants("c", "zero") == (0.0, 0.0)
        s, m = asymptotic_constants("a", "critical")
        assert s == pytest.approx(0.32081, abs=1e-5)
        assert m == pytest.approx(0.63148, abs=1e-5)
        s, m = asymptotic_constants("b", "critical")
        assert s == pytest.approx(0.29379, abs=1e-5)
        assert m == pytest.approx(0.56904, abs=1e-5)
        s, m = asymptotic_constants("c", "critical")
        assert s == pytest.approx(0.16040, abs=1e-5)
        assert m == pytest.approx(0.44721, abs=1e-5)
        assert asymptotic_constants("d", "critical") == asymptotic_constants("a", "critical")

    def test_unknown_case(self):
        with pytest.raises(ValueError):
            asymptotic_constants("e", "zero")
        with pytest.raises(ValueError):
            asymptotic_constants("a", "both")
