"""One-shot verification battery behind the `reproduce` CLI command.

Each check recomputes one published feature of the model family from
scratch (critical fields, degeneracy sequences, residual entropies,
ground-state magnetizations, oracle equivalences, symmetry limits, entropy
peaks, Monte Carlo overlays) and reports pass/fail with a one-line detail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import critical, enumeration, montecarlo, sequences, transfer
from .model import CASE_PRESETS, ChainSpec, ExchangeConstants, FieldPoint

__all__ = ["CheckResult", "run_checks"]

_CASE_TEMPS = {"a": 0.25, "b": 0.25, "c": 0.35, "d": 0.15}
_CASE_HC = {"a": Fraction(3), "b": Fraction(2), "c": Fraction(2, 3), "d": Fraction(1)}
_CASE_M0 = {"a": Fraction(1, 3), "b": Fraction(1, 3), "c": Fraction(0), "d": Fraction(1, 3)}

# degeneracy formulas at the critical field and at zero field, by case
_OMEGA_CRITICAL = {
    "a": lambda n: sequences.lucas(2 * n),
    "b": lambda n: sequences.pell_lucas(n),
    "c": lambda n: sequences.lucas(n),
    "d": lambda n: sequences.lucas(2 * n),
}
_MSUM_CRITICAL = {
    "a": lambda n: n * sequences.fibonacci(2 * n + 3),
    "b": lambda n: 2 * n * sequences.pell(n + 1),
    "c": lambda n: 3 * n * sequences.fibonacci(n),
    "d": lambda n: n * sequences.fibonacci(2 * n + 3),
}
_OMEGA_ZERO = {
    "a": sequences.one_plus_pow3,
    "b": sequences.alt_plus_pow3,
    "d": sequences.one_plus_pow3,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name, bool(passed), detail)


def _table1_checks() -> list[CheckResult]:
    out = []
    for tag in "abcd":
        ex = CASE_PRESETS[tag]
        points = critical.critical_fields(ex, 7)
        m0 = critical.residual_magnetization(ex, 6)
        ok = (
            len(points) == 1
            and points[0].h_c == _CASE_HC[tag]
            and m0 == _CASE_M0[tag]
        )
        got = ", ".join(str(p.h_c) for p in points) or "none"
        out.append(_check(
            f"critical-field-table/{tag}", ok,
            f"h_c={got} (expected {_CASE_HC[tag]}), m0={m0} (expected {_CASE_M0[tag]})",
        ))
    return out


def _sequence_checks(n_max: int) -> list[CheckResult]:
    out = []
    for tag in "abcd":
        ex = CASE_PRESETS[tag]
        reports = [enumeration.ground_states(ex, _CASE_HC[tag], n) for n in range(1, n_max + 1)]
        omegas = [r.omega for r in reports]
        msums = [r.m_sum for r in reports]
        omega_ok = omegas == [_OMEGA_CRITICAL[tag](n) for n in range(1, n_max + 1)]
        msum_ok = msums == [_MSUM_CRITICAL[tag](n) for n in range(1, n_max + 1)]
        tags = {m.describe() for m in sequences.identify(omegas)}
        out.append(_check(
            f"degeneracy-at-hc/{tag}", omega_ok and msum_ok,
            f"omega={omegas} identified as {sorted(tags)}",
        ))
    for tag, formula in _OMEGA_ZERO.items():
        ex = CASE_PRESETS[tag]
        omegas = [enumeration.ground_states(ex, 0, n).omega for n in range(1, n_max + 1)]
        ok = omegas == [formula(n) for n in range(1, n_max + 1)]
        out.append(_check(f"degeneracy-at-zero-field/{tag}", ok, f"omega={omegas}"))
    # case c freezes into the two alternating-triangle states on even rings
    reps = [enumeration.ground_states_plus_zero(CASE_PRESETS["c"], n) for n in (4, 6)]
    ok = all(r.omega == 2 and r.m_sum == 0 for r in reps)
    out.append(_check(
        "degeneracy-at-zero-field/c", ok,
        f"even rings give (omega, m_sum) = {[(r.omega, r.m_sum) for r in reps]} (expected (2, 0))",
    ))
    return out


def _entropy_constant_checks(n_max: int) -> list[CheckResult]:
    out = []
    for tag in "abcd":
        ex = CASE_PRESETS[tag]
        seq = enumeration.omega_sequence(ex, _CASE_HC[tag], range(1, n_max + 1))
        est = enumeration.residual_entropy_estimate(seq)
        target = sequences.asymptotic_constants(tag, "critical")[0]
        out.append(_check(
            f"residual-entropy-at-hc/{tag}", abs(est - target) < 1e-3,
            f"ratio estimate {est:.5f} vs {target:.5f}",
        ))
    for tag in "abd":
        ex = CASE_PRESETS[tag]
        seq = enumeration.omega_sequence(ex, 0, range(1, n_max + 1))
        est = enumeration.residual_entropy_estimate(seq)
        target = sequences.asymptotic_constants(tag, "zero")[0]
        out.append(_check(
            f"residual-entropy-at-zero-field/{tag}", abs(est - target) < 1e-3,
            f"ratio estimate {est:.5f} vs {target:.5f}",
        ))
    return out


def _gs_magnetization_checks(n_max: int) -> list[CheckResult]:
    out = []
    for tag in "abcd":
        ex = CASE_PRESETS[tag]
        rep = enumeration.ground_states(ex, _CASE_HC[tag], n_max)
        got = rep.m_sum / (3 * rep.n_cells * rep.omega)
        target = sequences.asymptotic_constants(tag, "critical")[1]
        out.append(_check(
            f"gs-magnetization-at-hc/{tag}", abs(got - target) < 5e-3,
            f"omega-weighted m {got:.5f} vs {target:.5f}",
        ))
    return out


def _oracle_checks() -> list[CheckResult]:
    rng = np.random.default_rng(20240811)
    worst = 0.0
    for tag in "abcd":
        ex = CASE_PRESETS[tag]
        for n in (2, 3, 4):
            pt = FieldPoint(float(rng.uniform(-2, 2)), float(rng.uniform(0.4, 2.5)))
            a = transfer.partition_finite(ex, pt, n)
            b = enumeration.brute_partition(ex, pt, n)
            worst = max(worst, abs(a - b) / abs(b))
    for _ in range(5):
        ex = ExchangeConstants(*(float(v) for v in rng.uniform(-2, 2, 3)))
        pt = FieldPoint(float(rng.uniform(-2, 2)), float(rng.uniform(0.4, 2.5)))
        for n in (1, 3, 5):
            a = transfer.partition_finite(ex, pt, n)
            b = enumeration.brute_partition(ex, pt, n)
            worst = max(worst, abs(a - b) / abs(b))
    checks = [_check(
        "finite-ring-partition-oracle", worst < 1e-10,
        f"worst |log Z| relative difference {worst:.2e} (tolerance 1e-10)",
    )]

    worst = 0.0
    for _ in range(50):
        ex = ExchangeConstants(*(float(v) for v in rng.uniform(-2, 2, 3)))
        pt = FieldPoint(float(rng.uniform(-2, 2)), float(rng.uniform(0.3, 3.0)))
        tm = transfer.build_transfer(ex, pt)
        for ia, s1 in enumerate((1, -1)):
            for ib, s4 in enumerate((1, -1)):
                terms = []
                for s2 in (1, -1):
                    for s3 in (1, -1):
                        a_term = ex.j_d * s2 * (s1 + s3) + ex.j * s1 * s3 + ex.j_t * s3 * s4
                        b_term = 0.5 * (s1 + 2 * s2 + 2 * s3 + s4)
                        terms.append((a_term + pt.h * b_term) / pt.t)
                shift = max(terms)
                direct = shift + math.log(sum(math.exp(g - shift) for g in terms))
                ours = tm.log_scale + math.log(tm.r[ia, ib])
                worst = max(worst, abs(direct - ours) / max(abs(direct), 1.0))
    checks.append(_check(
        "transfer-element-identity", worst < 1e-12,
        f"worst log-relative element deviation {worst:.2e} (tolerance 1e-12)",
    ))

    # h = 0 is excluded (both derivatives vanish by symmetry there, which
    # the symmetry check covers); the 1e-2 floor keeps the relative measure
    # meaningful where both sides sit at the finite-difference noise floor
    worst = 0.0
    for tag in "abcd":
        ex = CASE_PRESETS[tag]
        for t in np.geomspace(0.05, 2.0, 10):
            for h in np.linspace(0.2, 4.0, 10):
                pt = FieldPoint(float(h), float(t))
                at, ah = transfer.lambda_derivatives(ex, pt)
                ft, fh = transfer.lambda_derivatives_fd(ex, pt)
                for a, b in ((at, ft), (ah, fh)):
                    worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-2))
    checks.append(_check(
        "thermodynamic-derivative-consistency", worst < 1e-6,
        f"worst analytic-vs-finite-difference relative deviation {worst:.2e}",
    ))
    return checks


def _symmetry_checks() -> list[CheckResult]:
    ok = True
    details = []
    for tag in "abcd":
        ex = CASE_PRESETS[tag]
        for h in (0.3, 1.1, 2.7):
            for t in (0.3, 1.0):
                mp = transfer.magnetization(ex, FieldPoint(h, t))
                mm = transfer.magnetization(ex, FieldPoint(-h, t))
                sp = transfer.entropy(ex, FieldPoint(h, t))
                sm = transfer.entropy(ex, FieldPoint(-h, t))
                ok &= abs(mp + mm) < 1e-10 and abs(sp - sm) < 1e-10
        s_hi = transfer.entropy(ex, FieldPoint(0.0, 1e6))
        m_hi = transfer.magnetization(ex, FieldPoint(0.0, 1e6))
        m_sat = transfer.magnetization(ex, FieldPoint(50.0, 1.0))
        ok &= abs(s_hi - math.log(2.0)) < 1e-6 and abs(m_hi) < 1e-9
        ok &= abs(m_sat - 1.0) < 1e-9
        pair = transfer.eigen(transfer.build_transfer(ex, FieldPoint(0.7, 0.5)))
        ok &= abs(pair.lambda_minus_ratio) <= 1.0
    details.append("m odd, s even, s(T->inf)=ln 2, m(h->inf)=1, |ratio|<=1")
    return [_check("symmetry-and-limits", ok, details[0])]


def _plateau_checks() -> list[CheckResult]:
    out = []
    for tag, h_mid in (("a", 1.5), ("b", 1.0), ("d", 0.5)):
        ex = CASE_PRESETS[tag]
        m = transfer.magnetization(ex, FieldPoint(h_mid, 0.05))
        out.append(_check(
            f"plateau-value/{tag}", abs(m - 1.0 / 3.0) < 1e-4,
            f"m(h={h_mid}, t=0.05) = {m:.6f} vs 1/3",
        ))
    return out


def _entropy_peak_checks() -> list[CheckResult]:
    out = []
    grid = np.arange(0.0, 4.5 + 1e-9, 0.01)
    s0_target = math.log(3.0) / 3.0
    for tag in "abcd":
        ex = CASE_PRESETS[tag]
        h_c = float(_CASE_HC[tag])
        s_c_target = sequences.asymptotic_constants(tag, "critical")[0]
        peaks = critical.entropy_peak_scan(ex, 0.1, grid)
        expected = ([0.0] if tag != "c" else []) + [h_c]
        pos_ok = len(peaks) == len(expected) and all(
            abs(h - want) <= 0.05 for (h, _), want in zip(peaks, expected)
        )
        height_ok = True
        if tag != "c":
            height_ok &= abs(peaks[0][1] - s0_target) < 5e-3 if peaks else False
        s_c = transfer.entropy(ex, FieldPoint(h_c, 0.01))
        height_ok &= abs(s_c - s_c_target) < 5e-3
        out.append(_check(
            f"entropy-peaks/{tag}", pos_ok and height_ok,
            f"peaks at {[round(h, 3) for h, _ in peaks]}, "
            f"s(h_c, t->0) = {s_c:.5f} vs {s_c_target:.5f}",
        ))
    return out


def _mc_checks() -> list[CheckResult]:
    out = []
    for tag, h_max, n_cells in (("a", 4.0, 100), ("d", 2.0, 100)):
        ex = CASE_PRESETS[tag]
        t = _CASE_TEMPS[tag]
        spec = ChainSpec(n_cells, ex)
        h_grid = np.linspace(0.0, h_max, 13)[1:]
        results = montecarlo.mc_curve(spec, h_grid, t, montecarlo.McParams())
        z_worst = 0.0
        for h, r in zip(h_grid, results):
            m_exact = transfer.magnetization(ex, FieldPoint(float(h), t))
            z_worst = max(z_worst, abs(r.m_mean - m_exact) / max(r.m_stderr, 1e-15))
        out.append(_check(
            f"monte-carlo-overlay/{tag}", z_worst < 3.0,
            f"worst |z| over {len(h_grid)} field points = {z_worst:.2f}",
        ))
    return out


def run_checks(include_mc: bool = True, n_max: int = 8) -> list[CheckResult]:
    """Run the full battery; n_max bounds the enumeration ring size."""
    checks = []
    checks += _table1_checks()
    checks += _sequence_checks(n_max)
    checks += _entropy_constant_checks(n_max)
    checks += _gs_magnetization_checks(n_max)
    checks += _oracle_checks()
    checks += _symmetry_checks()
    checks += _plateau_checks()
    checks += _entropy_peak_checks()
    if include_mc:
        checks += _mc_checks()
    return checks
