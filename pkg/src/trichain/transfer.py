"""Transfer-matrix thermodynamics of the triangle chain.

Summing the two inner spins of a cell against the Boltzmann weight leaves a
2x2 positive matrix R over the cell-boundary spin (index 0 means +1, index 1
means -1):

    R(a, b) = sum_{s2, s3} exp( [A + h*B] / t ),
    A = j_d*s2*(a + s3) + j*a*s3 + j_t*s3*b,
    B = (a + 2*s2 + 2*s3 + b) / 2,

so each element is a sum of four exponentials whose exponents are linear in
1/t.  Everything here is computed in the log domain: elements are stored as
log values plus a common scale, and the dominant-eigenvalue derivatives are
assembled as a convex combination of per-element log-derivatives using the
left/right Perron eigenvectors.  That form is free of the catastrophic
cancellation the raw characteristic-polynomial quotient suffers at large
1/t, where off-diagonal elements can be hundreds of log-units below the
diagonal.

Per spin, with lam the dominant eigenvalue:

    f = -(t/3) * ln lam
    s = (ln lam + t * dln(lam)/dt) / 3
    m = (t/3) * dln(lam)/dh
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from numba import njit

from ._rng import next64 as _rng_next, unit as _rng_unit
from .model import ExchangeConstants, FieldPoint

__all__ = [
    "TransferMatrix",
    "EigenPair",
    "build_transfer",
    "eigen",
    "free_energy",
    "entropy",
    "magnetization",
    "lambda_derivatives",
    "lambda_derivatives_fd",
    "partition_finite",
    "SweepTable",
    "sweep",
]

_SPIN = (1, -1)  # matrix index 0 <-> spin +1, index 1 <-> spin -1


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 matrix in log-scaled form: element = exp(log_scale) * r[a, b].

    r is scaled so its maximum element is 1; all elements are positive sums
    of exponentials (at extreme 1/t a subdominant element may underflow to
    0.0, which is harmless for every quantity derived here).
    """

    log_scale: float
    r: np.ndarray


@dataclass(frozen=True)
class EigenPair:
    """Dominant eigenvalue as a log, and the subdominant/dominant ratio."""

    log_lambda_plus: float
    lambda_minus_ratio: float


def _element_terms(ex: ExchangeConstants) -> tuple[np.ndarray, np.ndarray]:
    """Arrays A, B of shape (2, 2, 4): exponent = (A + h*B)/t per element."""
    a_arr = np.empty((2, 2, 4))
    b_arr = np.empty((2, 2, 4))
    for ia, s1 in enumerate(_SPIN):
        for ib, s4 in enumerate(_SPIN):
            k = 0
            for s2 in _SPIN:
                for s3 in _SPIN:
                    a_arr[ia, ib, k] = (
                        ex.j_d * s2 * (s1 + s3) + ex.j * s1 * s3 + ex.j_t * s3 * s4
                    )
                    b_arr[ia, ib, k] = 0.5 * (s1 + 2 * s2 + 2 * s3 + s4)
                    k += 1
    return a_arr, b_arr


def _log_elements(ex, h, t, derivs: bool):
    """log R and optionally its T- and h-derivatives, broadcast over (h, t).

    Returns (L, dL_dt, dL_dh) with shape broadcast(h, t) + (2, 2); the
    derivative slots are None when derivs is False.
    """
    a_arr, b_arr = _element_terms(ex)
    h = np.asarray(h, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if np.any(t <= 0.0) or not (np.all(np.isfinite(t)) and np.all(np.isfinite(h))):
        raise ValueError("temperatures must be finite and positive, fields finite")
    hx = h[..., None, None, None]
    tx = t[..., None, None, None]
    g = (a_arr + hx * b_arr) / tx
    gmax = g.max(axis=-1)
    L = gmax + np.log(np.exp(g - gmax[..., None]).sum(axis=-1))
    if not derivs:
        return L, None, None
    w = np.exp(g - L[..., None])
    # exponents are linear in 1/t: dg/dt = -g/t, dg/dh = B/t
    dL_dt = -(w * g).sum(axis=-1) / t[..., None, None]
    dL_dh = (w * b_arr).sum(axis=-1) / t[..., None, None]
    return L, dL_dt, dL_dh


def _eigen_core(L):
    """Scale, scaled matrix, and dominant-eigenvalue pieces from log R."""
    c = L.max(axis=(-2, -1))
    r = np.exp(L - c[..., None, None])
    r00, r01 = r[..., 0, 0], r[..., 0, 1]
    r10, r11 = r[..., 1, 0], r[..., 1, 1]
    tr = r00 + r11
    delta = r00 - r11
    prod = r01 * r10
    # discriminant as delta^2 + 4*prod: nonnegative by construction, unlike
    # tr^2 - 4*det which cancels catastrophically
    sqrt_d = np.hypot(delta, 2.0 * np.sqrt(prod))
    lam = 0.5 * (tr + sqrt_d)
    det = r00 * r11 - prod
    return c, r, tr, delta, sqrt_d, lam, det


def _dominant_log_derivatives(r, delta, sqrt_d, lam, dL_dt, dL_dh):
    """dln(lam)/dt and dln(lam)/dh via the Perron eigenvector sandwich.

    dln(lam)/dx = sum_ab W_ab * dL_ab/dx with W_ab = u_a r_ab v_b / (u R v),
    u and v the left/right eigenvectors of the scaled matrix.  The branch
    below picks the eigenvector representation with no subtractive
    cancellation (lam minus the smaller diagonal element).
    """
    r00, r01 = r[..., 0, 0], r[..., 0, 1]
    r10, r11 = r[..., 1, 0], r[..., 1, 1]
    big00 = r00 >= r11
    gap = 0.5 * (np.abs(delta) + sqrt_d)  # lam - min(r00, r11), exact algebra
    u0 = np.where(big00, gap, r10)
    u1 = np.where(big00, r01, gap)
    v0 = np.where(big00, gap, r01)
    v1 = np.where(big00, r10, gap)

    w00 = u0 * r00 * v0
    w01 = u0 * r01 * v1
    w10 = u1 * r10 * v0
    w11 = u1 * r11 * v1
    norm = w00 + w01 + w10 + w11

    def combine(dL):
        num = (
            w00 * dL[..., 0, 0]
            + w01 * dL[..., 0, 1]
            + w10 * dL[..., 1, 0]
            + w11 * dL[..., 1, 1]
        )
        with np.errstate(invalid="ignore", divide="ignore"):
            out = num / norm
        # norm == 0 only when both off-diagonals underflowed and the
        # diagonals tie: the matrix is numerically diag(1, 1), follow the
        # dominant diagonal (average on an exact tie)
        fb = np.where(
            r00 > r11,
            dL[..., 0, 0],
            np.where(r11 > r00, dL[..., 1, 1], 0.5 * (dL[..., 0, 0] + dL[..., 1, 1])),
        )
        return np.where(norm > 0.0, out, fb)

    return combine(dL_dt), combine(dL_dh)


def _thermo_core(ex, h, t):
    """(log lam, dln lam/dt, dln lam/dh) broadcast over (h, t) arrays."""
    L, dL_dt, dL_dh = _log_elements(ex, h, t, derivs=True)
    c, r, tr, delta, sqrt_d, lam, det = _eigen_core(L)
    log_lambda = c + np.log(lam)
    dt, dh = _dominant_log_derivatives(r, delta, sqrt_d, lam, dL_dt, dL_dh)
    return log_lambda, dt, dh


def build_transfer(ex: ExchangeConstants, pt: FieldPoint) -> TransferMatrix:
    """The 2x2 cell transfer matrix at a field point, log-scaled."""
    L, _, _ = _log_elements(ex, pt.h, pt.t, derivs=False)
    c = float(L.max())
    return TransferMatrix(log_scale=c, r=np.exp(L - c))


def eigen(tm: TransferMatrix) -> EigenPair:
    """Eigen-decomposition of a transfer matrix.

    The subdominant eigenvalue is recovered as det/lam, which stays accurate
    when the trace and the discriminant nearly coincide.
    """
    r = np.asarray(tm.r, dtype=np.float64)
    if r.shape != (2, 2) or np.any(r < 0.0) or not np.all(np.isfinite(r)):
        raise ValueError("transfer matrix must be a finite nonnegative 2x2 array")
    r00, r01, r10, r11 = r[0, 0], r[0, 1], r[1, 0], r[1, 1]
    tr = r00 + r11
    sqrt_d = math.hypot(r00 - r11, 2.0 * math.sqrt(r01 * r10))
    lam = 0.5 * (tr + sqrt_d)
    if lam <= 0.0:
        raise ValueError("transfer matrix has no positive dominant eigenvalue")
    det = r00 * r11 - r01 * r10
    ratio = det / (lam * lam)
    ratio = min(1.0, max(-1.0, ratio))
    return EigenPair(log_lambda_plus=tm.log_scale + math.log(lam), lambda_minus_ratio=ratio)


def free_energy(ex: ExchangeConstants, pt: FieldPoint) -> float:
    """Free energy per spin in the large-ring limit."""
    log_lambda, _, _ = _thermo_core(ex, pt.h, pt.t)
    return float(-(pt.t / 3.0) * log_lambda)


def entropy(ex: ExchangeConstants, pt: FieldPoint) -> float:
    """Entropy per spin, s = -df/dt."""
    log_lambda, dt, _ = _thermo_core(ex, pt.h, pt.t)
    return float((log_lambda + pt.t * dt) / 3.0)


def magnetization(ex: ExchangeConstants, pt: FieldPoint) -> float:
    """Magnetization per spin, m = -df/dh."""
    _, _, dh = _thermo_core(ex, pt.h, pt.t)
    return float((pt.t / 3.0) * dh)


def lambda_derivatives(ex: ExchangeConstants, pt: FieldPoint) -> tuple[float, float]:
    """(dln lam/dt, dln lam/dh) of the dominant eigenvalue."""
    _, dt, dh = _thermo_core(ex, pt.h, pt.t)
    return float(dt), float(dh)


def _log_lambda(ex, h, t) -> float:
    L, _, _ = _log_elements(ex, h, t, derivs=False)
    c, r, tr, delta, sqrt_d, lam, det = _eigen_core(L)
    return float(c + np.log(lam))


def lambda_derivatives_fd(ex: ExchangeConstants, pt: FieldPoint) -> tuple[float, float]:
    """Central finite differences of ln lam with one Richardson halving.

    Cross-check only; the analytic path in lambda_derivatives is primary.
    """

    def fd(f, x0, step):
        d1 = (f(x0 + step) - f(x0 - step)) / (2.0 * step)
        d2 = (f(x0 + step / 2.0) - f(x0 - step / 2.0)) / step
        return (4.0 * d2 - d1) / 3.0

    step_t = max(1e-6, 1e-6 * abs(pt.t))
    step_t = min(step_t, 0.5 * pt.t)  # keep t positive
    step_h = max(1e-6, 1e-6 * abs(pt.h))
    d_dt = fd(lambda t: _log_lambda(ex, pt.h, t), pt.t, step_t)
    d_dh = fd(lambda h: _log_lambda(ex, h, pt.t), pt.h, step_h)
    return d_dt, d_dh


def partition_finite(ex: ExchangeConstants, pt: FieldPoint, n_cells: int) -> float:
    """log Z of a finite periodic ring: lam_+^n + lam_-^n, computed stably."""
    if n_cells < 1:
        raise ValueError(f"n_cells must be >= 1, got {n_cells}")
    pair = eigen(build_transfer(ex, pt))
    tail = math.log1p(pair.lambda_minus_ratio**n_cells)
    return n_cells * pair.log_lambda_plus + tail


@njit(cache=True)
def _log_matrix_powers(L, n_cells):
    """Log-domain powers of the 2x2 transfer matrix, rescaled per power."""
    powers = np.empty((n_cells + 1, 2, 2))
    powers[0, 0, 0] = 0.0
    powers[0, 0, 1] = -np.inf
    powers[0, 1, 0] = -np.inf
    powers[0, 1, 1] = 0.0
    for k in range(1, n_cells + 1):
        mx = -np.inf
        for a in range(2):
            for b in range(2):
                w0 = powers[k - 1, a, 0] + L[0, b]
                w1 = powers[k - 1, a, 1] + L[1, b]
                hi = w0 if w0 > w1 else w1
                lo = w1 if w0 > w1 else w0
                v = hi + math.log1p(math.exp(lo - hi)) if hi > -np.inf else -np.inf
                powers[k, a, b] = v
                if v > mx:
                    mx = v
        for a in range(2):
            for b in range(2):
                powers[k, a, b] -= mx  # only ratios matter
    return powers


@njit(cache=True)
def _pick2(w0, w1, u):
    mx = w0 if w0 > w1 else w1
    p0 = math.exp(w0 - mx)
    p1 = math.exp(w1 - mx)
    return 0 if u < p0 / (p0 + p1) else 1


@njit(cache=True)
def _sample_ring(L, g, powers, seed, spins):
    """Draw one ring configuration; returns the advanced stream state."""
    n_cells = powers.shape[0] - 1
    state = np.uint64(seed)

    state, z = _rng_next(state)
    a0 = _pick2(powers[n_cells, 0, 0], powers[n_cells, 1, 1], _rng_unit(z))
    prev = a0
    boundary = np.empty(n_cells, dtype=np.int64)
    boundary[0] = a0
    for i in range(1, n_cells):
        rest = powers[n_cells - i]  # steps still needed to close the ring
        state, z = _rng_next(state)
        prev = _pick2(L[prev, 0] + rest[0, a0], L[prev, 1] + rest[1, a0], _rng_unit(z))
        boundary[i] = prev

    for i in range(n_cells):
        a = boundary[i]
        b = boundary[(i + 1) % n_cells]
        mx = g[a, b, 0]
        for k in range(1, 4):
            if g[a, b, k] > mx:
                mx = g[a, b, k]
        tot = 0.0
        for k in range(4):
            tot += math.exp(g[a, b, k] - mx)
        state, z = _rng_next(state)
        u = _rng_unit(z)
        pick = 3
        acc = 0.0
        for k in range(3):
            acc += math.exp(g[a, b, k] - mx) / tot
            if u < acc:
                pick = k
                break
        # term order in _element_terms: pick enumerates (s2, s3) over
        # (+,+), (+,-), (-,+), (-,-)
        spins[3 * i] = 1 if a == 0 else -1
        spins[3 * i + 1] = 1 if pick < 2 else -1
        spins[3 * i + 2] = 1 if pick % 2 == 0 else -1
    return state


def ring_sampler_tables(ex: ExchangeConstants, pt: FieldPoint, n_cells: int):
    """Precomputed (L, g, powers) for repeated exact ring sampling."""
    if n_cells < 1:
        raise ValueError(f"n_cells must be >= 1, got {n_cells}")
    a_arr, b_arr = _element_terms(ex)
    g = (a_arr + pt.h * b_arr) / pt.t  # (2, 2, 4) log weights of inner spins
    L, _, _ = _log_elements(ex, pt.h, pt.t, derivs=False)
    powers = _log_matrix_powers(np.asarray(L, dtype=np.float64), n_cells)
    return np.asarray(L, dtype=np.float64), np.asarray(g, dtype=np.float64), powers


def sample_ring_configuration(ex: ExchangeConstants, pt: FieldPoint, n_cells: int,
                              seed: int) -> tuple[np.ndarray, int]:
    """One exact sample of the finite ring's Boltzmann distribution.

    Forward-filter / backward-sample along the cell chain: the boundary
    spins follow the transfer kernel conditioned on ring closure (log-domain
    powers of the matrix), and each cell's two inner spins are then drawn
    from their four local Boltzmann weights.  Returns the configuration and
    the final state of the splitmix64 stream, so a caller can continue
    drawing from the same stream.
    """
    L, g, powers = ring_sampler_tables(ex, pt, n_cells)
    spins = np.empty(3 * n_cells, dtype=np.int8)
    state = _sample_ring(L, g, powers, np.uint64(seed & 0xFFFFFFFFFFFFFFFF), spins)
    return spins, int(state)


@dataclass(frozen=True)
class SweepTable:
    """Flat (h, t) grid of per-spin thermodynamics, temperature-major order."""

    h: np.ndarray
    t: np.ndarray
    f: np.ndarray
    s: np.ndarray
    m: np.ndarray

    def __len__(self) -> int:
        return self.h.size

    def rows(self):
        for i in range(self.h.size):
            yield (self.h[i], self.t[i], self.f[i], self.s[i], self.m[i])

    def to_csv(self) -> str:
        lines = ["h,T,f,s,m"]
        for h, t, f, s, m in self.rows():
            lines.append(f"{h:.12g},{t:.12g},{f:.12g},{s:.12g},{m:.12g}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        import json

        records = [
            {"h": float(h), "T": float(t), "f": float(f), "s": float(s), "m": float(m)}
            for h, t, f, s, m in self.rows()
        ]
        return json.dumps(records, indent=1)


def _sweep_block(args):
    ex, h, t = args
    log_lambda, dt, dh = _thermo_core(ex, h, t)
    f = -(t / 3.0) * log_lambda
    s = (log_lambda + t * dt) / 3.0
    m = (t / 3.0) * dh
    return f, s, m


def default_workers() -> int:
    """Worker count for grid sweeps, overridable via TRICHAIN_WORKERS."""
    raw = os.environ.get("TRICHAIN_WORKERS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"TRICHAIN_WORKERS must be an integer, got {raw!r}") from None
    return max(1, n)


def sweep(ex: ExchangeConstants, h_grid, t_grid, workers: int | None = None) -> SweepTable:
    """Evaluate (f, s, m) over a full grid, t-major row order.

    Rows are independent; with workers > 1 the flat grid is split into
    contiguous blocks evaluated in parallel, which is bit-identical to the
    serial result.
    """
    h_grid = np.asarray(h_grid, dtype=np.float64).ravel()
    t_grid = np.asarray(t_grid, dtype=np.float64).ravel()
    if h_grid.size == 0 or t_grid.size == 0:
        empty = np.empty(0)
        return SweepTable(empty, empty, empty.copy(), empty.copy(), empty.copy())
    if np.any(t_grid <= 0.0):
        raise ValueError("all sweep temperatures must be positive")
    h = np.tile(h_grid, t_grid.size)
    t = np.repeat(t_grid, h_grid.size)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or h.size < 4 * workers:
        f, s, m = _sweep_block((ex, h, t))
        return SweepTable(h, t, f, s, m)

    import multiprocessing

    bounds = np.linspace(0, h.size, workers + 1).astype(int)
    jobs = [
        (ex, h[lo:hi], t[lo:hi])
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    with multiprocessing.Pool(processes=len(jobs)) as pool:
        parts = pool.map(_sweep_block, jobs)
    f = np.concatenate([p[0] for p in parts])
    s = np.concatenate([p[1] for p in parts])
    m = np.concatenate([p[2] for p in parts])
    return SweepTable(h, t, f, s, m)
