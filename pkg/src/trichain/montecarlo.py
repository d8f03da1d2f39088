"""Metropolis single-spin-flip sampling on the periodic triangle ring.

Independent dynamical cross-check of the exact magnetization curves.
Sweeps visit sites sequentially (site 0, 1, ..., N-1); one sweep is N
attempted flips.  The flip rule is the textbook one: accept with
probability min(1, exp(-dE/T)), with dE assembled locally from the
at-most-three bonds plus the field term touching the flipped spin.

Each run averages over independent chains.  A chain starts from an exact
sample of the ring's Boltzmann distribution (transfer-chain
forward-filter / backward-sample), which makes every chain average an
unbiased estimator from the first sweep: at the low temperatures of
interest the single-flip barriers are several coupling units, so no
cooling schedule equilibrates the slow domain-wall modes at desk scale,
from either a random or an ordered start.  Error bars come from the
scatter of the independent chain means; with a single chain they fall
back to binning of the time series.  An optional geometric annealing
ladder (2T down to T in anneal_steps stages) is kept for experiments.

Randomness comes from a splitmix64 counter generator, so a run is a pure
function of its seed.  Seed splitting is documented and deterministic:
curve point i uses output i+1 of a stream seeded with the master seed, and
chain r within a run uses output r+1 of a stream seeded with the run seed.
The chain's flip stream continues from the state where its initialization
sample left off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ._rng import MASK64 as _MASK64, next64 as _next64, unit as _unit, splitmix64
from .model import ChainSpec, FieldPoint
from . import transfer

__all__ = ["McParams", "McResult", "mc_run", "mc_curve", "curve_to_csv", "derive_seed"]


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for the index-th member of a family of independent streams."""
    if index < 0:
        raise ValueError(f"index must be >= 0, got {index}")
    state = master_seed & _MASK64
    out = 0
    for _ in range(index + 1):
        state, out = splitmix64(state)
    return out


@njit(cache=True)
def _total_energy(spins, nbr, cpl, h):
    n = spins.shape[0]
    e = 0.0
    for i in range(n):
        b = 0.0
        for d in range(3):
            b += cpl[i, d] * spins[nbr[i, d]]
        e -= 0.5 * b * spins[i] + h * spins[i]
    return e


@njit(cache=True)
def _run_chain(spins, nbr, cpl, h, stage_temps, stage_lens, t_meas, n_meas, seed,
               m_series, e_series):
    """Run burn-in stages then measure once per sweep; mutates `spins`.

    Returns the number of accepted flips during the measurement phase.
    One uniform draw is consumed per attempted flip, so the trajectory is a
    pure function of the seed and the initial configuration.
    """
    n = nbr.shape[0]
    state = np.uint64(seed)
    e = _total_energy(spins, nbr, cpl, h)

    for stage in range(stage_temps.shape[0]):
        beta = 1.0 / stage_temps[stage]
        for _ in range(stage_lens[stage]):
            for i in range(n):
                state, z = _next64(state)
                u = _unit(z)
                b = 0.0
                for d in range(3):
                    b += cpl[i, d] * spins[nbr[i, d]]
                d_e = 2.0 * spins[i] * (b + h)
                if d_e <= 0.0 or u < math.exp(-beta * d_e):
                    spins[i] = -spins[i]
                    e += d_e

    accepted = 0
    beta = 1.0 / t_meas
    for sweep in range(n_meas):
        for i in range(n):
            state, z = _next64(state)
            u = _unit(z)
            b = 0.0
            for d in range(3):
                b += cpl[i, d] * spins[nbr[i, d]]
            d_e = 2.0 * spins[i] * (b + h)
            if d_e <= 0.0 or u < math.exp(-beta * d_e):
                spins[i] = -spins[i]
                e += d_e
                accepted += 1
        m_sum = 0
        for i in range(n):
            m_sum += spins[i]
        m_series[sweep] = m_sum / n
        e_series[sweep] = e / n
    return accepted


@dataclass(frozen=True)
class McParams:
    """Sampler controls; identical params (and inputs) mean identical output.

    sweeps and burn_in are per chain.  anneal_steps > 0 prepends a geometric
    temperature ladder from 2T down to T to the burn-in; the burn_in budget
    is split evenly over the ladder stages plus a final stage at T.
    """

    sweeps: int = 600
    burn_in: int = 0
    seed: int = 11
    n_bins: int = 20
    anneal_steps: int = 0
    n_chains: int = 96

    def __post_init__(self):
        if self.n_bins < 2:
            raise ValueError(f"n_bins must be >= 2, got {self.n_bins}")
        if self.sweeps < self.n_bins:
            raise ValueError(
                f"sweeps ({self.sweeps}) must be >= n_bins ({self.n_bins})"
            )
        if self.burn_in < 0 or self.anneal_steps < 0:
            raise ValueError("burn_in and anneal_steps must be >= 0")
        if self.n_chains < 1:
            raise ValueError(f"n_chains must be >= 1, got {self.n_chains}")


@dataclass(frozen=True)
class McResult:
    m_mean: float
    m_stderr: float
    e_mean: float
    e_stderr: float
    acceptance_rate: float


def _site_tables(spec: ChainSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-site neighbour indices and couplings, padded to width 3.

    Middle spins have two bonds; the pad entry has coupling 0 and points at
    site 0, contributing nothing.
    """
    n_cells = spec.n_cells
    n = spec.n_spins
    ex = spec.exchange
    nbr = np.zeros((n, 3), dtype=np.int64)
    cpl = np.zeros((n, 3), dtype=np.float64)
    for i in range(n_cells):
        a, b, c = 3 * i, 3 * i + 1, 3 * i + 2
        c_prev = 3 * ((i - 1) % n_cells) + 2
        a_next = 3 * ((i + 1) % n_cells)
        nbr[a] = (b, c, c_prev)
        cpl[a] = (ex.j_d, ex.j, ex.j_t)
        nbr[b] = (a, c, 0)
        cpl[b] = (ex.j_d, ex.j_d, 0.0)
        nbr[c] = (b, a, a_next)
        cpl[c] = (ex.j_d, ex.j, ex.j_t)
    return nbr, cpl


def _ladder(t_target: float, params: McParams) -> tuple[np.ndarray, np.ndarray]:
    k = params.anneal_steps
    temps = [2.0 * t_target * 0.5 ** (j / k) for j in range(k)] if k > 0 else []
    temps.append(t_target)
    base = params.burn_in // (k + 1)
    lens = [base] * (k + 1)
    lens[-1] += params.burn_in - base * (k + 1)
    return np.asarray(temps, dtype=np.float64), np.asarray(lens, dtype=np.int64)


def mc_run(spec: ChainSpec, pt: FieldPoint, params: McParams) -> McResult:
    """Averages and standard errors per spin over params.n_chains chains."""
    if spec.n_cells < 2:
        raise ValueError(f"Monte Carlo needs n_cells >= 2, got {spec.n_cells}")
    nbr, cpl = _site_tables(spec)
    stage_temps, stage_lens = _ladder(pt.t, params)
    m_series = np.empty(params.sweeps, dtype=np.float64)
    e_series = np.empty(params.sweeps, dtype=np.float64)
    sampler_l, sampler_g, sampler_powers = transfer.ring_sampler_tables(
        spec.exchange, pt, spec.n_cells
    )
    spins = np.empty(spec.n_spins, dtype=np.int8)

    chain_m = np.empty(params.n_chains)
    chain_e = np.empty(params.n_chains)
    accepted_total = 0
    for r in range(params.n_chains):
        chain_seed = derive_seed(params.seed, r)
        state = transfer._sample_ring(
            sampler_l, sampler_g, sampler_powers,
            np.uint64(chain_seed & _MASK64), spins,
        )
        accepted_total += _run_chain(
            spins, nbr, cpl, float(pt.h), stage_temps, stage_lens, float(pt.t),
            params.sweeps, np.uint64(int(state) & _MASK64), m_series, e_series,
        )
        chain_m[r] = m_series.mean()
        chain_e[r] = e_series.mean()

    if params.n_chains > 1:
        m_mean = float(chain_m.mean())
        e_mean = float(chain_e.mean())
        m_stderr = float(chain_m.std(ddof=1) / math.sqrt(params.n_chains))
        e_stderr = float(chain_e.std(ddof=1) / math.sqrt(params.n_chains))
    else:
        n_use = (params.sweeps // params.n_bins) * params.n_bins
        m_bins = m_series[:n_use].reshape(params.n_bins, -1).mean(axis=1)
        e_bins = e_series[:n_use].reshape(params.n_bins, -1).mean(axis=1)
        m_mean = float(m_bins.mean())
        e_mean = float(e_bins.mean())
        m_stderr = float(m_bins.std(ddof=1) / math.sqrt(params.n_bins))
        e_stderr = float(e_bins.std(ddof=1) / math.sqrt(params.n_bins))

    return McResult(
        m_mean=m_mean,
        m_stderr=m_stderr,
        e_mean=e_mean,
        e_stderr=e_stderr,
        acceptance_rate=accepted_total / (params.n_chains * params.sweeps * spec.n_spins),
    )


def mc_curve(spec: ChainSpec, h_grid, t: float, params: McParams) -> list[McResult]:
    """Independent runs over a field grid, seeds split from the master."""
    results = []
    for i, h in enumerate(np.asarray(h_grid, dtype=np.float64).ravel()):
        point_params = McParams(
            sweeps=params.sweeps,
            burn_in=params.burn_in,
            seed=derive_seed(params.seed, i),
            n_bins=params.n_bins,
            anneal_steps=params.anneal_steps,
            n_chains=params.n_chains,
        )
        results.append(mc_run(spec, FieldPoint(h=float(h), t=t), point_params))
    return results


def curve_to_csv(h_grid, t: float, results: list[McResult]) -> str:
    lines = ["h,T,m_mc,m_err,e_mc,e_err,acceptance"]
    for h, r in zip(np.asarray(h_grid, dtype=np.float64).ravel(), results):
        lines.append(
            f"{h:.12g},{t:.12g},{r.m_mean:.12g},{r.m_stderr:.12g},"
            f"{r.e_mean:.12g},{r.e_stderr:.12g},{r.acceptance_rate:.12g}"
        )
    return "\n".join(lines) + "\n"
