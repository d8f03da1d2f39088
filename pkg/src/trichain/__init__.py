"""Exact thermodynamics, ground-state combinatorics, and Monte Carlo for a
frustrated periodic chain of Ising spin triangles."""

from .model import (
    CASE_PRESETS,
    ChainSpec,
    ExchangeConstants,
    FieldPoint,
    energy,
    energy_exact,
    total_magnetization,
)
from .transfer import (
    EigenPair,
    SweepTable,
    TransferMatrix,
    build_transfer,
    eigen,
    entropy,
    free_energy,
    lambda_derivatives,
    magnetization,
    partition_finite,
    sweep,
)
from .enumeration import (
    GroundStateReport,
    brute_partition,
    ground_states,
    ground_states_plus_zero,
    omega_sequence,
    residual_entropy_estimate,
)
from .sequences import (
    SequenceMatch,
    asymptotic_constants,
    fibonacci,
    identify,
    lucas,
    pell,
    pell_lucas,
)
from .montecarlo import McParams, McResult, mc_curve, mc_run
from .critical import PhasePoint, critical_fields, entropy_peak_scan, residual_magnetization

__version__ = "0.1.0"
