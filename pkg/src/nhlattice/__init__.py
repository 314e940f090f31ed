"""Simulator for 1D lattices with phase-modulated complex hopping rates.

Builds banded Hamiltonians for the homogeneous chain, the two-sublattice
sawtooth realization, and the heterogeneous capture structure; evolves
states with an exact reference propagator or fixed-step RK4 under
piecewise-constant schedules; and packages transport/storage experiments
as reproducible presets with CSV/metrics/SVG artifacts.
"""

__version__ = "0.1.0"

from .lattice import (
    ChainSpec,
    DefectSpec,
    SawtoothSpec,
    SandwichSpec,
    Hamiltonian,
    BandedOperator,
    ReducedChain,
    build_chain_hamiltonian,
    build_sawtooth_hamiltonian,
    build_sandwich_hamiltonian,
    dispersion,
    group_velocity,
    adiabatic_reduce,
    reduce_phase,
)
from .dynamics import (
    StateVector,
    Schedule,
    ScheduleSegment,
    Trajectory,
    GainRunawayError,
    evolve_exact,
    evolve_rk4,
    evolve_schedule,
    normalized_profile,
    normalized_profile_matrix,
)
from .analysis import (
    ExcitationSpec,
    TransportMetrics,
    StorageMetrics,
    GaussianFit,
    make_excitation,
    centroid,
    centroid_series,
    centroid_velocity,
    region_norm_fraction,
    measure_reflection,
    fit_gaussian,
    storage_efficiency,
)
from .protocols import (
    Timing,
    StorageParams,
    ReductionParams,
    DispersionParams,
    ExperimentConfig,
    ExperimentResult,
    PRESETS,
    preset_config,
    resolve_config,
    run_experiment,
    run_preset,
    run_dispersion_scan,
    run_transport,
    run_storage,
    run_reduction_check,
)
from .configio import ConfigError

__all__ = [name for name in dir() if not name.startswith("_")]
